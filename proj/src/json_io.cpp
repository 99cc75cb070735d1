#include "nestedot/json_io.hpp"

#include <fstream>
#include <sstream>

#include "nestedot/errors.hpp"

namespace nestedot {

namespace {

std::vector<double> doubles_from(const json& j) { return j.get<std::vector<double>>(); }

std::vector<Point> points_from(const json& j) {
    std::vector<Point> out;
    for (const auto& row : j) out.push_back(row.get<Point>());
    return out;
}

json points_to(const std::vector<Point>& pts) {
    json j = json::array();
    for (const auto& p : pts) j.push_back(p);
    return j;
}

std::vector<double> matrix_from(const json& j, int& rows, int& cols) {
    rows = static_cast<int>(j.size());
    cols = rows > 0 ? static_cast<int>(j.at(0).size()) : 0;
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(rows) * cols);
    for (const auto& row : j) {
        if (static_cast<int>(row.size()) != cols) throw InputError("ragged matrix");
        for (const auto& x : row) flat.push_back(x.get<double>());
    }
    return flat;
}

json matrix_to(const std::vector<double>& flat, int rows, int cols) {
    json j = json::array();
    for (int i = 0; i < rows; ++i) {
        json row = json::array();
        for (int k = 0; k < cols; ++k) row.push_back(flat[static_cast<std::size_t>(i) * cols + k]);
        j.push_back(row);
    }
    return j;
}

}  // namespace

json to_json(const DiscreteMeasure& mu) {
    return json{{"dim", mu.dim()}, {"atoms", points_to(mu.atoms())}, {"weights", mu.weights()}};
}

DiscreteMeasure discrete_measure_from_json(const json& j) {
    return DiscreteMeasure(j.at("dim").get<int>(), points_from(j.at("atoms")),
                           doubles_from(j.at("weights")));
}

json to_json(const RandomMeasure& m) {
    json comps = json::array();
    for (const auto& mu : m.components()) comps.push_back(to_json(mu));
    return json{{"dim", m.dim()}, {"outer_weights", m.outer_weights()}, {"components", comps}};
}

RandomMeasure random_measure_from_json(const json& j) {
    std::vector<DiscreteMeasure> comps;
    for (const auto& c : j.at("components")) comps.push_back(discrete_measure_from_json(c));
    return RandomMeasure(std::move(comps), doubles_from(j.at("outer_weights")));
}

json to_json(const Coupling& plan) {
    return json{{"rows", plan.rows}, {"cols", plan.cols}, {"mass", matrix_to(plan.mass, plan.rows, plan.cols)}};
}

Coupling coupling_from_json(const json& j) {
    Coupling plan;
    plan.mass = matrix_from(j.at("mass"), plan.rows, plan.cols);
    if (j.contains("rows") && j.at("rows").get<int>() != plan.rows) throw InputError("coupling shape mismatch");
    if (j.contains("cols") && j.at("cols").get<int>() != plan.cols) throw InputError("coupling shape mismatch");
    return plan;
}

json to_json(const OTResult& result) {
    return json{{"cost", result.cost},
                {"p", result.p},
                {"mass", matrix_to(result.coupling.mass, result.coupling.rows, result.coupling.cols)}};
}

json to_json(const OuterCoupling& plan) {
    return json{{"mass", matrix_to(plan.mass, plan.rows, plan.cols)},
                {"inner_costs", matrix_to(plan.inner_costs, plan.rows, plan.cols)}};
}

OuterCoupling outer_coupling_from_json(const json& j) {
    OuterCoupling plan;
    plan.mass = matrix_from(j.at("mass"), plan.rows, plan.cols);
    int r = 0, c = 0;
    plan.inner_costs = matrix_from(j.at("inner_costs"), r, c);
    if (r != plan.rows || c != plan.cols) throw InputError("coupling shape mismatch");
    return plan;
}

json to_json(const RandomCoupling& P) {
    json plans = json::array();
    for (const auto& e : P.plans)
        plans.push_back(json{{"i", e.i}, {"j", e.j}, {"w", e.weight}, {"coupling", to_json(e.plan)}});
    return json{{"plans", plans}};
}

json to_json(const NonLocalField& b) {
    switch (b.kind()) {
        case NonLocalField::Kind::linear: {
            const Mat& A = b.matrix();
            return json{{"kind", "linear"}, {"A", matrix_to(A.a, A.rows, A.cols)}};
        }
        case NonLocalField::Kind::to_barycenter:
            return json{{"kind", "to_barycenter"}, {"kappa", b.kappa()}};
        case NonLocalField::Kind::convolution:
            return json{{"kind", "convolution"},
                        {"kernel", json{{"type", "gaussian_grad"}, {"sigma", b.kernel_sigma()}, {"scale", b.kernel_scale()}}}};
        case NonLocalField::Kind::time_scaled:
            return json{{"kind", "time_scaled"}, {"g", json{{"poly", b.time_poly()}}}, {"inner", to_json(b.inner())}};
        case NonLocalField::Kind::sum: {
            json terms = json::array();
            for (const auto& term : b.terms()) terms.push_back(to_json(term));
            return json{{"kind", "sum"}, {"terms", terms}};
        }
        case NonLocalField::Kind::custom:
            throw InputError("custom fields are not serializable");
    }
    throw InputError("unreachable");
}

NonLocalField field_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") {
        Mat A;
        A.a = matrix_from(j.at("A"), A.rows, A.cols);
        return NonLocalField::linear(std::move(A));
    }
    if (kind == "to_barycenter") return NonLocalField::to_barycenter(j.at("kappa").get<double>());
    if (kind == "convolution") {
        const json& k = j.at("kernel");
        if (k.at("type").get<std::string>() != "gaussian_grad") throw InputError("unknown kernel type");
        return NonLocalField::convolution_gaussian_grad(k.at("sigma").get<double>(), k.at("scale").get<double>());
    }
    if (kind == "time_scaled")
        return NonLocalField::time_scaled(doubles_from(j.at("g").at("poly")), field_from_json(j.at("inner")));
    if (kind == "sum") {
        std::vector<NonLocalField> terms;
        for (const auto& term : j.at("terms")) terms.push_back(field_from_json(term));
        return NonLocalField::sum(std::move(terms));
    }
    throw InputError("unknown field kind: " + kind);
}

namespace {

std::string multi_index_key(const Polynomial::MultiIndex& mi) {
    std::string s;
    for (std::size_t k = 0; k < mi.size(); ++k) {
        if (k > 0) s += ',';
        s += std::to_string(mi[k]);
    }
    return s;
}

Polynomial::MultiIndex multi_index_parse(const std::string& key) {
    Polynomial::MultiIndex mi;
    std::stringstream ss(key);
    std::string item;
    while (std::getline(ss, item, ',')) mi.push_back(std::stoi(item));
    if (mi.empty()) throw InputError("empty multi-index");
    return mi;
}

}  // namespace

json to_json(const CylinderFunction& F) {
    json phis = json::array();
    for (const auto& phi : F.phis()) {
        switch (phi.kind()) {
            case TestFunction::Kind::gaussian:
                phis.push_back(json{{"kind", "gaussian"}, {"c", phi.center()}, {"sigma", phi.sigma()}});
                break;
            case TestFunction::Kind::coordinate:
                phis.push_back(json{{"kind", "coordinate"},
                                    {"axis", phi.axis()},
                                    {"center", phi.scalar_center()},
                                    {"width", phi.sigma()}});
                break;
            case TestFunction::Kind::custom:
                throw InputError("custom test functions are not serializable");
        }
    }
    json coeffs = json::object();
    for (const auto& [mi, c] : F.psi().coeffs()) coeffs[multi_index_key(mi)] = c;
    return json{{"phis", phis}, {"psi", json{{"coeffs", coeffs}}}};
}

CylinderFunction cylinder_from_json(const json& j) {
    std::vector<TestFunction> phis;
    for (const auto& p : j.at("phis")) {
        const std::string kind = p.at("kind").get<std::string>();
        if (kind == "gaussian") {
            phis.push_back(TestFunction::gaussian_bump(p.at("c").get<Point>(), p.at("sigma").get<double>()));
        } else if (kind == "coordinate") {
            phis.push_back(TestFunction::coordinate_bump(p.at("axis").get<int>(), p.at("center").get<double>(),
                                                         p.at("width").get<double>()));
        } else {
            throw InputError("unknown test function kind: " + kind);
        }
    }
    std::map<Polynomial::MultiIndex, double> coeffs;
    for (const auto& [key, value] : j.at("psi").at("coeffs").items())
        coeffs[multi_index_parse(key)] = value.get<double>();
    return CylinderFunction(std::move(phis), Polynomial(static_cast<int>(j.at("phis").size()), std::move(coeffs)));
}

json to_json(const TrajectoryEnsemble& ens) {
    json paths = json::array();
    for (const auto& path : ens.paths) {
        json nodes = json::array();
        for (const auto& state : path.states) nodes.push_back(points_to(state.points));
        paths.push_back(nodes);
    }
    return json{{"seed", ens.seed},
                {"grid", json{{"t0", ens.grid.t0}, {"t1", ens.grid.t1}, {"steps", ens.grid.steps}}},
                {"path_weights", ens.path_weights},
                {"paths", paths}};
}

TrajectoryEnsemble ensemble_from_json(const json& j) {
    TrajectoryEnsemble ens;
    ens.seed = j.at("seed").get<std::uint64_t>();
    ens.grid.t0 = j.at("grid").at("t0").get<double>();
    ens.grid.t1 = j.at("grid").at("t1").get<double>();
    ens.grid.steps = j.at("grid").at("steps").get<int>();
    ens.grid.validate();
    ens.path_weights = doubles_from(j.at("path_weights"));
    for (const auto& pj : j.at("paths")) {
        ParticlePath path;
        path.grid = ens.grid;
        for (const auto& nj : pj) {
            ParticleConfiguration config;
            config.points = points_from(nj);
            if (config.points.empty()) throw InputError("empty configuration");
            config.dim = static_cast<int>(config.points.front().size());
            path.states.push_back(std::move(config));
        }
        if (static_cast<int>(path.states.size()) != ens.grid.node_count())
            throw InputError("path node count does not match the grid");
        ens.paths.push_back(std::move(path));
    }
    if (ens.paths.empty()) throw InputError("empty ensemble");
    if (ens.paths.size() != ens.path_weights.size()) throw InputError("paths/path_weights length mismatch");
    ens.dim = ens.paths.front().states.front().dim;
    for (const auto& path : ens.paths)
        for (const auto& state : path.states)
            for (const auto& pt : state.points)
                if (static_cast<int>(pt.size()) != ens.dim) throw InputError("dimension mismatch");
    return ens;
}

json to_json(const ResidualReport& report) {
    return json{{"max_abs", report.max_abs}, {"order", report.order}, {"per_node", report.per_node}};
}

InitialEnsemble initial_ensemble_from_json(const json& j) {
    InitialEnsemble init;
    init.dim = j.at("dim").get<int>();
    const auto weights = doubles_from(j.at("path_weights"));
    const auto& configs = j.at("configurations");
    if (weights.size() != configs.size()) throw InputError("path_weights/configurations length mismatch");
    for (std::size_t k = 0; k < weights.size(); ++k) {
        ParticleConfiguration config;
        config.dim = init.dim;
        config.points = points_from(configs[k]);
        if (config.points.empty()) throw InputError("empty configuration");
        for (const auto& pt : config.points)
            if (static_cast<int>(pt.size()) != init.dim) throw InputError("dimension mismatch");
        init.entries.emplace_back(weights[k], std::move(config));
    }
    if (init.entries.empty()) throw InputError("empty ensemble");
    return init;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

}  // namespace nestedot
