#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "nestedot/errors.hpp"
#include "nestedot/json_io.hpp"
#include "nestedot/selftest.hpp"
#include "nestedot/verify.hpp"

namespace {

using namespace nestedot;

constexpr int kExitOk = 0;
constexpr int kExitTolerance = 2;
constexpr int kExitInput = 3;

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw InputError("cannot write file: " + out_path);
        out << j.dump(2) << '\n';
    }
}

void write_csv(const std::string& path, const std::string& header, const std::vector<std::string>& rows) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    out << header << '\n';
    for (const auto& row : rows) out << row << '\n';
}

std::string num(double x) {
    return json(x).dump();  // shortest round-trip decimal
}

struct Args {
    std::string a, b, m, field, ensemble, cyl, init, emit_coupling, csv, out;
    double p = 2.0;
    double t1 = 1.0;
    double tol = 1e-3;
    double lipschitz = 1.0;
    int steps = 128;
    int samples = 5;
    std::uint64_t seed = 0;
    std::string scheme = "rk4";
};

Scheme parse_scheme(const std::string& s) {
    if (s == "rk4") return Scheme::rk4;
    if (s == "euler") return Scheme::euler;
    throw InputError("unknown scheme: " + s);
}

int cmd_dist(const Args& args) {
    const RandomMeasure M = random_measure_from_json(load_json_file(args.a));
    const RandomMeasure N = random_measure_from_json(load_json_file(args.b));
    const NestedResult res = nested_wasserstein(M, N, args.p);
    if (!args.emit_coupling.empty()) emit(to_json(res.coupling), args.emit_coupling);
    std::cout << json{{"wp", metric_pow(res.cost, 1.0 / args.p)}, {"wpp", res.cost}}.dump() << '\n';
    return kExitOk;
}

int cmd_geodesic(const Args& args) {
    const RandomMeasure M = random_measure_from_json(load_json_file(args.a));
    const RandomMeasure N = random_measure_from_json(load_json_file(args.b));
    if (args.samples < 2) throw InputError("need at least 2 samples");
    const OuterGeodesic geo(M, N, args.p);
    json out = json::array();
    for (int k = 0; k < args.samples; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(args.samples - 1);
        out.push_back(json{{"t", t}, {"measure", to_json(geo.sample(t))}});
    }
    emit(out, args.out);
    return kExitOk;
}

int cmd_simulate(const Args& args) {
    const InitialEnsemble init = initial_ensemble_from_json(load_json_file(args.init));
    const NonLocalField field = field_from_json(load_json_file(args.field));
    const TimeGrid grid{0.0, args.t1, args.steps};
    const TrajectoryEnsemble ens = evolve_ensemble(init.entries, field, grid, parse_scheme(args.scheme), args.seed);
    emit(to_json(ens), args.out);
    if (!args.csv.empty()) {
        std::vector<std::string> rows;
        for (std::size_t pi = 0; pi < ens.paths.size(); ++pi)
            for (int k = 0; k < ens.grid.node_count(); ++k) {
                const auto& state = ens.paths[pi].states[static_cast<std::size_t>(k)];
                for (std::size_t i = 0; i < state.points.size(); ++i) {
                    std::string row = std::to_string(pi) + "," + std::to_string(k) + "," +
                                      num(ens.grid.node(k)) + "," + std::to_string(i);
                    for (double c : state.points[i]) row += "," + num(c);
                    rows.push_back(std::move(row));
                }
            }
        write_csv(args.csv, "path,node,t,particle,coords...", rows);
    }
    return kExitOk;
}

int report_exit(const ResidualReport& report, const Args& args, const char* what) {
    emit(to_json(report), args.out);
    if (!args.csv.empty()) {
        std::vector<std::string> rows;
        for (std::size_t k = 0; k < report.per_node.size(); ++k)
            rows.push_back(std::to_string(k + 1) + "," + num(report.per_node[k]));
        write_csv(args.csv, "node,residual", rows);
    }
    if (report.max_abs > args.tol) {
        std::cerr << what << ": residual " << report.max_abs << " exceeds tolerance " << args.tol << '\n';
        return kExitTolerance;
    }
    return kExitOk;
}

int cmd_verify_ce(const Args& args) {
    const TrajectoryEnsemble ens = ensemble_from_json(load_json_file(args.ensemble));
    const NonLocalField field = field_from_json(load_json_file(args.field));
    const CylinderFunction F = cylinder_from_json(load_json_file(args.cyl));
    return report_exit(cerm_residual(ens, field, F), args, "verify-ce");
}

int cmd_verify_sps(const Args& args) {
    const TrajectoryEnsemble ens = ensemble_from_json(load_json_file(args.ensemble));
    const NonLocalField field = field_from_json(load_json_file(args.field));
    double worst = 0.0;
    json per_path = json::array();
    for (const auto& path : ens.paths) {
        const double res = sps_residual(path, field);
        per_path.push_back(res);
        worst = std::max(worst, res);
    }
    emit(json{{"max_abs", worst}, {"per_path", per_path}}, args.out);
    if (worst > args.tol) {
        std::cerr << "verify-sps: residual " << worst << " exceeds tolerance " << args.tol << '\n';
        return kExitTolerance;
    }
    return kExitOk;
}

int cmd_bb_check(const Args& args) {
    const RandomMeasure M = random_measure_from_json(load_json_file(args.a));
    const RandomMeasure N = random_measure_from_json(load_json_file(args.b));
    const BenamouBrenierReport report = benamou_brenier_check(M, N, args.p, args.steps);
    emit(json{{"action", report.action},
              {"distance_p", report.distance_p},
              {"gap", report.gap},
              {"sampled_action", report.sampled_action}},
         args.out);
    if (std::abs(report.gap) > 1e-8 * std::max(1.0, report.distance_p)) {
        std::cerr << "bb-check: gap " << report.gap << " exceeds tolerance\n";
        return kExitTolerance;
    }
    return kExitOk;
}

int cmd_barycenter(const Args& args) {
    const RandomMeasure M = random_measure_from_json(load_json_file(args.m));
    emit(to_json(barycenter(M, true)), args.out);
    return kExitOk;
}

int cmd_gronwall(const Args& args) {
    const NonLocalField field = field_from_json(load_json_file(args.field));
    const DiscreteMeasure a = discrete_measure_from_json(load_json_file(args.a));
    const DiscreteMeasure b = discrete_measure_from_json(load_json_file(args.b));
    const TimeGrid grid{0.0, args.t1, args.steps};
    const GronwallReport report =
        gronwall_uniqueness_check(field, a, b, grid, args.p, args.lipschitz, parse_scheme(args.scheme));
    emit(json{{"initial_distance", report.initial_distance},
              {"times", report.times},
              {"distances", report.distances},
              {"bounds", report.bounds}},
         args.out);
    if (!args.csv.empty()) {
        std::vector<std::string> rows;
        for (std::size_t k = 0; k < report.times.size(); ++k)
            rows.push_back(num(report.times[k]) + "," + num(report.distances[k]) + "," + num(report.bounds[k]));
        write_csv(args.csv, "t,distance,bound", rows);
    }
    return kExitOk;
}

int cmd_selftest() {
    const auto results = run_acceptance({});
    print_table(results, std::cout, &std::cerr);
    return all_passed(results) ? kExitOk : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical optimal transport on discrete random measures"};
    app.require_subcommand(1);
    Args args;

    auto* dist = app.add_subcommand("dist", "nested Wasserstein distance between two random measures");
    dist->add_option("--a", args.a, "source RandomMeasure JSON")->required();
    dist->add_option("--b", args.b, "target RandomMeasure JSON")->required();
    dist->add_option("--p", args.p, "exponent p >= 1");
    dist->add_option("--emit-coupling", args.emit_coupling, "write the outer coupling JSON here");

    auto* geo = app.add_subcommand("geodesic", "sample the displacement geodesic between two random measures");
    geo->add_option("--a", args.a)->required();
    geo->add_option("--b", args.b)->required();
    geo->add_option("--p", args.p);
    geo->add_option("--samples", args.samples, "number of samples on [0,1]");
    geo->add_option("--out", args.out, "output file (stdout when omitted)");

    auto* sim = app.add_subcommand("simulate", "integrate an interacting-particle ensemble");
    sim->add_option("--init", args.init, "initial ensemble JSON")->required();
    sim->add_option("--field", args.field, "non-local field JSON")->required();
    sim->add_option("--t1", args.t1, "final time");
    sim->add_option("--steps", args.steps, "number of grid steps");
    sim->add_option("--scheme", args.scheme, "euler | rk4");
    sim->add_option("--seed", args.seed, "ensemble seed (metadata)");
    sim->add_option("--out", args.out);
    sim->add_option("--csv", args.csv, "also write per-(path,node,particle) CSV");

    auto* vce = app.add_subcommand("verify-ce", "continuity-equation residual on random measures");
    vce->add_option("--ensemble", args.ensemble)->required();
    vce->add_option("--field", args.field)->required();
    vce->add_option("--cyl", args.cyl, "cylinder function JSON")->required();
    vce->add_option("--tol", args.tol, "max residual before exit 2");
    vce->add_option("--out", args.out);
    vce->add_option("--csv", args.csv);

    auto* vsps = app.add_subcommand("verify-sps", "superposition residual per path");
    vsps->add_option("--ensemble", args.ensemble)->required();
    vsps->add_option("--field", args.field)->required();
    vsps->add_option("--tol", args.tol);
    vsps->add_option("--out", args.out);

    auto* bb = app.add_subcommand("bb-check", "Benamou-Brenier action vs nested distance");
    bb->add_option("--a", args.a)->required();
    bb->add_option("--b", args.b)->required();
    bb->add_option("--p", args.p);
    bb->add_option("--steps", args.steps, "geodesic sampling steps");
    bb->add_option("--out", args.out);

    auto* bary = app.add_subcommand("barycenter", "barycenter of a random measure");
    bary->add_option("--m", args.m)->required();
    bary->add_option("--out", args.out);

    auto* gron = app.add_subcommand("gronwall", "Gronwall contraction check for two initial measures");
    gron->add_option("--field", args.field)->required();
    gron->add_option("--a", args.a)->required();
    gron->add_option("--b", args.b)->required();
    gron->add_option("--p", args.p);
    gron->add_option("--t1", args.t1);
    gron->add_option("--steps", args.steps);
    gron->add_option("--lipschitz", args.lipschitz, "Lipschitz bound of the field")->required();
    gron->add_option("--scheme", args.scheme);
    gron->add_option("--out", args.out);
    gron->add_option("--csv", args.csv);

    auto* st = app.add_subcommand("selftest", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (dist->parsed()) return cmd_dist(args);
        if (geo->parsed()) return cmd_geodesic(args);
        if (sim->parsed()) return cmd_simulate(args);
        if (vce->parsed()) return cmd_verify_ce(args);
        if (vsps->parsed()) return cmd_verify_sps(args);
        if (bb->parsed()) return cmd_bb_check(args);
        if (bary->parsed()) return cmd_barycenter(args);
        if (gron->parsed()) return cmd_gronwall(args);
        if (st->parsed()) return cmd_selftest();
    } catch (const ToleranceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitTolerance;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
