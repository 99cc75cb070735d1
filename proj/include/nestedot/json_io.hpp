#pragma once

#include <json.hpp>
#include <string>

#include "nestedot/cylinder.hpp"
#include "nestedot/dynamics.hpp"
#include "nestedot/fields.hpp"
#include "nestedot/nested.hpp"
#include "nestedot/transport.hpp"
#include "nestedot/verify.hpp"

namespace nestedot {

using json = nlohmann::json;

json to_json(const DiscreteMeasure& mu);
DiscreteMeasure discrete_measure_from_json(const json& j);

json to_json(const RandomMeasure& m);
RandomMeasure random_measure_from_json(const json& j);

json to_json(const Coupling& plan);
Coupling coupling_from_json(const json& j);

json to_json(const OTResult& result);

json to_json(const OuterCoupling& plan);
OuterCoupling outer_coupling_from_json(const json& j);

json to_json(const RandomCoupling& P);

json to_json(const NonLocalField& b);
NonLocalField field_from_json(const json& j);

json to_json(const CylinderFunction& F);
CylinderFunction cylinder_from_json(const json& j);

json to_json(const TrajectoryEnsemble& ens);
TrajectoryEnsemble ensemble_from_json(const json& j);

json to_json(const ResidualReport& report);

/// Initial data for `simulate`: weighted particle configurations.
struct InitialEnsemble {
    int dim = 0;
    std::vector<std::pair<double, ParticleConfiguration>> entries;
};
InitialEnsemble initial_ensemble_from_json(const json& j);

/// Parses a file, mapping parse errors to InputError with the byte-precise
/// message from the JSON parser.
json load_json_file(const std::string& path);

}  // namespace nestedot
