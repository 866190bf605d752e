#pragma once

#include <json.hpp>

#include "gtsens/estimator.hpp"
#include "gtsens/network.hpp"
#include "gtsens/oracles.hpp"
#include "gtsens/validity.hpp"

namespace gtsens {

nlohmann::json to_json(const EstimatorResult& r);
nlohmann::json to_json(const ReactionNetwork& net, const ValidityReport& rep);
nlohmann::json to_json(const ProbeResult& p);
nlohmann::json to_json(const ReweightingDiagnostic& d);
nlohmann::json to_json(const MonoSolution& s);

std::string render_report_text(const ReactionNetwork& net, const ValidityReport& rep);

}  // namespace gtsens
