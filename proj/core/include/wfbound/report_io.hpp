#pragma once

#include <string>

#include "wfbound/scenario.hpp"

namespace wfbound {

/// JSON forms of the result records; full precision, deterministic field
/// order (nlohmann::json keeps keys sorted).
std::string to_json(const BoundEstimate& est, int indent = -1);
std::string to_json(const PrivacyReport& report, int indent = -1);
std::string to_json(const OverheadReport& report, int indent = -1);

/// One experiment record: scenario, defense, bound, privacy, overheads,
/// one-vs-all stats when present, plus the reproducibility envelope
/// (config_hash, seed, schema, metric, folds).
std::string to_json(const ScenarioReport& report, std::uint64_t config_hash,
                    int indent = -1);

}  // namespace wfbound
