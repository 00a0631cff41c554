#pragma once

#include "anchorlab/classical_facts.hpp"
#include "anchorlab/quantum_facts.hpp"

#include <json.hpp>
#include <cstdint>
#include <string>
#include <vector>

namespace anchorlab {

// One seeded sweep over the fact checkers: per fact, `trials` generated
// hypothesis-satisfying instances, margins aggregated.  The whole run is a
// pure function of the config, so identical configs give byte-identical
// reports.
struct BatteryConfig {
    std::uint64_t seed = 7;
    std::size_t trials = 100;
    std::string suite = "all";     // classical | quantum | breaker | all
    std::size_t max_alphabet = 4;  // label-count cap for generated tables
    std::size_t max_dim = 6;       // Hilbert-space cap for generated states
    double classical_tolerance = 1e-9;
    double quantum_tolerance = 1e-8;
    std::size_t max_dumps = 3;     // failing instances kept per fact
};

struct FactSummary {
    std::string fact;
    std::size_t trials = 0;
    double min_margin = 0.0;
    std::size_t violations = 0;
    bool report_only = false;
    std::size_t discrepancies = 0;  // report-only margins below the tolerance
    std::vector<nlohmann::ordered_json> dumps;
};

struct BatteryReport {
    std::uint64_t seed = 0;
    std::vector<FactSummary> facts;
    bool pass = true;

    nlohmann::ordered_json to_json() const;
};

// Fact ids run by a suite, in report order.        code CONFIG_RANGE
std::vector<std::string> battery_fact_ids(const std::string& suite);

// The margin of one seeded trial, exactly as run_battery computes it:
// inequality margins unchanged, equality gaps negated, report-only
// discrepancies signed.
double battery_trial_margin(const std::string& fact, const BatteryConfig& config,
                            std::size_t trial);

// Margin recomputed from a dump record emitted by run_battery.
double replay_dump(const nlohmann::json& dump);

BatteryReport run_battery(const BatteryConfig& config);  // CONFIG_RANGE

} // namespace anchorlab
