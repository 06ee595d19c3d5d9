#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "subtest/collision.hpp"
#include "subtest/distribution.hpp"
#include "subtest/harness.hpp"
#include "subtest/markov.hpp"

namespace subtest {

// Distribution files: {"n": int, "probs": [n reals]}.
nlohmann::json distribution_to_json(const ExplicitDistribution& p);
ExplicitDistribution distribution_from_json(const nlohmann::json& j);
void save_distribution(const std::string& path, const ExplicitDistribution& p);
ExplicitDistribution load_distribution(const std::string& path);

// Chain files: {"n": int, "rows": [[[target, prob], ...], ...]} with
// 1-indexed targets.
nlohmann::json chain_to_json(const MarkovChain& m);
MarkovChain chain_from_json(const nlohmann::json& j);
void save_chain(const std::string& path, const MarkovChain& m);
MarkovChain load_chain(const std::string& path);

// Fingerprints: {"s": int, "entries": [[i, j, count], ...]} in canonical
// cell order.
nlohmann::json fingerprint_to_json(const Fingerprint& f);
Fingerprint fingerprint_from_json(const nlohmann::json& j);

// Verdicts and reports; element labels are 1-indexed in the output.
nlohmann::json verdict_to_json(const Verdict& v);
nlohmann::json report_to_json(const ExperimentReport& r);
std::string reports_to_csv(const std::vector<ExperimentReport>& reports);
std::string reports_to_table(const std::vector<ExperimentReport>& reports);

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

// Optional "sweep" object in an experiment file: {"axis": [values, ...]}.
bool has_sweep(const nlohmann::json& j);
SweepGrid sweep_grid_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

} // namespace subtest
