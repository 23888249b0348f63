// config.hpp
// Experiment configuration: defaults, JSON overrides with a strict key
// whitelist, and the config hash stamped on every result row.
//
// Layering: built-in defaults, then the large grids if --full, then the
// --config file, then --seed / --workers / --out.

#pragma once

#include "mublab/numcore.hpp"
#include "mublab/problems.hpp"
#include "mublab/qaoa.hpp"
#include "mublab/qrao.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace mublab {

struct ConfigError : Error {
    using Error::Error;
};

struct MubVerifyConfig {
    std::vector<int> primes{2, 3, 5, 7};
    int n_max = 4;
    double tolerance = 1e-9;
    int collapse_costs = 10;
};

struct WidthConfig {
    std::size_t samples = 100000;
    std::vector<int> dims{2, 3, 4};
    int unions = 50;
    int dominance_unions = 20;
    int octahedron_ensembles = 200;
    std::vector<int> gap_qubits{1, 2, 3, 4};
    double cdf_t_max = 4.0;
    double cdf_step = 0.1;
    double sigmas = tol::kMcSigmas;
};

struct QaoaBenchConfig {
    std::vector<int> sizes{6, 8};
    std::vector<int> depths{1, 2};
    int seeds = 5;
    std::vector<std::string> families{"maxcut", "wmaxcut", "mis", "wmis", "knapsack"};
    QaoaSettings settings;
    double bootstrap_level = 0.9;
    int bootstrap_resamples = 2000;
};

struct QraoBenchConfig {
    std::vector<int> sizes{6, 8};
    std::vector<int> depths{1, 2};
    int seeds = 5;
    double edge_prob = 0.5;
    bool exhaustive = false;
    QraoSettings settings;
};

struct ExperimentConfig {
    std::uint64_t seed = 20250101;
    int workers = 1;
    std::string out = "results";
    bool full = false;
    MubVerifyConfig mub;
    WidthConfig width;
    QaoaBenchConfig qaoa;
    QraoBenchConfig qrao;

    /// Large grids: QAOA n in {8..14}, QRAO n in {6..12}, p up to 3.
    void apply_full();
    /// Overrides from a JSON document. Unknown keys and type errors are
    /// collected and reported together in one ConfigError.
    void apply_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    /// FNV-1a over the canonical JSON, excluding workers and out (they do
    /// not change results). 16 hex digits.
    std::string hash() const;
};

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base);

std::string fnv1a_hex(const std::string& s);

}  // namespace mublab
