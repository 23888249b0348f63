// harness.hpp
// Command implementations behind the CLI. Each command writes its reports
// into cfg.out and returns a process exit code:
//   0  all invariants hold
//   1  an invariant failed (details in the JSON report)
//   2  usage, config, schema or unsupported-dimension error

#pragma once

#include "mublab/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace mublab {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct MubVerifyOptions {
    std::optional<int> dim;             // verify one dimension only
    std::optional<std::string> input;   // verify a serialized MubSystem
};

int cmd_mub_verify(const ExperimentConfig& cfg, const MubVerifyOptions& opt, std::ostream& log);
/// sub in {compare, dominance, octahedron, radial, gap}.
int cmd_width(const std::string& sub, const ExperimentConfig& cfg, std::ostream& log);
int cmd_qaoa_bench(const ExperimentConfig& cfg, std::ostream& log);
int cmd_qrao_bench(const ExperimentConfig& cfg, std::ostream& log);
/// Recomputes summaries and plot data from the result CSVs in `results_dir`.
int cmd_report(const std::string& results_dir, std::ostream& log);

/// Seeds derived from the master seed; recorded in the manifest.
std::uint64_t instance_seed(std::uint64_t master, int seed_index);
std::uint64_t method_seed(std::uint64_t instance_seed, int n, int p);

}  // namespace mublab
