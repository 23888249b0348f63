// mublab command line: MUB verification, width experiments, QAOA/QRAO benches
// and result reports. See README.md for examples.

#include "mublab/harness.hpp"
#include "mublab/report.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace mublab;

    CLI::App app{"mublab: mutually unbiased bases, Gaussian width and MUB-seeded QAOA/QRAO experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    int workers = 0;
    std::string out;
    bool full = false;
    bool exhaustive = false;
    auto* seed_opt = app.add_option("--seed", seed, "master seed (u64)");
    auto* workers_opt = app.add_option("--workers", workers, "worker threads (<= 0: all cores)");
    auto* out_opt = app.add_option("--out", out, "output directory");
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_flag("--full", full, "large grids");
    app.add_flag("--exhaustive", exhaustive, "qrao-bench: add the exhaustive oracle and the Z-mixer baseline");

    auto* mub = app.add_subcommand("mub-verify", "build and verify all supported complete MUB systems");
    int dim = 0;
    std::string input;
    auto* dim_opt = mub->add_option("--dim", dim, "verify a single dimension");
    auto* input_opt = mub->add_option("--input", input, "verify a serialized MUB system (JSON)");

    auto* width = app.add_subcommand("width", "Gaussian-width experiments");
    std::string width_sub;
    width->add_option("experiment", width_sub, "compare | dominance | octahedron | radial | gap")
        ->required()
        ->check(CLI::IsMember({"compare", "dominance", "octahedron", "radial", "gap"}));

    auto* qaoa = app.add_subcommand("qaoa-bench", "standard vs adaptive MUB-XRot QAOA benchmark");
    auto* qrao = app.add_subcommand("qrao-bench", "QRAO family-search strategy benchmark");
    auto* report = app.add_subcommand("report", "recompute summaries and plot data from result CSVs");
    std::string results_dir;
    report->add_option("results", results_dir, "results directory (default: --out or ./results)");

    // Global options may follow the subcommand.
    for (auto* sub : {mub, width, qaoa, qrao, report}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg;
        if (full) cfg.apply_full();
        if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
        if (*seed_opt) cfg.seed = seed;
        if (*workers_opt) cfg.workers = workers;
        if (*out_opt) cfg.out = out;
        if (exhaustive) cfg.qrao.exhaustive = true;

        if (*mub) {
            MubVerifyOptions opt;
            if (*dim_opt) opt.dim = dim;
            if (*input_opt) opt.input = input;
            return cmd_mub_verify(cfg, opt, std::cerr);
        }
        if (*width) return cmd_width(width_sub, cfg, std::cerr);
        if (*qaoa) return cmd_qaoa_bench(cfg, std::cerr);
        if (*qrao) return cmd_qrao_bench(cfg, std::cerr);
        if (*report) return cmd_report(results_dir.empty() ? cfg.out : results_dir, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidDimension& e) {
        std::cerr << "range error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
