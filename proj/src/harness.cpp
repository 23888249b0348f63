#include "mublab/harness.hpp"

#include "mublab/mub.hpp"
#include "mublab/report.hpp"
#include "mublab/width.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <cmath>
#include <functional>

namespace mublab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kCompareStream = 0xC0FFEE01ULL;
constexpr std::uint64_t kDominanceStream = 0xC0FFEE02ULL;
constexpr std::uint64_t kOctahedronStream = 0xC0FFEE03ULL;
constexpr std::uint64_t kRadialStream = 0xC0FFEE04ULL;
constexpr std::uint64_t kGapStream = 0xC0FFEE05ULL;
constexpr std::uint64_t kCollapseStream = 0xC0FFEE06ULL;

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

fs::path prepare_out(const ExperimentConfig& cfg) {
    fs::path out(cfg.out);
    fs::create_directories(out);
    return out;
}

class Manifest {
public:
    Manifest(std::string command, const ExperimentConfig& cfg) : t0_(std::chrono::steady_clock::now()) {
        j_["artifact_version"] = kArtifactVersion;
        j_["command"] = std::move(command);
        j_["config_hash"] = cfg.hash();
        j_["config"] = cfg.to_json();
        j_["master_seed"] = cfg.seed;
        j_["started_at"] = utc_now();
        j_["outputs"] = json::array();
    }
    json& operator[](const char* key) { return j_[key]; }
    void output(const std::string& file) { j_["outputs"].push_back(file); }
    void finish(const fs::path& dir, const std::string& name) {
        j_["finished_at"] = utc_now();
        j_["elapsed_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
        write_json(dir / name, j_);
    }

private:
    std::chrono::steady_clock::time_point t0_;
    json j_;
};

Ensemble mub_ensemble(int d) { return Ensemble::from_mub(build_complete_mub(d)); }

// ---------------------------------------------------------------- width

int width_compare(const ExperimentConfig& cfg, const fs::path& out, Manifest& man, std::ostream& log) {
    const auto& w = cfg.width;
    json report{{"dims", json::array()}};
    CsvTable csv;
    csv.header = {"d", "union", "width", "width_stderr", "mub_width", "mub_stderr", "diff", "diff_stderr", "violation"};
    bool pass = true;
    const SeededRng root(cfg.seed, kCompareStream);
    for (int d : w.dims) {
        const Ensemble mub = mub_ensemble(d);
        SeededRng union_rng = root.split(static_cast<std::uint64_t>(d));
        std::vector<Ensemble> unions;
        for (int u = 0; u < w.unions; ++u) {
            unions.push_back(Ensemble::from_union(random_basis_union(d, union_rng), "haar_union_" + std::to_string(u)));
        }
        const auto cmp = compare_widths(mub, unions, w.samples, root.split(1000 + d), cfg.workers, w.sigmas);
        const auto blocks =
            simplex_blocks(BasisUnion::from_mub(build_complete_mub(d)), w.samples, root.split(2000 + d), cfg.workers);
        const bool blocks_ok = blocks.independent_blocks(w.sigmas);
        for (std::size_t u = 0; u < unions.size(); ++u) {
            csv.rows.push_back({std::to_string(d), std::to_string(u), format_double(cmp.others[u].estimate.mean),
                                format_double(cmp.others[u].estimate.std_error),
                                format_double(cmp.reference.estimate.mean),
                                format_double(cmp.reference.estimate.std_error),
                                format_double(cmp.differences[u].mean), format_double(cmp.differences[u].std_error),
                                cmp.violation[u] ? "1" : "0"});
        }
        json dj{{"d", d},
                {"mub_width", to_json(cmp.reference.estimate)},
                {"n_unions", unions.size()},
                {"n_violations", cmp.n_violations()},
                {"max_diff_sigmas", 0.0},
                {"mub_blocks", to_json(blocks)},
                {"mub_blocks_independent", blocks_ok}};
        double worst = -1e300;
        for (const auto& diff : cmp.differences) worst = std::max(worst, diff.mean / std::max(diff.std_error, 1e-300));
        dj["max_diff_sigmas"] = worst;
        report["dims"].push_back(dj);
        log << "width compare d=" << d << ": W(MUB)=" << cmp.reference.estimate.mean << " violations "
            << cmp.n_violations() << "/" << unions.size() << ", blocks " << (blocks_ok ? "independent" : "CORRELATED")
            << '\n';
        pass = pass && cmp.n_violations() == 0 && blocks_ok;
    }
    report["pass"] = pass;
    write_json(out / "width_compare.json", report);
    write_csv((out / "width_compare.csv").string(), csv);
    man.output("width_compare.json");
    man.output("width_compare.csv");
    return pass ? 0 : 1;
}

int width_dominance(const ExperimentConfig& cfg, const fs::path& out, Manifest& man, std::ostream& log) {
    const auto& w = cfg.width;
    const auto grid = default_cdf_grid(w.cdf_t_max, w.cdf_step);
    json report{{"dims", json::array()}};
    CsvTable csv;
    csv.header = {"d", "ensemble", "t", "prob", "stderr"};
    bool pass = true;
    const SeededRng root(cfg.seed, kDominanceStream);
    for (int d : w.dims) {
        std::vector<Ensemble> ens{mub_ensemble(d)};
        SeededRng union_rng = root.split(static_cast<std::uint64_t>(d));
        for (int u = 0; u < w.dominance_unions; ++u) {
            ens.push_back(Ensemble::from_union(random_basis_union(d, union_rng), "haar_union_" + std::to_string(u)));
        }
        const auto curves = max_cdfs(ens, grid, w.samples, root.split(1000 + d), cfg.workers);
        int failures = 0;
        json checks = json::array();
        for (std::size_t k = 1; k < curves.size(); ++k) {
            const auto rep = dominance_check(curves[k], curves[0], w.sigmas);
            failures += !rep.pass();
            checks.push_back(to_json(rep));
        }
        for (std::size_t k = 0; k < curves.size(); ++k) {
            const std::string name = k == 0 ? "mub" : "union_" + std::to_string(k - 1);
            for (std::size_t g = 0; g < grid.size(); ++g) {
                csv.rows.push_back({std::to_string(d), name, format_double(grid[g]), format_double(curves[k].probs[g]),
                                    format_double(curves[k].std_errors[g])});
            }
        }
        report["dims"].push_back({{"d", d}, {"n_unions", w.dominance_unions}, {"failures", failures}, {"checks", checks}});
        log << "width dominance d=" << d << ": " << failures << " failing unions of " << w.dominance_unions << '\n';
        pass = pass && failures == 0;
    }
    report["pass"] = pass;
    write_json(out / "width_dominance.json", report);
    write_csv((out / "width_dominance_cdf.csv").string(), csv);
    man.output("width_dominance.json");
    man.output("width_dominance_cdf.csv");
    return pass ? 0 : 1;
}

int width_octahedron(const ExperimentConfig& cfg, const fs::path& out, Manifest& man, std::ostream& log) {
    const auto& w = cfg.width;
    const auto rep = octahedron_trial(static_cast<std::size_t>(w.octahedron_ensembles), w.samples,
                                      SeededRng(cfg.seed, kOctahedronStream), cfg.workers);
    CsvTable csv;
    csv.header = {"ensemble", "width", "width_stderr", "diff", "diff_stderr"};
    for (std::size_t k = 0; k < rep.ensemble_widths.size(); ++k) {
        csv.rows.push_back({std::to_string(k), format_double(rep.ensemble_widths[k].mean),
                            format_double(rep.ensemble_widths[k].std_error), format_double(rep.differences[k].mean),
                            format_double(rep.differences[k].std_error)});
    }
    json report = to_json(rep);
    report["pass"] = rep.pass();
    write_json(out / "width_octahedron.json", report);
    write_csv((out / "width_octahedron.csv").string(), csv);
    man.output("width_octahedron.json");
    man.output("width_octahedron.csv");
    log << "width octahedron: W(MUB)=" << rep.mub_width.estimate.mean << " violations " << rep.n_violations << "/"
        << rep.ensemble_widths.size() << '\n';
    return rep.pass() ? 0 : 1;
}

int width_radial(const ExperimentConfig& cfg, const fs::path& out, Manifest& man, std::ostream& log) {
    const auto& w = cfg.width;
    const SeededRng root(cfg.seed, kRadialStream);
    SeededRng union_rng = root.split(7);
    const std::vector<Ensemble> ensembles{mub_ensemble(2),
                                          Ensemble::from_union(random_basis_union(3, union_rng), "haar_union_d3")};
    const std::vector<RadialSpec> laws{RadialSpec::half_normal(), RadialSpec::uniform01(), RadialSpec::constant(2.0)};
    json report{{"cases", json::array()}};
    bool pass = true;
    std::uint64_t k = 0;
    for (const auto& ens : ensembles) {
        for (const auto& law : laws) {
            const auto r = radial_width(ens, law, w.samples, root.split(100 + k++), cfg.workers);
            json c = to_json(r);
            c["ensemble"] = ens.descriptor;
            report["cases"].push_back(c);
            log << "width radial " << ens.descriptor << " R~" << law.name() << ": lhs " << r.lhs.mean << " rhs "
                << r.rhs.mean << (r.pass ? " ok" : " FAIL") << '\n';
            pass = pass && r.pass;
        }
    }
    report["pass"] = pass;
    write_json(out / "width_radial.json", report);
    man.output("width_radial.json");
    return pass ? 0 : 1;
}

int width_gap(const ExperimentConfig& cfg, const fs::path& out, Manifest& man, std::ostream& log) {
    const auto& w = cfg.width;
    for (int n : w.gap_qubits) {
        if (n < 1 || n > 4) throw InvalidDimension("width gap: qubit counts must lie in [1, 4], got " + std::to_string(n));
    }
    const SeededRng root(cfg.seed, kGapStream);
    json report{{"points", json::array()}};
    CsvTable csv;
    csv.header = {"n_qubits", "d", "n_points", "m_n", "m_n_stderr", "w_block", "w_block_stderr", "w_dense",
                  "w_dense_stderr", "gap", "gap_stderr", "reference"};
    bool positive = true, samplers_agree = true, decreasing = true;
    double prev_gap = 0.0;
    bool first = true;
    for (int n : w.gap_qubits) {
        const auto g = asymptotic_gap(n, w.samples, root.split(static_cast<std::uint64_t>(n)), cfg.workers);
        const auto dense = estimate_width(Ensemble::from_mub(build_qubit_mub(n)), w.samples,
                                          root.split(100 + static_cast<std::uint64_t>(n)), cfg.workers);
        const double joint = std::hypot(g.w_m_hat.std_error, dense.estimate.std_error);
        const bool agree = std::abs(g.w_m_hat.mean - dense.estimate.mean) <= w.sigmas * joint;
        const bool pos = g.gap.mean > w.sigmas * g.gap.std_error;
        if (!first && !(g.gap.mean < prev_gap)) decreasing = false;
        first = false;
        prev_gap = g.gap.mean;
        positive = positive && pos;
        samplers_agree = samplers_agree && agree;
        json pj = to_json(g);
        pj["w_dense"] = to_json(dense.estimate);
        pj["samplers_agree"] = agree;
        pj["gap_positive"] = pos;
        report["points"].push_back(pj);
        csv.rows.push_back({std::to_string(n), std::to_string(g.d), std::to_string(g.n_points),
                            format_double(g.m_n_hat.mean), format_double(g.m_n_hat.std_error),
                            format_double(g.w_m_hat.mean), format_double(g.w_m_hat.std_error),
                            format_double(dense.estimate.mean), format_double(dense.estimate.std_error),
                            format_double(g.gap.mean), format_double(g.gap.std_error), format_double(g.reference)});
        log << "width gap n=" << n << ": gap " << g.gap.mean << " +- " << g.gap.std_error << ", reference "
            << g.reference << '\n';
    }
    const bool pass = positive && samplers_agree && decreasing;
    report["gap_positive"] = positive;
    report["samplers_agree"] = samplers_agree;
    report["strictly_decreasing"] = decreasing;
    report["pass"] = pass;
    write_json(out / "width_gap.json", report);
    write_csv((out / "width_gap.csv").string(), csv);
    man.output("width_gap.json");
    man.output("width_gap.csv");
    return pass ? 0 : 1;
}

// ---------------------------------------------------------------- benches

// Loads finished rows of an interrupted run. Rows from another config are
// refused rather than mixed.
CsvTable load_partial(const fs::path& path, const std::vector<std::string>& columns, const std::string& hash,
                      std::ostream& log) {
    CsvTable t;
    t.header = columns;
    if (!fs::exists(path)) return t;
    CsvTable old = read_csv(path.string());
    if (old.header != columns) throw SchemaError(path.string() + ": unexpected header; use a fresh --out directory");
    const std::size_t hc = old.col("config_hash");
    for (auto& row : old.rows) {
        if (row[hc] != hash) {
            throw SchemaError(path.string() + " holds rows of config " + row[hc] + ", current config is " + hash +
                              "; use a fresh --out directory");
        }
        t.rows.push_back(std::move(row));
    }
    if (!t.rows.empty()) log << "resuming: " << t.rows.size() << " finished rows in " << path.string() << '\n';
    return t;
}

class RowWriter {
public:
    RowWriter(const fs::path& path, const CsvTable& existing) : path_(path) {
        write_csv(path.string(), existing);
        out_.open(path, std::ios::app);
        if (!out_) throw Error("cannot append to '" + path.string() + "'");
    }
    void append(const std::vector<std::string>& row) {
        std::lock_guard<std::mutex> lock(mu_);
        for (std::size_t i = 0; i < row.size(); ++i) out_ << (i ? "," : "") << row[i];
        out_ << '\n';
        out_.flush();
    }

private:
    fs::path path_;
    std::ofstream out_;
    std::mutex mu_;
};

// Rewrites the CSV with rows in task order.
void sort_rows(const fs::path& path, const std::map<std::string, std::size_t>& order,
               const std::function<std::string(const std::vector<std::string>&, const CsvTable&)>& key) {
    CsvTable t = read_csv(path.string());
    std::stable_sort(t.rows.begin(), t.rows.end(), [&](const auto& a, const auto& b) {
        return order.at(key(a, t)) < order.at(key(b, t));
    });
    write_csv(path.string(), t);
}

struct QaoaTask {
    ProblemFamily family;
    int n;
    int p;
    int seed_index;
    std::string method;
    std::string key() const {
        return to_string(family) + "|" + std::to_string(n) + "|" + std::to_string(p) + "|" + std::to_string(seed_index) +
               "|" + method;
    }
};

struct QraoTask {
    int n;
    int p;
    int seed_index;
    Strategy strategy;
};

}  // namespace

std::uint64_t instance_seed(std::uint64_t master, int seed_index) { return master + static_cast<std::uint64_t>(seed_index); }

std::uint64_t method_seed(std::uint64_t inst, int n, int p) {
    return splitmix64(inst ^ splitmix64(static_cast<std::uint64_t>(n) * 16 + static_cast<std::uint64_t>(p)));
}

int cmd_mub_verify(const ExperimentConfig& cfg, const MubVerifyOptions& opt, std::ostream& log) {
    const fs::path out = prepare_out(cfg);
    Manifest man("mub-verify", cfg);
    json report{{"systems", json::array()}, {"collapse", json::array()}};
    bool pass = true;
    auto check = [&](const MubSystem& sys) {
        const auto rep = verify_unbiasedness(sys, cfg.mub.tolerance);
        report["systems"].push_back({{"d", sys.d},
                                     {"construction", to_string(sys.construction_tag)},
                                     {"n_bases", sys.bases.size()},
                                     {"max_overlap_deviation", rep.max_overlap_deviation},
                                     {"max_orthonormality_deviation", rep.max_orthonormality_deviation},
                                     {"pass", rep.pass}});
        log << "mub d=" << sys.d << " (" << to_string(sys.construction_tag) << "): overlap dev "
            << rep.max_overlap_deviation << (rep.pass ? " ok" : " FAIL") << '\n';
        pass = pass && rep.pass;
    };

    try {
        if (opt.input) {
            std::ifstream in(*opt.input);
            if (!in) throw Error("cannot open '" + *opt.input + "'");
            json j;
            in >> j;
            check(mub_from_json(j));
        } else if (opt.dim) {
            check(build_complete_mub(*opt.dim));
        } else {
            for (int d : cfg.mub.primes) check(build_prime_mub(d));
            for (int n = 1; n <= cfg.mub.n_max; ++n) check(build_qubit_mub(n));
            SeededRng rng(cfg.seed, kCollapseStream);
            for (int n = 1; n <= cfg.mub.n_max; ++n) {
                std::vector<std::uint32_t> rs(std::size_t{1} << n);
                for (std::uint32_t r = 0; r < rs.size(); ++r) rs[r] = r;
                double worst = 0.0;
                bool ok = true;
                for (int c = 0; c < cfg.mub.collapse_costs; ++c) {
                    std::vector<double> v(std::size_t{1} << n);
                    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
                    const auto rep = verify_diagonal_collapse(n, DiagonalCost(n, v), rs);
                    worst = std::max({worst, rep.max_rotation_deviation, rep.max_diagonal_deviation});
                    ok = ok && rep.pass;
                }
                report["collapse"].push_back({{"n", n}, {"costs", cfg.mub.collapse_costs}, {"max_deviation", worst}, {"pass", ok}});
                log << "diagonal collapse n=" << n << ": max deviation " << worst << (ok ? " ok" : " FAIL") << '\n';
                pass = pass && ok;
            }
        }
    } catch (const UnsupportedDimension& e) {
        report["error"] = e.what();
        report["pass"] = false;
        write_json(out / "mub_verify.json", report);
        log << "unsupported: " << e.what() << '\n';
        return 2;
    }
    report["pass"] = pass;
    write_json(out / "mub_verify.json", report);
    man.output("mub_verify.json");
    man.finish(out, "manifest_mub_verify.json");
    return pass ? 0 : 1;
}

int cmd_width(const std::string& sub, const ExperimentConfig& cfg, std::ostream& log) {
    const fs::path out = prepare_out(cfg);
    Manifest man("width " + sub, cfg);
    man["workers"] = resolve_workers(cfg.workers);
    int code;
    if (sub == "compare") code = width_compare(cfg, out, man, log);
    else if (sub == "dominance") code = width_dominance(cfg, out, man, log);
    else if (sub == "octahedron") code = width_octahedron(cfg, out, man, log);
    else if (sub == "radial") code = width_radial(cfg, out, man, log);
    else if (sub == "gap") code = width_gap(cfg, out, man, log);
    else throw Error("unknown width subcommand '" + sub + "'");
    man["exit_code"] = code;
    man.finish(out, "manifest_width_" + sub + ".json");
    return code;
}

int cmd_qaoa_bench(const ExperimentConfig& cfg, std::ostream& log) {
    const fs::path out = prepare_out(cfg);
    const std::string hash = cfg.hash();
    Manifest man("qaoa-bench", cfg);

    std::vector<QaoaTask> tasks;
    for (const auto& fam : cfg.qaoa.families) {
        for (int n : cfg.qaoa.sizes) {
            for (int p : cfg.qaoa.depths) {
                for (int s = 0; s < cfg.qaoa.seeds; ++s) {
                    for (const char* m : {"standard", "adaptive_mub_xrot"}) {
                        tasks.push_back({family_from_string(fam), n, p, s, m});
                    }
                }
            }
        }
    }
    std::map<std::string, std::size_t> order;
    json task_list = json::array();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& t = tasks[i];
        order[t.key()] = i;
        const auto inst = instance_seed(cfg.seed, t.seed_index);
        task_list.push_back({{"family", to_string(t.family)}, {"n", t.n}, {"p", t.p}, {"method", t.method},
                             {"instance_seed", inst}, {"method_seed", method_seed(inst, t.n, t.p)}});
    }
    man["tasks"] = task_list;

    const fs::path csv_path = out / "qaoa_results.csv";
    auto row_key = [&](const std::vector<std::string>& row, const CsvTable& t) {
        const auto inst = std::stoull(row[t.col("instance_seed")]);
        return row[t.col("family")] + "|" + row[t.col("n")] + "|" + row[t.col("p")] + "|" +
               std::to_string(inst - cfg.seed) + "|" + row[t.col("method")];
    };
    CsvTable existing = load_partial(csv_path, kQaoaColumns, hash, log);
    std::set<std::string> done;
    for (const auto& row : existing.rows) done.insert(row_key(row, existing));
    std::vector<const QaoaTask*> pending;
    for (const auto& t : tasks) {
        if (!done.count(t.key())) pending.push_back(&t);
    }
    man["resumed_rows"] = existing.rows.size();

    RowWriter writer(csv_path, existing);
    std::mutex log_mu;
    parallel_for(pending.size(), cfg.workers, [&](std::size_t i) {
        const QaoaTask& t = *pending[i];
        const auto inst = instance_seed(cfg.seed, t.seed_index);
        const EncodedProblem prob = make_benchmark_problem(t.family, t.n, inst);
        const auto ms = method_seed(inst, t.n, t.p);
        MethodRecord rec = t.method == "standard" ? run_standard(prob, t.p, ms, cfg.qaoa.settings)
                                                  : run_adaptive_mub_xrot(prob, t.p, ms, cfg.qaoa.settings);
        rec.instance_seed = inst;
        writer.append(qaoa_csv_row(rec, hash));
        std::lock_guard<std::mutex> lock(log_mu);
        log << "qaoa " << t.key() << " decoded " << rec.metrics.decoded_ratio << '\n';
    });
    sort_rows(csv_path, order, row_key);
    man.output("qaoa_results.csv");

    std::string seen;
    const auto records = qaoa_records_from_csv(read_csv(csv_path.string()), &seen);
    const auto summary =
        qaoa_summary(records, hash, {cfg.qaoa.bootstrap_level, cfg.qaoa.bootstrap_resamples});
    write_json(out / "qaoa_summary.json", summary);
    write_csv((out / "plot_qaoa_facets.csv").string(), qaoa_facets(records));
    man.output("qaoa_summary.json");
    man.output("plot_qaoa_facets.csv");
    man.finish(out, "manifest_qaoa.json");
    if (summary.contains("mis_direction_check") && summary["mis_direction_check"]["red_flag"].get<bool>()) {
        log << "note: MIS mean delta does not clear 0 at the configured confidence (red flag, not a failure)\n";
    }
    return 0;
}

int cmd_qrao_bench(const ExperimentConfig& cfg, std::ostream& log) {
    const fs::path out = prepare_out(cfg);
    const std::string hash = cfg.hash();
    Manifest man("qrao-bench", cfg);

    std::vector<Strategy> strategies = headline_strategies();
    if (cfg.qrao.exhaustive) {
        strategies.push_back(Strategy::exhaustive_oracle);
        strategies.push_back(Strategy::z_variational);
    }
    std::vector<QraoTask> tasks;
    for (int n : cfg.qrao.sizes) {
        for (int p : cfg.qrao.depths) {
            for (int s = 0; s < cfg.qrao.seeds; ++s) {
                for (auto st : strategies) tasks.push_back({n, p, s, st});
            }
        }
    }
    auto key_of = [](int n, int p, std::uint64_t inst, const std::string& st) {
        return std::to_string(n) + "|" + std::to_string(p) + "|" + std::to_string(inst) + "|" + st;
    };
    std::map<std::string, std::size_t> order;
    json task_list = json::array();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& t = tasks[i];
        const auto inst = instance_seed(cfg.seed, t.seed_index);
        order[key_of(t.n, t.p, inst, to_string(t.strategy))] = i;
        task_list.push_back({{"n", t.n}, {"p", t.p}, {"strategy", to_string(t.strategy)}, {"graph_seed", inst},
                             {"method_seed", method_seed(inst, t.n, t.p)}});
    }
    man["tasks"] = task_list;

    const fs::path csv_path = out / "qrao_results.csv";
    auto row_key = [&](const std::vector<std::string>& row, const CsvTable& t) {
        return key_of(std::stoi(row[t.col("n")]), std::stoi(row[t.col("p")]), std::stoull(row[t.col("graph_seed")]),
                      row[t.col("strategy")]);
    };
    CsvTable existing = load_partial(csv_path, kQraoColumns, hash, log);
    std::set<std::string> done;
    for (const auto& row : existing.rows) done.insert(row_key(row, existing));
    std::vector<const QraoTask*> pending;
    for (const auto& t : tasks) {
        if (!done.count(key_of(t.n, t.p, instance_seed(cfg.seed, t.seed_index), to_string(t.strategy)))) {
            pending.push_back(&t);
        }
    }
    man["resumed_rows"] = existing.rows.size();

    RowWriter writer(csv_path, existing);
    std::mutex log_mu;
    parallel_for(pending.size(), cfg.workers, [&](std::size_t i) {
        const QraoTask& t = *pending[i];
        const auto inst = instance_seed(cfg.seed, t.seed_index);
        const auto g = gen_er_graph(t.n, cfg.qrao.edge_prob, inst, false);
        const auto relaxed = relaxed_hamiltonian(g, encode_31(g));
        const auto rec = run_strategy(relaxed, t.strategy, t.p, method_seed(inst, t.n, t.p), cfg.qrao.settings);
        writer.append(qrao_csv_row(rec, hash));
        std::lock_guard<std::mutex> lock(log_mu);
        log << "qrao n=" << t.n << " p=" << t.p << " seed=" << inst << " " << to_string(t.strategy) << " alpha_r "
            << rec.alpha_r << " evals " << rec.family_evals << '\n';
    });
    sort_rows(csv_path, order, row_key);
    man.output("qrao_results.csv");

    const auto records = qrao_records_from_csv(read_csv(csv_path.string()));
    write_json(out / "qrao_summary.json", qrao_summary(records, hash));
    write_csv((out / "plot_qrao_facets.csv").string(), qrao_facets(records));
    man.output("qrao_summary.json");
    man.output("plot_qrao_facets.csv");
    man.finish(out, "manifest_qrao.json");
    return 0;
}

int cmd_report(const std::string& results_dir, std::ostream& log) {
    const fs::path dir(results_dir);
    const fs::path qaoa_csv = dir / "qaoa_results.csv";
    const fs::path qrao_csv = dir / "qrao_results.csv";
    bool any = false;
    if (fs::exists(qaoa_csv)) {
        std::string hash;
        const auto records = qaoa_records_from_csv(read_csv(qaoa_csv.string()), &hash);
        write_json(dir / "report_qaoa.json", qaoa_summary(records, hash));
        write_csv((dir / "plot_qaoa_facets.csv").string(), qaoa_facets(records));
        log << "report: " << records.size() << " QAOA rows\n";
        any = true;
    }
    if (fs::exists(qrao_csv)) {
        std::string hash;
        const auto records = qrao_records_from_csv(read_csv(qrao_csv.string()), &hash);
        write_json(dir / "report_qrao.json", qrao_summary(records, hash));
        write_csv((dir / "plot_qrao_facets.csv").string(), qrao_facets(records));
        log << "report: " << records.size() << " QRAO rows\n";
        any = true;
    }
    if (!any) throw SchemaError("no qaoa_results.csv or qrao_results.csv in '" + results_dir + "'");
    return 0;
}

}  // namespace mublab
