#include "mublab/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace mublab {

namespace {

constexpr std::uint64_t kBootstrapStream = 0xB0075742ULL;

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_d(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("bad numeric value '" + s + "' in column " + what);
    }
}

long long to_i(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("bad integer value '" + s + "' in column " + what);
    }
}

std::uint64_t to_u(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("bad integer value '" + s + "' in column " + what);
    }
}

void check_hash(const std::string& h, std::string& seen) {
    if (seen.empty()) seen = h;
    else if (h != seen) throw SchemaError("result rows mix config hashes " + seen + " and " + h);
}

std::uint64_t hash_seed(const std::string& config_hash) {
    try {
        return std::stoull(config_hash, nullptr, 16);
    } catch (const std::exception&) {
        return 0;
    }
}

}  // namespace

const std::vector<std::string> kQaoaColumns{"family", "instance_seed", "n", "p", "method", "decoded_ratio",
                                            "postselected_ratio", "energy", "runtime_s", "n_cost_evals",
                                            "final_family_r", "config_hash"};
const std::vector<std::string> kQraoColumns{"graph_seed", "n", "p", "strategy", "alpha_r", "alpha_c",
                                            "family_evals", "chosen_r", "chosen_b0", "runtime_s", "config_hash"};

std::size_t CsvTable::col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw SchemaError("missing column '" + name + "'");
}

void CsvTable::require(const std::vector<std::string>& columns) const {
    std::string missing;
    for (const auto& c : columns) {
        bool found = false;
        for (const auto& h : header) found = found || h == c;
        if (!found) missing += " " + c;
    }
    if (!missing.empty()) throw SchemaError("missing columns:" + missing);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("'" + path + "' is empty");
    t.header = split(line);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto row = split(line);
        if (row.size() != t.header.size()) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                              " fields, got " + std::to_string(row.size()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    };
    emit(table.header);
    for (const auto& r : table.rows) emit(r);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> qaoa_csv_row(const MethodRecord& r, const std::string& config_hash) {
    char rt[32];
    std::snprintf(rt, sizeof rt, "%.6f", r.runtime_seconds);
    return {to_string(r.family),
            std::to_string(r.instance_seed),
            std::to_string(r.n),
            std::to_string(r.p),
            r.method,
            format_double(r.metrics.decoded_ratio),
            format_double(r.metrics.postselected_ratio),
            format_double(r.metrics.energy),
            rt,
            std::to_string(r.n_cost_evals),
            std::to_string(r.final_family_r),
            config_hash};
}

std::vector<std::string> qrao_csv_row(const StrategyRecord& r, const std::string& config_hash) {
    char rt[32];
    std::snprintf(rt, sizeof rt, "%.6f", r.runtime_seconds);
    return {std::to_string(r.graph_seed),
            std::to_string(r.n),
            std::to_string(r.p),
            to_string(r.strategy),
            format_double(r.alpha_r),
            format_double(r.alpha_c),
            std::to_string(r.family_evals),
            std::to_string(r.chosen_r),
            std::to_string(r.chosen_b0),
            rt,
            config_hash};
}

std::vector<MethodRecord> qaoa_records_from_csv(const CsvTable& t, std::string* config_hash) {
    t.require(kQaoaColumns);
    std::string seen;
    std::vector<MethodRecord> out;
    for (const auto& row : t.rows) {
        auto at = [&](const char* c) -> const std::string& { return row[t.col(c)]; };
        MethodRecord r;
        r.family = family_from_string(at("family"));
        r.instance_seed = to_u(at("instance_seed"), "instance_seed");
        r.n = static_cast<int>(to_i(at("n"), "n"));
        r.p = static_cast<int>(to_i(at("p"), "p"));
        r.method = at("method");
        r.metrics.decoded_ratio = to_d(at("decoded_ratio"), "decoded_ratio");
        r.metrics.postselected_ratio = to_d(at("postselected_ratio"), "postselected_ratio");
        r.metrics.energy = to_d(at("energy"), "energy");
        r.runtime_seconds = to_d(at("runtime_s"), "runtime_s");
        r.n_cost_evals = static_cast<long>(to_i(at("n_cost_evals"), "n_cost_evals"));
        r.final_family_r = static_cast<long>(to_i(at("final_family_r"), "final_family_r"));
        check_hash(at("config_hash"), seen);
        out.push_back(std::move(r));
    }
    if (config_hash) *config_hash = seen;
    return out;
}

std::vector<StrategyRecord> qrao_records_from_csv(const CsvTable& t, std::string* config_hash) {
    t.require(kQraoColumns);
    std::string seen;
    std::vector<StrategyRecord> out;
    for (const auto& row : t.rows) {
        auto at = [&](const char* c) -> const std::string& { return row[t.col(c)]; };
        StrategyRecord r;
        r.graph_seed = to_u(at("graph_seed"), "graph_seed");
        r.n = static_cast<int>(to_i(at("n"), "n"));
        r.p = static_cast<int>(to_i(at("p"), "p"));
        r.strategy = strategy_from_string(at("strategy"));
        r.alpha_r = to_d(at("alpha_r"), "alpha_r");
        r.alpha_c = to_d(at("alpha_c"), "alpha_c");
        r.family_evals = static_cast<int>(to_i(at("family_evals"), "family_evals"));
        r.chosen_r = static_cast<long>(to_i(at("chosen_r"), "chosen_r"));
        r.chosen_b0 = static_cast<long>(to_i(at("chosen_b0"), "chosen_b0"));
        r.runtime_seconds = to_d(at("runtime_s"), "runtime_s");
        check_hash(at("config_hash"), seen);
        out.push_back(r);
    }
    if (config_hash) *config_hash = seen;
    return out;
}

nlohmann::json qaoa_summary(const std::vector<MethodRecord>& records, const std::string& config_hash,
                            const QaoaSummaryOptions& opt) {
    std::vector<MethodRecord> std_recs, adp_recs;
    for (const auto& r : records) {
        if (r.method == "standard") std_recs.push_back(r);
        else if (r.method == "adaptive_mub_xrot") adp_recs.push_back(r);
        else throw SchemaError("unknown method '" + r.method + "'");
    }
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["tie_band"] = kTieBand;
    j["overall"] = to_json(paired_stats(std_recs, adp_recs));

    std::map<std::string, std::pair<std::vector<MethodRecord>, std::vector<MethodRecord>>> by_family;
    for (const auto& r : std_recs) by_family[to_string(r.family)].first.push_back(r);
    for (const auto& r : adp_recs) by_family[to_string(r.family)].second.push_back(r);
    j["by_family"] = nlohmann::json::object();
    SeededRng rng(hash_seed(config_hash), kBootstrapStream);
    std::uint64_t family_index = 0;
    for (const auto& [fam, recs] : by_family) {
        const auto pc = paired_stats(recs.first, recs.second);
        auto fj = to_json(pc);
        if (!pc.deltas.empty()) {
            SeededRng frng = rng.split(family_index);
            const auto ci = bootstrap_mean_ci(pc.deltas, opt.bootstrap_level, opt.bootstrap_resamples, frng);
            fj["mean_delta_ci"] = {{"level", ci.level}, {"lower", ci.lower}, {"upper", ci.upper}};
        }
        j["by_family"][fam] = fj;
        ++family_index;
    }
    if (j["by_family"].contains("mis")) {
        const auto& m = j["by_family"]["mis"];
        const double mean = m["mean_delta"].get<double>();
        const double lower = m["mean_delta_ci"]["lower"].get<double>();
        j["mis_direction_check"] = {{"mean_delta", mean},
                                    {"ci_level", opt.bootstrap_level},
                                    {"ci_lower", lower},
                                    {"ci_upper", m["mean_delta_ci"]["upper"].get<double>()},
                                    {"mean_nonnegative", mean >= 0.0},
                                    {"red_flag", !(lower > 0.0)}};
    }
    return j;
}

nlohmann::json qrao_summary(const std::vector<StrategyRecord>& records, const std::string& config_hash) {
    nlohmann::json j;
    j["config_hash"] = config_hash;
    j["tie_band"] = kTieBand;
    j["solved_rule"] = "alpha_c >= 1 - 1e-9";
    std::set<std::tuple<std::uint64_t, int, int>> cells;
    for (const auto& r : records) cells.insert({r.graph_seed, r.n, r.p});
    j["paired_cells"] = cells.size();
    j["strategies"] = nlohmann::json::array();
    for (const auto& s : summarize_strategies(records)) j["strategies"].push_back(to_json(s));

    std::map<std::pair<int, int>, std::vector<StrategyRecord>> slices;
    for (const auto& r : records) slices[{r.n, r.p}].push_back(r);
    j["by_size_depth"] = nlohmann::json::array();
    for (const auto& [key, recs] : slices) {
        nlohmann::json sj{{"n", key.first}, {"p", key.second}, {"strategies", nlohmann::json::array()}};
        for (const auto& s : summarize_strategies(recs)) sj["strategies"].push_back(to_json(s));
        j["by_size_depth"].push_back(sj);
    }
    // Mean family evaluations per size, the search-cost accounting.
    std::map<int, std::map<std::string, std::pair<double, int>>> evals;
    for (const auto& r : records) {
        if (!is_mub_strategy(r.strategy)) continue;
        auto& e = evals[r.n][to_string(r.strategy)];
        e.first += r.family_evals;
        ++e.second;
    }
    j["family_evals_by_size"] = nlohmann::json::object();
    for (const auto& [n, m] : evals) {
        for (const auto& [s, e] : m) j["family_evals_by_size"][std::to_string(n)][s] = e.first / e.second;
    }
    return j;
}

CsvTable qaoa_facets(const std::vector<MethodRecord>& records) {
    CsvTable t;
    t.header = {"family", "n", "p", "method", "cases", "mean_decoded_ratio", "mean_postselected_ratio", "solved_rate"};
    struct Acc {
        int count = 0;
        double decoded = 0.0, post = 0.0;
        int solved = 0;
    };
    std::map<std::tuple<std::string, int, int, std::string>, Acc> acc;
    for (const auto& r : records) {
        auto& a = acc[{to_string(r.family), r.n, r.p, r.method}];
        ++a.count;
        a.decoded += r.metrics.decoded_ratio;
        a.post += r.metrics.postselected_ratio;
        a.solved += is_solved(r.metrics.decoded_ratio);
    }
    for (const auto& [k, a] : acc) {
        t.rows.push_back({std::get<0>(k), std::to_string(std::get<1>(k)), std::to_string(std::get<2>(k)),
                          std::get<3>(k), std::to_string(a.count), format_double(a.decoded / a.count),
                          format_double(a.post / a.count), format_double(static_cast<double>(a.solved) / a.count)});
    }
    return t;
}

CsvTable qrao_facets(const std::vector<StrategyRecord>& records) {
    CsvTable t;
    t.header = {"n", "p", "strategy", "cells", "mean_alpha_r", "mean_alpha_c", "solved_rate", "mean_family_evals"};
    struct Acc {
        int count = 0;
        double ar = 0.0, ac = 0.0, evals = 0.0;
        int solved = 0;
    };
    std::map<std::tuple<int, int, std::string>, Acc> acc;
    for (const auto& r : records) {
        auto& a = acc[{r.n, r.p, to_string(r.strategy)}];
        ++a.count;
        a.ar += r.alpha_r;
        a.ac += r.alpha_c;
        a.evals += r.family_evals;
        a.solved += is_solved(r.alpha_c);
    }
    for (const auto& [k, a] : acc) {
        t.rows.push_back({std::to_string(std::get<0>(k)), std::to_string(std::get<1>(k)), std::get<2>(k),
                          std::to_string(a.count), format_double(a.ar / a.count), format_double(a.ac / a.count),
                          format_double(static_cast<double>(a.solved) / a.count), format_double(a.evals / a.count)});
    }
    return t;
}

CsvTable mask_runtime(CsvTable t) {
    const std::size_t c = t.col("runtime_s");
    for (auto& row : t.rows) row[c] = "*";
    return t;
}

}  // namespace mublab
