#include "mublab/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mublab {

namespace {

using nlohmann::json;

// Each section maps key -> setter that throws on a type or range error.
using Setter = std::function<void(const json&)>;

template <class T>
Setter set(T& field) {
    return [&field](const json& v) { field = v.get<T>(); };
}

Setter set_positive(int& field) {
    return [&field](const json& v) {
        const int x = v.get<int>();
        if (x < 1) throw ConfigError("must be >= 1");
        field = x;
    };
}

Setter set_positive_real(double& field) {
    return [&field](const json& v) {
        if (!v.is_number()) throw ConfigError("must be a number");
        const double x = v.get<double>();
        if (!(x > 0.0)) throw ConfigError("must be > 0");
        field = x;
    };
}

Setter set_int_list(std::vector<int>& field, int lo, int hi) {
    return [&field, lo, hi](const json& v) {
        if (!v.is_array() || v.empty()) throw ConfigError("must be a non-empty array of integers");
        std::vector<int> out;
        for (const auto& e : v) {
            if (!e.is_number_integer()) throw ConfigError("must be a non-empty array of integers");
            const int x = e.get<int>();
            if (x < lo || x > hi) {
                throw ConfigError("entries must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            }
            out.push_back(x);
        }
        field = out;
    };
}

void apply_section(const json& j, const std::string& prefix, const std::map<std::string, Setter>& setters,
                   std::vector<std::string>& problems) {
    if (!j.is_object()) {
        problems.push_back(prefix + ": must be an object");
        return;
    }
    for (const auto& [key, value] : j.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        auto it = setters.find(key);
        if (it == setters.end()) {
            problems.push_back(path + ": unknown key");
            continue;
        }
        try {
            it->second(value);
        } catch (const json::exception&) {
            problems.push_back(path + ": wrong type");
        } catch (const ConfigError& e) {
            problems.push_back(path + ": " + e.what());
        }
    }
}

}  // namespace

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ExperimentConfig::apply_full() {
    full = true;
    qaoa.sizes = {8, 10, 12, 14};
    qaoa.depths = {1, 2, 3};
    qaoa.seeds = 25;
    qrao.sizes = {6, 8, 10, 12};
    qrao.depths = {1, 2, 3};
    qrao.seeds = 30;
}

void ExperimentConfig::apply_json(const json& j) {
    std::vector<std::string> problems;
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

    auto& qs = qaoa.settings;
    auto& rs = qrao.settings;
    const std::map<std::string, Setter> mub_keys{
        {"primes", set_int_list(mub.primes, 2, 31)},
        {"n_max", [this](const json& v) {
             const int x = v.get<int>();
             if (x < 1 || x > 4) throw ConfigError("must lie in [1, 4]");
             mub.n_max = x;
         }},
        {"tolerance", set_positive_real(mub.tolerance)},
        {"collapse_costs", set_positive(mub.collapse_costs)},
    };
    const std::map<std::string, Setter> width_keys{
        {"samples", [this](const json& v) {
             const auto x = v.get<std::int64_t>();
             if (x < 2) throw ConfigError("must be >= 2");
             width.samples = static_cast<std::size_t>(x);
         }},
        {"dims", set_int_list(width.dims, 2, 31)},
        {"unions", set_positive(width.unions)},
        {"dominance_unions", set_positive(width.dominance_unions)},
        {"octahedron_ensembles", set_positive(width.octahedron_ensembles)},
        {"gap_qubits", set_int_list(width.gap_qubits, 1, 16)},
        {"cdf_t_max", set_positive_real(width.cdf_t_max)},
        {"cdf_step", set_positive_real(width.cdf_step)},
        {"sigmas", set_positive_real(width.sigmas)},
    };
    const std::map<std::string, Setter> qaoa_keys{
        {"sizes", set_int_list(qaoa.sizes, 2, kMaxQaoaQubits)},
        {"depths", set_int_list(qaoa.depths, 1, 3)},
        {"seeds", set_positive(qaoa.seeds)},
        {"families", [this](const json& v) {
             auto f = v.get<std::vector<std::string>>();
             if (f.empty()) throw ConfigError("must be non-empty");
             for (const auto& s : f) family_from_string(s);
             qaoa.families = f;
         }},
        {"max_evals", set_positive(qs.max_evals)},
        {"fd_step", set_positive_real(qs.fd_step)},
        {"restarts", set_positive(qs.restarts)},
        {"init_angle_max", set_positive_real(qs.init_angle_max)},
        {"init_mu_max", set_positive_real(qs.init_mu_max)},
        {"screen_top_k", set_positive(qs.screen_top_k)},
        {"screen_evals", set_positive(qs.screen_evals)},
        {"max_rounds", set_positive(qs.max_rounds)},
        {"switch_threshold", set_positive_real(qs.switch_threshold)},
        {"start_family", [&qs](const json& v) {
             const auto x = v.get<std::int64_t>();
             if (x < 1) throw ConfigError("must be >= 1");
             qs.start_family = static_cast<std::uint32_t>(x);
         }},
        {"bootstrap_level", [this](const json& v) {
             const double x = v.get<double>();
             if (!(x > 0.0 && x < 1.0)) throw ConfigError("must lie in (0, 1)");
             qaoa.bootstrap_level = x;
         }},
        {"bootstrap_resamples", set_positive(qaoa.bootstrap_resamples)},
    };
    const std::map<std::string, Setter> qrao_keys{
        {"sizes", set_int_list(qrao.sizes, 2, kMaxBruteForceQubits)},
        {"depths", set_int_list(qrao.depths, 1, 3)},
        {"seeds", set_positive(qrao.seeds)},
        {"edge_prob", [this](const json& v) {
             const double x = v.get<double>();
             if (!(x > 0.0 && x <= 1.0)) throw ConfigError("must lie in (0, 1]");
             qrao.edge_prob = x;
         }},
        {"exhaustive", set(qrao.exhaustive)},
        {"max_evals", set_positive(rs.max_evals)},
        {"fd_step", set_positive_real(rs.fd_step)},
        {"restarts", set_positive(rs.restarts)},
        {"init_angle_max", set_positive_real(rs.init_angle_max)},
        {"improve_threshold", set_positive_real(rs.improve_threshold)},
    };
    const std::map<std::string, Setter> top_keys{
        {"seed", set(seed)},
        {"workers", [this](const json& v) { workers = v.get<int>(); }},
        {"out", set(out)},
        {"full", [this](const json& v) {
             if (v.get<bool>()) apply_full();
         }},
        {"mub", [&](const json& v) { apply_section(v, "mub", mub_keys, problems); }},
        {"width", [&](const json& v) { apply_section(v, "width", width_keys, problems); }},
        {"qaoa", [&](const json& v) { apply_section(v, "qaoa", qaoa_keys, problems); }},
        {"qrao", [&](const json& v) { apply_section(v, "qrao", qrao_keys, problems); }},
    };
    // "full" first so explicit grid keys in the same file win.
    if (j.contains("full")) apply_section(json{{"full", j.at("full")}}, "", top_keys, problems);
    json rest = j;
    rest.erase("full");
    apply_section(rest, "", top_keys, problems);

    if (!problems.empty()) {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ConfigError(msg);
    }
}

nlohmann::json ExperimentConfig::to_json() const {
    const auto& qs = qaoa.settings;
    const auto& rs = qrao.settings;
    return {{"seed", seed},
            {"workers", workers},
            {"out", out},
            {"full", full},
            {"mub", {{"primes", mub.primes}, {"n_max", mub.n_max}, {"tolerance", mub.tolerance},
                     {"collapse_costs", mub.collapse_costs}}},
            {"width", {{"samples", width.samples}, {"dims", width.dims}, {"unions", width.unions},
                       {"dominance_unions", width.dominance_unions},
                       {"octahedron_ensembles", width.octahedron_ensembles}, {"gap_qubits", width.gap_qubits},
                       {"cdf_t_max", width.cdf_t_max}, {"cdf_step", width.cdf_step}, {"sigmas", width.sigmas}}},
            {"qaoa", {{"sizes", qaoa.sizes}, {"depths", qaoa.depths}, {"seeds", qaoa.seeds},
                      {"families", qaoa.families}, {"max_evals", qs.max_evals}, {"fd_step", qs.fd_step},
                      {"restarts", qs.restarts}, {"init_angle_max", qs.init_angle_max},
                      {"init_mu_max", qs.init_mu_max}, {"screen_top_k", qs.screen_top_k},
                      {"screen_evals", qs.screen_evals}, {"max_rounds", qs.max_rounds},
                      {"switch_threshold", qs.switch_threshold}, {"start_family", qs.start_family},
                      {"bootstrap_level", qaoa.bootstrap_level},
                      {"bootstrap_resamples", qaoa.bootstrap_resamples}}},
            {"qrao", {{"sizes", qrao.sizes}, {"depths", qrao.depths}, {"seeds", qrao.seeds},
                      {"edge_prob", qrao.edge_prob}, {"exhaustive", qrao.exhaustive},
                      {"max_evals", rs.max_evals}, {"fd_step", rs.fd_step}, {"restarts", rs.restarts},
                      {"init_angle_max", rs.init_angle_max}, {"improve_threshold", rs.improve_threshold}}}};
}

std::string ExperimentConfig::hash() const {
    json j = to_json();
    j.erase("workers");
    j.erase("out");
    return fnv1a_hex(j.dump());
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    base.apply_json(j);
    return base;
}

}  // namespace mublab
