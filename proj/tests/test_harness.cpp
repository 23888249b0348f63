#include "mublab/harness.hpp"
#include "mublab/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mublab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mublab_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string masked_body(const fs::path& p) {
    const auto t = mask_runtime(read_csv(p.string()));
    const fs::path tmp = p.string() + ".masked";
    write_csv(tmp.string(), t);
    return slurp(tmp);
}

ExperimentConfig tiny(const fs::path& out) {
    ExperimentConfig c;
    c.out = out.string();
    c.qaoa.sizes = {4};
    c.qaoa.depths = {1};
    c.qaoa.seeds = 2;
    c.qaoa.families = {"maxcut", "mis"};
    c.qaoa.settings.max_evals = 40;
    c.qaoa.settings.restarts = 1;
    c.qaoa.settings.screen_evals = 10;
    c.qaoa.settings.max_rounds = 2;
    c.qaoa.bootstrap_resamples = 200;
    c.qrao.sizes = {5};
    c.qrao.depths = {1};
    c.qrao.seeds = 2;
    c.qrao.settings.max_evals = 40;
    c.qrao.settings.restarts = 1;
    return c;
}

}  // namespace

TEST_CASE("config whitelist reports every problem at once") {
    ExperimentConfig c;
    try {
        c.apply_json(nlohmann::json::parse(R"({"qaoa": {"sizes": [6], "max_evalz": 10}, "colour": "red"})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("max_evalz") != std::string::npos);
        CHECK(msg.find("colour") != std::string::npos);
    }
    CHECK_THROWS_AS(c.apply_json(nlohmann::json::parse(R"({"seed": "abc"})")), ConfigError);
}

TEST_CASE("config layering and hash") {
    ExperimentConfig a;
    ExperimentConfig b;
    b.workers = 7;
    b.out = "elsewhere";
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    b.seed = 1;
    CHECK(a.hash() != b.hash());

    ExperimentConfig f;
    f.apply_full();
    CHECK(f.qaoa.sizes == std::vector<int>{8, 10, 12, 14});
    CHECK(f.qaoa.depths == std::vector<int>{1, 2, 3});
    CHECK(f.qaoa.seeds == 25);
    CHECK(f.qrao.sizes == std::vector<int>{6, 8, 10, 12});

    ExperimentConfig j;
    j.apply_json(nlohmann::json::parse(R"({"seed": 5, "qrao": {"sizes": [6], "exhaustive": true}})"));
    CHECK(j.seed == 5);
    CHECK(j.qrao.exhaustive);
    CHECK(j.qrao.sizes == std::vector<int>{6});
    ExperimentConfig round;
    round.apply_json(j.to_json());
    CHECK(round.hash() == j.hash());
}

TEST_CASE("fnv1a reference values") {
    // Published FNV-1a 64-bit test vectors.
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("seed derivation") {
    CHECK(instance_seed(100, 3) == 103);
    CHECK(method_seed(103, 6, 1) == method_seed(103, 6, 1));
    CHECK(method_seed(103, 6, 1) != method_seed(103, 6, 2));
    CHECK(method_seed(103, 6, 1) != method_seed(104, 6, 1));
}

TEST_CASE("doubles round trip through the csv format") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 0.9378970691335264, 1e300}) CHECK(std::stod(format_double(x)) == x);
    const auto dir = scratch("csv");
    fs::create_directories(dir);
    CsvTable t{{"a", "runtime_s"}, {{"1", "0.5"}, {"2", "0.25"}}};
    write_csv((dir / "t.csv").string(), t);
    const auto back = read_csv((dir / "t.csv").string());
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    const auto m = mask_runtime(back);
    CHECK(m.rows[0][1] == m.rows[1][1]);
    CHECK(m.rows[0][0] == "1");
    CHECK_THROWS_AS(back.col("missing"), SchemaError);
}

TEST_CASE("result rows parse back and mixed config hashes are refused") {
    MethodRecord r;
    r.method = "standard";
    r.family = ProblemFamily::wmis;
    r.instance_seed = 9;
    r.n = 6;
    r.p = 2;
    r.metrics = {0.5, 0.75, -3.25, 12};
    r.runtime_seconds = 0.125;
    r.n_cost_evals = 77;
    CsvTable t{kQaoaColumns, {qaoa_csv_row(r, "aaaa"), qaoa_csv_row(r, "aaaa")}};
    std::string hash;
    const auto recs = qaoa_records_from_csv(t, &hash);
    CHECK(hash == "aaaa");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].family == ProblemFamily::wmis);
    CHECK(recs[0].metrics.postselected_ratio == 0.75);
    CHECK(recs[0].n_cost_evals == 77);
    t.rows[1] = qaoa_csv_row(r, "bbbb");
    CHECK_THROWS_AS(qaoa_records_from_csv(t), SchemaError);
    CsvTable missing{{"family", "n"}, {}};
    CHECK_THROWS_AS(qaoa_records_from_csv(missing), SchemaError);

    StrategyRecord s;
    s.strategy = Strategy::bitflip_2pole;
    s.graph_seed = 4;
    s.n = 6;
    s.p = 1;
    s.alpha_r = 1.1;
    s.alpha_c = 1.0;
    s.family_evals = 5;
    s.chosen_r = 3;
    s.chosen_b0 = 2;
    const auto srecs = qrao_records_from_csv(CsvTable{kQraoColumns, {qrao_csv_row(s, "h")}});
    CHECK(srecs[0].strategy == Strategy::bitflip_2pole);
    CHECK(srecs[0].alpha_r == 1.1);
    CHECK(srecs[0].chosen_r == 3);
}

TEST_CASE("mub-verify command") {
    const auto dir = scratch("mubverify");
    ExperimentConfig c;
    c.out = dir.string();
    std::ostringstream log;
    CHECK(cmd_mub_verify(c, {}, log) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "mub_verify.json"));
    CHECK(j.dump().find("\"pass\":false") == std::string::npos);
    CHECK(fs::exists(dir / "manifest_mub_verify.json"));
    MubVerifyOptions six;
    six.dim = 6;
    CHECK(cmd_mub_verify(c, six, log) == 2);
    MubVerifyOptions five;
    five.dim = 5;
    CHECK(cmd_mub_verify(c, five, log) == 0);

    // Serialized system with a corrupted basis fails with exit code 1.
    auto sys = build_qubit_mub(1);
    sys.bases[2] = sys.bases[1];
    std::ofstream(dir / "bad.json") << to_json(sys).dump();
    MubVerifyOptions in;
    in.input = (dir / "bad.json").string();
    CHECK(cmd_mub_verify(c, in, log) == 1);
}

TEST_CASE("width gap command rejects out-of-range sizes") {
    ExperimentConfig c;
    c.out = scratch("gap").string();
    c.width.gap_qubits = {5};
    c.width.samples = 100;
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_width("gap", c, log), InvalidDimension);
    CHECK_THROWS(cmd_width("nonsense", c, log));
}

TEST_CASE("qaoa bench: outputs, determinism across workers, resume") {
    const auto d1 = scratch("qaoa1"), d2 = scratch("qaoa2");
    auto c1 = tiny(d1), c2 = tiny(d2);
    c2.workers = 3;
    std::ostringstream log;
    REQUIRE(cmd_qaoa_bench(c1, log) == 0);
    REQUIRE(cmd_qaoa_bench(c2, log) == 0);
    for (const char* f : {"qaoa_results.csv", "qaoa_summary.json", "plot_qaoa_facets.csv", "manifest_qaoa.json"})
        CHECK(fs::exists(d1 / f));
    const auto t = read_csv((d1 / "qaoa_results.csv").string());
    CHECK(t.header == kQaoaColumns);
    CHECK(t.rows.size() == 2 * 1 * 1 * 2 * 2);
    CHECK(masked_body(d1 / "qaoa_results.csv") == masked_body(d2 / "qaoa_results.csv"));

    // Drop the last rows and resume: the file is completed to the same body.
    auto partial = t;
    partial.rows.resize(3);
    write_csv((d2 / "qaoa_results.csv").string(), partial);
    REQUIRE(cmd_qaoa_bench(c2, log) == 0);
    CHECK(masked_body(d1 / "qaoa_results.csv") == masked_body(d2 / "qaoa_results.csv"));
    const auto man = nlohmann::json::parse(slurp(d2 / "manifest_qaoa.json"));
    CHECK(man["resumed_rows"] == 3);

    // A different configuration must not resume into the same file.
    auto c3 = tiny(d2);
    c3.seed = 1;
    CHECK_THROWS(cmd_qaoa_bench(c3, log));

    const auto summary = nlohmann::json::parse(slurp(d1 / "qaoa_summary.json"));
    CHECK(summary.contains("mis_direction_check"));
    CHECK(summary["config_hash"] == c1.hash());

    REQUIRE(cmd_report(d1.string(), log) == 0);
    CHECK(fs::exists(d1 / "report_qaoa.json"));
    CHECK(slurp(d1 / "report_qaoa.json").size() > 10);
}

TEST_CASE("qrao bench and report") {
    const auto d = scratch("qrao");
    auto c = tiny(d);
    std::ostringstream log;
    REQUIRE(cmd_qrao_bench(c, log) == 0);
    const auto t = read_csv((d / "qrao_results.csv").string());
    CHECK(t.header == kQraoColumns);
    CHECK(t.rows.size() == 2 * 3);
    REQUIRE(cmd_report(d.string(), log) == 0);
    CHECK(fs::exists(d / "report_qrao.json"));
    CHECK_THROWS_AS(cmd_report(scratch("empty").string(), log), SchemaError);
}
