#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "pathcert/pipeline.hpp"

using namespace pathcert;
using namespace pathcert::pipeline;

namespace {

std::string temp_path(const char* stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("run config validates, serializes and hashes deterministically") {
    RunConfig c;
    c.dim = 8;
    c.noise = {{"white", 0.9}, {"crosstalk", 4.49e-5}};
    c.seed = 77;
    c.validate();

    const std::string text = run_config_to_json_text(c);
    const RunConfig back = run_config_from_json_text(text);
    CHECK(back.dim == 8);
    REQUIRE(back.noise.size() == 2);
    CHECK(back.noise[1].kind == "crosstalk");
    CHECK(back.noise[1].value == doctest::Approx(4.49e-5).epsilon(1e-15));
    CHECK(run_config_to_json_text(back) == text);

    CHECK(config_hash(c) == config_hash(back));
    RunConfig other = c;
    other.seed = 78;
    CHECK(config_hash(other) != config_hash(c));
    CHECK(config_hash(c).size() == 16);

    RunConfig bad;
    bad.dim = 12;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad.dim = 64;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    RunConfig neg;
    neg.rate_hz = 0.0;
    CHECK_THROWS_AS(neg.validate(), ValidationError);
    RunConfig junk;
    junk.noise = {{"sparkle", 0.1}};
    CHECK_THROWS_AS(junk.validate(), ValidationError);

    CHECK_THROWS_AS(run_config_from_json_text("{nope"), ValidationError);
    CHECK_THROWS_AS(run_config_from_json_text(R"({"dim": "eight"})"), ValidationError);
}

TEST_CASE("noise argument parsing") {
    const auto stack = parse_noise_arg("white:0.05,dephase:0.16,crosstalk:4.5e-5");
    REQUIRE(stack.size() == 3);
    CHECK(stack[0].kind == "white");
    CHECK(stack[0].value == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(stack[2].value == doctest::Approx(4.5e-5).epsilon(1e-12));
    CHECK(parse_noise_arg("").empty());
    CHECK_THROWS_AS(parse_noise_arg("white=0.05"), ValidationError);
    CHECK_THROWS_AS(parse_noise_arg("white:abc"), ValidationError);
}

TEST_CASE("simulation runs produce the documented record counts and are byte-stable") {
    RunConfig c;
    c.dim = 2;
    c.seed = 5;
    const SimulationRun run = run_simulate(c);
    CHECK(run.records.size() == 10);

    RunConfig c32;
    c32.dim = 32;
    c32.exact = true;
    CHECK(run_simulate(c32).records.size() == 4000);

    const std::string p1 = temp_path("pathcert_run_a.csv");
    const std::string p2 = temp_path("pathcert_run_b.csv");
    run_simulate_to_file(c, p1);
    run_simulate_to_file(c, p2);
    const std::string s1 = slurp(p1);
    CHECK(!s1.empty());
    CHECK(s1 == slurp(p2));
}

TEST_CASE("dimension inference and default nesting") {
    RunConfig c;
    c.dim = 8;
    c.exact = true;
    const SimulationRun run = run_simulate(c);
    CHECK(infer_dimension(run.records) == 8);
    CHECK(default_dims(8) == std::vector<int>{2, 4, 6, 8});
    CHECK(default_dims(32).size() == 16);
    CHECK_THROWS_AS(default_dims(1), ValidationError);
    CHECK_THROWS_AS(infer_dimension({}), IncompleteDataError);
}

TEST_CASE("simulate then certify round-trips a noiseless state to full marks") {
    RunConfig c;
    c.dim = 4;
    c.exact = true;
    c.n_resamples = 0;
    const SimulationRun sim = run_simulate(c);
    const CertifyRun cert = run_certify(sim.records, {2, 4}, c);
    REQUIRE(cert.report.rows.size() == 2);
    for (const auto& row : cert.report.rows) {
        CHECK(row.fidelity == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row.schmidt == row.d);
        CHECK(row.eof == doctest::Approx(std::log2(double(row.d))).epsilon(1e-9));
    }

    // provenance is always present and reflects the config
    const auto doc = nlohmann::json::parse(cert.report_json);
    CHECK(doc.at("provenance").at("config_hash") == config_hash(c));
    CHECK(doc.at("provenance").at("seed") == 5u - 4u);  // default seed 1
    CHECK(doc.at("provenance").contains("version"));
    CHECK(cert.plot_csv.rfind("d,F,F_sep,k_witness,eof\n", 0) == 0);
}

TEST_CASE("file based certify flow matches the in-memory one") {
    RunConfig c;
    c.dim = 4;
    c.seed = 21;
    c.n_resamples = 100;
    const std::string counts = temp_path("pathcert_flow.csv");
    run_simulate_to_file(c, counts);
    const CertifyRun from_file = run_certify_file(counts, {}, c);
    // default dims for a d=4 file
    REQUIRE(from_file.report.rows.size() == 2);
    CHECK(from_file.report.rows[0].d == 2);
    CHECK(from_file.report.rows[1].d == 4);
    CHECK(from_file.report.rows[1].fidelity > 0.9);
    CHECK(from_file.report.rows[1].fidelity_std > 0.0);

    const CertifyRun in_memory = run_certify(measure::read_counts_csv(counts), {}, c);
    CHECK(in_memory.report_json == from_file.report_json);
    CHECK(in_memory.plot_csv == from_file.plot_csv);
}

TEST_CASE("compilation drivers expose verification results") {
    const CompileRun sub = run_compile_subspace(0, 2, 8);
    CHECK(sub.verification.pass);
    CHECK(sub.table_text.find("SSM") != std::string::npos);
    CHECK(nlohmann::json::parse(sub.json_text).at("d") == 8);

    const CompileRun mub = run_compile_mub(3);
    CHECK(mub.verification.pass);
    const auto doc = nlohmann::json::parse(mub.json_text);
    CHECK(doc.at("inputs").size() == 8);

    CHECK_THROWS_AS(run_compile_subspace(5, 5, 32), ValidationError);
}

TEST_CASE("text file helpers error on missing paths") {
    CHECK_THROWS_AS(read_text_file(temp_path("pathcert_nope.txt")), ValidationError);
    const std::string p = temp_path("pathcert_txt.txt");
    write_text_file(p, "hello\n");
    CHECK(read_text_file(p) == "hello\n");
}
