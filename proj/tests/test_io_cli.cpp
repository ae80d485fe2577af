#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "hyp/io.hpp"
#include "json.hpp"

using namespace hyp;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run_cli(const RunConfig& cfg) {
    std::ostringstream out, err;
    int code = run(cfg, out, err);
    return {code, out.str(), err.str()};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    REQUIRE(f.good());
    f << text;
}

} // namespace

TEST_CASE("model text merges overrides onto the builtin ledger") {
    SystemModel m = parse_model_text("kind = horseshoe\nlambda = 0.25\n");
    CHECK(m.kind == model_kind::affine_horseshoe);
    CHECK(m.data.lambda == doctest::Approx(0.25));
    // untouched keys keep the builtin values
    CHECK(m.data.delta0 == doctest::Approx(1.0 / 3.0));
    CHECK(m.data.c == doctest::Approx(1.0));

    SystemModel cat = parse_model_text("# comment\n\nkind = catmap\nmatrix = 1,1,1,0\n");
    CHECK(cat.kind == model_kind::cat_map);
    CHECK(cat.mat == std::array<long long, 4>{1, 1, 1, 0});
}

TEST_CASE("model text diagnostics name the offending line") {
    try {
        parse_model_text("kind = horseshoe\nbogus = 1\n");
        FAIL("expected parse_error");
    } catch (const error& e) {
        CHECK(e.kind() == "parse_error");
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_model_text("kind = horseshoe\nmatrix = 1,1,1,0\n"), error);
    CHECK_THROWS_AS(parse_model_text("kind = horseshoe\nkind = catmap\n"), error);
    try {
        parse_model_text("kind = horseshoe\nlambda = 1.5\n");
        FAIL("expected validation_error");
    } catch (const error& e) {
        CHECK(e.kind() == "validation_error");
    }
}

TEST_CASE("builtin names and files load") {
    CHECK(model_name(load_model("")) == "horseshoe");
    CHECK(model_name(load_model("catmap")) == "catmap");
    write_file("/tmp/hyp_model_quarter.txt", "kind = horseshoe\nlambda = 0.25\n");
    CHECK(load_model("/tmp/hyp_model_quarter.txt").data.lambda == doctest::Approx(0.25));
    CHECK_THROWS_AS(load_model("/tmp/hyp_no_such_model.txt"), error);
}

TEST_CASE("partition csv round trips byte for byte") {
    SystemModel m = make_horseshoe();
    Partition p = refine_words(m, base_partition(m), 3);
    std::string csv1 = partition_to_csv(p, {});
    Partition q = partition_from_csv(csv1);
    CHECK(q.rects.size() == 8);
    CHECK(q.future_len == 3);
    CHECK(q.flavor == p.flavor);
    CHECK(q.rects[5].u_iv.lo == p.rects[5].u_iv.lo); // exact, not approximate
    CHECK(q.rects[5].word == p.rects[5].word);
    CHECK(partition_to_csv(q, {}) == csv1);
}

TEST_CASE("orbit csv round trips byte for byte") {
    SystemModel m = make_cat_map();
    PseudoOrbit o = make_noisy_orbit(m, Point2{0.2, 0.3, space_kind::torus}, 20, 1e-4, 3);
    o.boundary = orbit_boundary::periodic;
    std::string csv1 = orbit_to_csv(o, {});
    PseudoOrbit q = orbit_from_csv(csv1);
    CHECK(q.points.size() == 20);
    CHECK(q.alpha == o.alpha);
    CHECK(q.boundary == orbit_boundary::periodic);
    CHECK(q.points[7].x == o.points[7].x);
    CHECK(orbit_to_csv(q, {}) == csv1);
}

TEST_CASE("matrix text round trips and keeps weights") {
    SystemModel m = make_horseshoe();
    TransitionMatrix A = transition_matrix(m, base_partition(m));
    std::string t1 = matrix_to_text(A, {});
    TransitionMatrix B = matrix_from_text(t1);
    CHECK(B.m == 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(B.at(i, j) == 1);
    CHECK(matrix_to_text(B, {}) == t1);

    TransitionMatrix W;
    W.m = 2;
    W.a = {2, 1, 1, 1};
    TransitionMatrix W2 = matrix_from_text(matrix_to_text(W, {"fixture"}));
    CHECK(W2.at(0, 0) == 2);
}

TEST_CASE("constants report json round trips") {
    ConstantsReport r = build_report(make_horseshoe());
    std::string j1 = constants_report_to_json(r);
    ConstantsReport q = constants_report_from_json(j1);
    CHECK(q.K_adapted == r.K_adapted);
    CHECK(q.k_grid == r.k_grid);
    CHECK(q.targets.delta_coding == r.targets.delta_coding);
    CHECK(q.mu_convention == r.mu_convention);
    CHECK(constants_report_to_json(q) == j1);
}

TEST_CASE("constants subcommand reports the horseshoe ledger") {
    RunConfig cfg;
    cfg.subcommand = "constants";
    cfg.delta = 1e-6;
    CliResult r = run_cli(cfg);
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["report"]["K_adapted"].get<double>() == 1.5);
    CHECK(j["report"]["k_grid"].get<long long>() == 14);
    CHECK(j["report"]["rectangle_count"].get<long long>() == 16384);
    CHECK(j["report"]["alpha_shadow"].get<double>() == 4.0 / 9.0);
    CHECK(j.contains("header"));

    cfg.format = "csv";
    CliResult c = run_cli(cfg);
    REQUIRE(c.code == 0);
    CHECK(c.out.find("K_adapted,1.5\n") != std::string::npos);
}

TEST_CASE("entropy subcommand accepts a matrix file") {
    TransitionMatrix A;
    A.m = 2;
    A.a = {1, 1, 1, 1};
    write_file("/tmp/hyp_full2.mat", matrix_to_text(A, {}));
    RunConfig cfg;
    cfg.subcommand = "entropy";
    cfg.matrix_file = "/tmp/hyp_full2.mat";
    CliResult r = run_cli(cfg);
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["symbols"].get<int>() == 2);
    CHECK(std::abs(j["entropy"].get<double>() - std::log(2.0)) <= 1e-12);
}

TEST_CASE("reproduction table matches the published constants") {
    RunConfig cfg;
    cfg.subcommand = "reproduce-horseshoe";
    CliResult r = run_cli(cfg);
    CHECK(r.code == 0);
    CHECK(r.out.find("# all_match: yes") != std::string::npos);
    CHECK(r.out.find(",NO") == std::string::npos);

    cfg.format = "json";
    CliResult rj = run_cli(cfg);
    CHECK(rj.code == 0);
    auto j = nlohmann::json::parse(rj.out);
    CHECK(j["all_match"].get<bool>());
    CHECK(j["rows"][0]["computed"].get<std::string>() == "1.5");
    CHECK(j["rows"].size() == 5);
}

TEST_CASE("verify subcommand passes clean partitions and locates corruption") {
    RunConfig cfg;
    cfg.subcommand = "verify";
    cfg.k = 4;
    CliResult good = run_cli(cfg);
    CHECK(good.code == 0);
    CHECK(nlohmann::json::parse(good.out)["pass"].get<bool>());

    SystemModel m = make_horseshoe();
    // rect |001 tops out its parent cell but not the strip, so the widening
    // surfaces as a u-onto failure rather than a branch-domain one
    Partition p = refine_words(m, base_partition(m), 3);
    p.rects[1].u_iv.hi += 0.1 * p.rects[1].u_iv.length();
    write_file("/tmp/hyp_bad_partition.csv", partition_to_csv(p, {}));
    RunConfig bad;
    bad.subcommand = "verify";
    bad.input = "/tmp/hyp_bad_partition.csv";
    CliResult r = run_cli(bad);
    CHECK(r.code == 1);
    auto j = nlohmann::json::parse(r.out);
    CHECK_FALSE(j["pass"].get<bool>());
    std::string which = j["violation"]["which"].get<std::string>();
    CHECK((which == "u-onto" || which == "s-into"));
}

TEST_CASE("itinerary csv marks boundary hits") {
    RunConfig cfg;
    cfg.subcommand = "itinerary";
    cfg.x = 0.25;
    cfg.y = 1.0 / 3.0;
    cfg.N = 2;
    cfg.format = "csv";
    CliResult r = run_cli(cfg);
    REQUIRE(r.code == 0);
    std::string block = "time,symbol,boundary\n-2,1,0\n-1,0,0\n0,0,1\n1,1,1\n2,1,1\n";
    CHECK(r.out.find(block) != std::string::npos);
}

TEST_CASE("identical invocations produce identical bytes") {
    RunConfig cfg;
    cfg.subcommand = "shadow";
    cfg.model = "catmap";
    cfg.x = 0.2;
    cfg.y = 0.3;
    cfg.amplitude = 1e-4;
    cfg.length = 30;
    CliResult a = run_cli(cfg);
    CliResult b = run_cli(cfg);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);

    cfg.seed = 7;
    CliResult c = run_cli(cfg);
    CHECK(c.out != a.out); // seed is part of the output contract
}

TEST_CASE("usage problems exit 2 without partial output") {
    RunConfig bad_sub;
    bad_sub.subcommand = "bogus";
    CliResult r1 = run_cli(bad_sub);
    CHECK(r1.code == 2);
    CHECK(r1.out.empty());
    CHECK(r1.err.find("unknown subcommand") != std::string::npos);

    RunConfig no_n;
    no_n.subcommand = "close";
    CliResult r2 = run_cli(no_n);
    CHECK(r2.code == 2);

    RunConfig bad_fmt;
    bad_fmt.subcommand = "constants";
    bad_fmt.format = "xml";
    CliResult r3 = run_cli(bad_fmt);
    CHECK(r3.code == 2);

    RunConfig no_word;
    no_word.subcommand = "decode";
    CliResult r4 = run_cli(no_word);
    CHECK(r4.code == 2);
}

TEST_CASE("domain failures exit 1 with a kinded error line") {
    RunConfig cfg;
    cfg.subcommand = "bracket";
    cfg.x = 0.1;
    cfg.y = 0.1;
    cfg.x2 = 0.9;
    cfg.y2 = 0.9;
    cfg.have_point2 = true;
    CliResult r = run_cli(cfg);
    CHECK(r.code == 1);
    CHECK(r.err.find("error: too_far") != std::string::npos);
}

TEST_CASE("output lands in the requested file") {
    RunConfig cfg;
    cfg.subcommand = "constants";
    cfg.out = "/tmp/hyp_constants_out.json";
    CliResult r = run_cli(cfg);
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f("/tmp/hyp_constants_out.json");
    REQUIRE(f.good());
    std::stringstream buf;
    buf << f.rdbuf();
    auto j = nlohmann::json::parse(buf.str());
    CHECK(j["report"]["K_adapted"].get<double>() == 1.5);
}
