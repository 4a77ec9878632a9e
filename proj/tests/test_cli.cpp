#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "umbra/cli.hpp"

using namespace umbra;
using namespace umbra::cli;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "umbra");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

int usage_code(std::vector<std::string> args) {
    args.insert(args.begin(), "umbra");
    try {
        parse_args(args);
    } catch (const CliExit& e) {
        return e.code;
    }
    return -1;
}

}  // namespace

TEST_CASE("cli: parsing") {
    const auto poly = parse_args({"umbra", "poly", "--family", "euler", "--n", "3", "--order", "2"});
    CHECK(poly.kind == Kind::Poly);
    CHECK(poly.family == Family::Euler);
    CHECK(poly.n == 3);
    CHECK(poly.p == 2);
    CHECK(poly.order == 48);

    const auto v = parse_args({"umbra", "verify", "--id", "N3_UNIFORM", "--n", "5", "--x", "1/2"});
    CHECK(v.kind == Kind::Verify);
    CHECK(v.id == IdentityId::N3_UNIFORM);
    CHECK(v.params.n == 5);
    CHECK(v.params.x == Rational(1, 2));

    const auto s = parse_args({"umbra", "--order", "12", "series", "--walk", "bessel", "--levels", "1,2,3", "--mgf", "chain"});
    CHECK(s.order == 12);
    CHECK(s.series.levels == std::vector<Rational>{0, 1, 2, 3});
    CHECK(s.series.walk == Walk::Bessel3D);

    const auto va = parse_args({"umbra", "verify-all", "--tol", "1e-10", "--jobs", "2", "--kmax", "300"});
    CHECK(va.kind == Kind::VerifyAll);
    CHECK(va.policy.tol == 1e-10);
    CHECK(va.policy.k_max == 300);
    CHECK(va.jobs == 2);

    const auto sim = parse_args({"umbra", "simulate", "--walk", "reflected", "--start", "1", "--target", "2", "--taboo", "0",
                                 "--seed", "5", "--paths", "10"});
    CHECK(sim.kind == Kind::Simulate);
    REQUIRE(sim.walk.taboo.has_value());
    CHECK(*sim.walk.taboo == 0.0);
    CHECK(sim.walk.seed == 5);
    CHECK(sim.walk.paths == 10);

    CHECK(std::string(kind_name(Kind::VerifyAll)) == "verify-all");
}

TEST_CASE("cli: usage errors") {
    CHECK(usage_code({"verify", "--id", "NOPE"}) == 2);
    CHECK(usage_code({}) == 2);
    CHECK(usage_code({"poly", "--family", "euler"}) == 2);
    CHECK(usage_code({"poly", "--family", "gamma", "--n", "2"}) == 2);
    CHECK(usage_code({"poly", "--family", "euler", "--n", "2", "--bogus"}) == 2);
    CHECK(usage_code({"numbers", "--upto", "3"}) == 2);
    CHECK(usage_code({"numbers", "--bernoulli", "--euler", "--upto", "3"}) == 2);
    CHECK(usage_code({"weights", "--N", "3", "--count", "2"}) == 2);
    CHECK(usage_code({"series", "--kernel", "tanh"}) == 2);
    CHECK(usage_code({"series", "--kernel", "sech", "--mgf", "chain"}) == 2);
    CHECK(usage_code({"series", "--walk", "reflected", "--levels", "1,2", "--move", "0-1"}) == 2);
    CHECK(usage_code({"verify", "--id", "N3_UNIFORM", "--x", "1/0"}) == 2);
    CHECK(usage_code({"verify", "--id", "N3_UNIFORM", "--x", "0.5"}) == 2);
    CHECK(usage_code({"simulate", "--walk", "reflected", "--start", "1", "--target", "1"}) == 2);
    CHECK(usage_code({"simulate", "--walk", "spiral"}) == 2);
    CHECK(usage_code({"quadrature", "--family", "euler", "--n", "13", "--x", "0"}) == 2);
    CHECK(usage_code({"--help"}) == 0);

    const auto r = run_cli({"verify", "--id", "NOPE"});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("NOPE") != std::string::npos);
    CHECK(r.err.back() == '\n');
    CHECK(run_cli({"verify", "--id", "THREE_SITES_1D_STATED", "--levels", "3,1"}).code == 2);
}

TEST_CASE("cli: moves") {
    const auto m = parse_move("2->1|!3");
    CHECK(m.from == 2);
    CHECK(m.to == 1);
    CHECK(m.taboo == std::optional<std::size_t>(3));
    CHECK_FALSE(parse_move("0->3").taboo.has_value());
    CHECK_THROWS_AS(parse_move("0->"), std::invalid_argument);
    CHECK_THROWS_AS(parse_move("a->b"), std::invalid_argument);
    CHECK_THROWS_AS(parse_move("1->2|3"), std::invalid_argument);
}

TEST_CASE("cli: exact outputs") {
    auto r = run_cli({"numbers", "--bernoulli", "--upto", "8"});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out) == json::array({"1", "-1/2", "1/6", "0", "-1/30", "0", "1/42", "0", "-1/30"}));
    r = run_cli({"numbers", "--euler", "--upto", "4"});
    CHECK(json::parse(r.out) == json::array({"1", "0", "-1", "0", "5"}));
    r = run_cli({"weights", "--N", "2", "--count", "8"});
    CHECK(json::parse(r.out) == json::array({"0", "0", "1/2", "0", "1/4", "0", "1/8", "0"}));

    r = run_cli({"poly", "--family", "bernoulli", "--n", "2", "--x", "1/2"});
    CHECK(r.code == 0);
    const auto p = json::parse(r.out);
    CHECK(p["coefficients"] == json::array({"1/6", "-1", "1"}));
    CHECK(p["value"] == "-1/12");
    r = run_cli({"poly", "--family", "euler", "--n", "3", "--order", "2"});
    CHECK(json::parse(r.out)["coefficients"] == json::array({"1/2", "3/2", "-3", "1"}));

    r = run_cli({"--order", "4", "series", "--kernel", "sech", "--scale", "2"});
    CHECK(r.code == 0);
    CHECK(r.out == "index,numerator,denominator\n0,1,1\n1,0,1\n2,-2,1\n3,0,1\n");
    r = run_cli({"--order", "5", "series", "--walk", "bessel", "--levels", "0,1", "--move", "0->1"});
    CHECK(r.out == "index,numerator,denominator\n0,1,1\n1,0,1\n2,-1,6\n3,0,1\n4,7,360\n");
    const auto chain = run_cli({"--order", "10", "series", "--walk", "reflected", "--levels", "1,2,3", "--mgf", "chain"});
    const auto direct = run_cli({"--order", "10", "series", "--walk", "reflected", "--levels", "1,2,3", "--mgf", "direct"});
    CHECK(chain.code == 0);
    CHECK(chain.out == direct.out);
    CHECK(run_cli({"series", "--walk", "bessel", "--levels", "0,1,2", "--move", "2->1|!0"}).code == 2);
}

TEST_CASE("cli: verification commands") {
    auto r = run_cli({"verify", "--id", "N3_UNIFORM", "--n", "1"});
    CHECK(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["status"] == "VERIFIED");
    CHECK(j["lhs"] == "1/2");
    r = run_cli({"verify", "--id", "N4_UNIFORM_STATED", "--n", "1"});
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["status"] == "RESIDUAL_NONZERO");
    r = run_cli({"verify", "--id", "THREE_SITES_1D_STATED", "--n", "1", "--levels", "1,2", "--x", "7"});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["status"] == "DEGENERATE_TRIVIAL");
    r = run_cli({"verify", "--id", "FOUR_UNIFORM_1D", "--n", "3", "--kmax", "5"});
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["status"] == "NOT_CONVERGED");
    r = run_cli({"verify", "--id", "EULER_CHEB", "--n", "2", "--N", "3", "--x", "1/2"});
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["N"] == 3);

    r = run_cli({"quadrature", "--family", "bernoulli", "--n", "4", "--x", "1/2"});
    CHECK(r.code == 0);
    j = json::parse(r.out);
    CHECK(j["exact"] == "7/240");
    CHECK(j["pass"] == true);
    CHECK(std::abs(j["numeric"].get<double>() - 7.0 / 240) < 1e-8);
}

TEST_CASE("cli: verify-all matrix") {
    const auto m = verify_all_matrix();
    int audits = 0;
    for (const auto& e : m) audits += e.expected == Status::RESIDUAL_NONZERO || e.expected == Status::DEGENERATE_TRIVIAL;
    CHECK(audits >= 2);
    CHECK(m.size() > 250);

    const auto a = run_cli({"verify-all", "--jobs", "1"});
    const auto b = run_cli({"verify-all", "--jobs", "3"});
    auto ja = json::parse(a.out), jb = json::parse(b.out);
    CHECK(a.code == b.code);
    CHECK(ja["summary"]["total"] == m.size());
    CHECK(ja["reports"].size() == m.size());
    CHECK(ja.contains("errata"));
    CHECK(ja["policy"]["tol"] == 1e-12);
    CHECK(a.code == (ja["summary"]["failed"] == 0 ? 0 : 1));
    ja.erase("timestamp");
    jb.erase("timestamp");
    CHECK(ja.dump() == jb.dump());
    // canonical order: identity, then n, then x
    for (std::size_t i = 1; i < ja["reports"].size(); ++i) {
        const auto& p = ja["reports"][i - 1];
        const auto& q = ja["reports"][i];
        const auto ip = parse_identity(p["identity"].get<std::string>()), iq = parse_identity(q["identity"].get<std::string>());
        REQUIRE((ip && iq));
        CHECK(*ip <= *iq);
        if (*ip == *iq) CHECK(p["n"].get<int>() <= q["n"].get<int>());
    }
}

TEST_CASE("cli: simulate seed from the environment") {
    ::setenv("UMBRAL_WALK_SEED", "99", 1);
    CHECK(parse_args({"umbra", "simulate", "--walk", "bessel", "--start", "0", "--target", "1"}).walk.seed == 99);
    CHECK(parse_args({"umbra", "simulate", "--walk", "bessel", "--seed", "3"}).walk.seed == 3);
    const std::vector<std::string> args = {"simulate", "--walk", "bessel", "--paths", "300", "--dt", "1e-3", "--workers", "2"};
    const auto x = run_cli(args), y = run_cli(args);
    CHECK(x.out == y.out);
    CHECK(json::parse(x.out)["config"]["seed"] == 99);
    ::unsetenv("UMBRAL_WALK_SEED");
    CHECK(parse_args({"umbra", "simulate", "--walk", "bessel"}).walk.seed == WalkConfig{}.seed);
    ::setenv("UMBRAL_WALK_SEED", "x12", 1);
    int code = 0;
    try {
        parse_args({"umbra", "simulate", "--walk", "bessel"});
    } catch (const CliExit& e) {
        code = e.code;
    }
    CHECK(code == 2);
    ::unsetenv("UMBRAL_WALK_SEED");
}
