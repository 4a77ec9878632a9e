#include <doctest.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "umbra/loopcalc.hpp"
#include "umbra/montecarlo.hpp"

using namespace umbra;

namespace {

WalkConfig small(Walk walk, double start, double target, std::optional<double> taboo = {}) {
    WalkConfig c;
    c.walk = walk;
    c.start = start;
    c.target = target;
    c.taboo = taboo;
    c.dt = 1e-3;
    c.paths = 4000;
    c.seed = 7;
    c.t_max = 20;
    c.workers = 1;
    return c;
}

bool identical(const HittingEstimate& a, const HittingEstimate& b) {
    return std::memcmp(&a.mean, &b.mean, sizeof(double)) == 0 && std::memcmp(&a.std_error, &b.std_error, sizeof(double)) == 0 &&
           a.n_hit_target == b.n_hit_target && a.n_hit_taboo == b.n_hit_taboo && a.n_censored == b.n_censored;
}

double series_at(const PowerSeries& s, double w) {
    double acc = 0;
    for (std::size_t i = s.order(); i-- > 0;) acc = acc * w + s[i].to_double();
    return acc;
}

}  // namespace

TEST_CASE("montecarlo: Philox known answers") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32({0, 0})({0, 0, 0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32({0xffffffffu, 0xffffffffu})({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32({0xa4093822u, 0x299f31d0u})({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("montecarlo: normal streams") {
    NormalStream a(11, 3), b(11, 3), c(11, 4), d(12, 3);
    bool differs_path = false, differs_seed = false;
    for (int i = 0; i < 64; ++i) {
        const double x = a.next();
        CHECK(x == b.next());
        differs_path |= x != c.next();
        differs_seed |= x != d.next();
    }
    CHECK(differs_path);
    CHECK(differs_seed);

    NormalStream s(20240601, 0);
    double m1 = 0, m2 = 0, m4 = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) {
        const double x = s.next();
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    CHECK(std::abs(m1 / n) < 0.01);
    CHECK(std::abs(m2 / n - 1) < 0.01);
    CHECK(std::abs(m4 / n - 3) < 0.06);
}

TEST_CASE("montecarlo: configuration checks") {
    auto ok = small(Walk::ReflectedBM1D, 0, 1);
    CHECK_NOTHROW(validate(ok));
    auto c = ok;
    c.dt = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = ok;
    c.paths = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = ok;
    c.z = -1;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = ok;
    c.target = 0;
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small(Walk::ReflectedBM1D, 2, 1);
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    c = small(Walk::ReflectedBM1D, 1, 2, 3.0);
    CHECK_THROWS_AS(validate(c), std::invalid_argument);
    CHECK_NOTHROW(validate(small(Walk::ReflectedBM1D, 2, 1, 3.0)));
    CHECK_THROWS_AS(simulate_hit(small(Walk::ReflectedBM1D, 1, 2, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(simulate_taboo(ok), std::invalid_argument);
}

TEST_CASE("montecarlo: determinism across workers") {
    auto c = small(Walk::Bessel3D, 0, 1);
    c.paths = 1500;
    const auto one = simulate(c);
    c.workers = 2;
    const auto two = simulate(c);
    c.workers = 3;
    const auto three = simulate(c);
    CHECK(identical(one, two));
    CHECK(identical(one, three));
    c.seed = 8;
    CHECK_FALSE(identical(one, simulate(c)));
}

TEST_CASE("montecarlo: estimator bounds and monotonicity") {
    for (const auto& c : {small(Walk::ReflectedBM1D, 0, 1), small(Walk::Bessel3D, 0, 1), small(Walk::ReflectedBM1D, 1, 2, 0.0)}) {
        double prev = 2;
        for (double z : {0.5, 1.0, 2.0}) {
            auto cz = c;
            cz.z = z;
            cz.paths = 1500;
            const auto e = simulate(cz);
            CHECK(e.mean >= 0);
            CHECK(e.mean <= 1);
            CHECK(e.std_error >= 0);
            CHECK(e.n_hit_target + e.n_hit_taboo + e.n_censored == cz.paths);
            CHECK(e.mean < prev);
            prev = e.mean;
        }
    }
}

TEST_CASE("montecarlo: small-run estimates") {
    const auto hit = simulate_hit(small(Walk::ReflectedBM1D, 0, 1));
    CHECK(compare_closed_form(hit, eval_phi_numeric(Walk::ReflectedBM1D, 0, 1, {}, 0.5)).pass);
    const auto down = simulate_taboo(small(Walk::Bessel3D, 2, 1, 3.0));
    CHECK(compare_closed_form(down, 0.162014).pass);
    CHECK(down.n_hit_taboo > 0);
    // the origin is never reached in three dimensions
    auto origin = small(Walk::Bessel3D, 1, 0, 2.0);
    origin.t_max = 2;
    const auto o = simulate_taboo(origin);
    CHECK(o.n_hit_target == 0);
    CHECK(o.mean == doctest::Approx(o.n_censored * std::exp(-origin.z * origin.t_max) / origin.paths));
    origin.t_max = 50;
    origin.paths = 200;
    CHECK(simulate_taboo(origin).mean < 1e-10);
}

TEST_CASE("montecarlo: censoring") {
    auto c = small(Walk::ReflectedBM1D, 0, 3);
    c.t_max = 0.05;
    c.paths = 500;
    const auto e = simulate(c);
    CHECK(e.n_censored == c.paths);
    CHECK(e.mean == doctest::Approx(std::exp(-c.z * c.t_max)));
    const auto canon = simulate(small(Walk::ReflectedBM1D, 0, 1));
    CHECK(canon.n_censored < 4);
}

TEST_CASE("montecarlo: comparator") {
    HittingEstimate e;
    e.mean = 0.5;
    e.std_error = 0.001;
    auto c = compare_closed_form(e, 0.5);
    CHECK(c.z_score == 0.0);
    CHECK(c.pass);
    c = compare_closed_form(e, 0.7);
    CHECK_FALSE(c.pass);
    CHECK(c.z_score == doctest::Approx(-200));
    CHECK(compare_closed_form(e, 0.51).pass);   // within 2%
    CHECK(compare_closed_form(e, 0.503).pass);  // |z| = 3
    e.std_error = 0;
    CHECK_THROWS_AS(compare_closed_form(e, 0.5), std::invalid_argument);
}

TEST_CASE("montecarlo: closed forms in floating point") {
    CHECK(eval_phi_numeric(Walk::ReflectedBM1D, 0, 1, {}, 0.5) == doctest::Approx(0.6480542737).epsilon(1e-10));
    CHECK(eval_phi_numeric(Walk::Bessel3D, 0, 3, {}, 0.5) == doctest::Approx(3 / std::sinh(3.0)).epsilon(1e-12));
    CHECK(eval_phi_numeric(Walk::Bessel3D, 0, 1, {}, 0.5) == doctest::Approx(0.850918).epsilon(1e-6));
    CHECK(eval_phi_numeric(Walk::ReflectedBM1D, 1, 2, 0.0, 0.5) == doctest::Approx(0.324027).epsilon(1e-6));
    CHECK(eval_phi_numeric(Walk::Bessel3D, 2, 1, 3.0, 0.5) == doctest::Approx(0.162014).epsilon(1e-6));
    CHECK(eval_phi_numeric(Walk::ReflectedBM1D, 0, 2, {}, 1e-14) == doctest::Approx(1.0));
    const double big = eval_phi_numeric(Walk::Bessel3D, 1, 3, {}, 1e5);
    CHECK(std::isfinite(big));
    CHECK(big >= 0);
    CHECK_THROWS_AS(eval_phi_numeric(Walk::ReflectedBM1D, 0, 1, {}, 0), std::invalid_argument);
    CHECK_THROWS_AS(eval_phi_numeric(Walk::ReflectedBM1D, 2, 1, {}, 1), std::invalid_argument);

    // agrees with the exact series at small w
    const double z = 0.02, w = std::sqrt(2 * z);
    for (Walk walk : {Walk::ReflectedBM1D, Walk::Bessel3D}) {
        const LevelSystem sys(walk, {0, Rational(1, 2), 1, Rational(3, 2)});
        for (const PhiMove mv : {PhiMove{0, 3, {}}, PhiMove{1, 2, {}}, PhiMove{2, 1, 3}, PhiMove{2, 3, 1}, PhiMove{1, 2, 0}})
            CHECK(eval_phi_numeric(sys, mv, z) == doctest::Approx(series_at(phi(sys, mv, 30), w)).epsilon(1e-12));
    }
}

TEST_CASE("montecarlo: JSON") {
    auto c = small(Walk::ReflectedBM1D, 1, 2, 0.0);
    const auto jc = to_json(c);
    CHECK(jc["walk"] == "reflected");
    CHECK(jc["taboo"] == 0.0);
    CHECK(to_json(small(Walk::Bessel3D, 0, 1))["taboo"].is_null());
    HittingEstimate e;
    e.mean = 0.25;
    e.std_error = 0.01;
    e.n_hit_target = 3;
    const auto je = to_json(e);
    for (const char* key : {"mean", "stderr", "n_hit_target", "n_hit_taboo", "n_censored"}) CHECK(je.contains(key));
    const auto jr = to_json(compare_closed_form(e, 0.25));
    for (const char* key : {"reference", "z_score", "rel_err", "pass"}) CHECK(jr.contains(key));
}
