#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "oracles.hpp"
#include "umbra/series.hpp"

using namespace umbra;
using oracle::frac;

namespace {

std::vector<Rational> coeffs(const PowerSeries& s) { return {s.coeffs().begin(), s.coeffs().end()}; }

std::vector<Rational> R(std::initializer_list<std::pair<long, long>> v) {
    std::vector<Rational> out;
    for (auto [p, q] : v) out.emplace_back(p, q);
    return out;
}

PowerSeries from(const oracle::Seq& s, const char* var = "t") { return PowerSeries(oracle::lift(s), var); }

}  // namespace

TEST_CASE("series: construction and errors") {
    CHECK_THROWS_AS(PowerSeries(0), std::invalid_argument);
    const PowerSeries z(5);
    CHECK(z.order() == 5);
    CHECK(z.is_zero());
    CHECK(PowerSeries::monomial(2, 4) == PowerSeries(R({{0, 1}, {0, 1}, {1, 1}, {0, 1}})));
    CHECK(PowerSeries::monomial(7, 4).is_zero());
    CHECK_THROWS_AS(ps_add(PowerSeries(3), PowerSeries(4)), std::invalid_argument);
    CHECK_THROWS_AS(ps_mul(PowerSeries(3), PowerSeries(4)), std::invalid_argument);
    CHECK_THROWS_AS(ps_div(PowerSeries::constant(1, 3), PowerSeries::constant(1, 4)), std::invalid_argument);
    CHECK_THROWS_AS(ps_div(PowerSeries::constant(1, 3), PowerSeries::monomial(1, 3)), std::domain_error);
}

TEST_CASE("series: products") {
    const PowerSeries a(R({{1, 1}, {1, 1}, {0, 1}, {0, 1}})), b(R({{1, 1}, {-1, 1}, {0, 1}, {0, 1}}));
    CHECK(coeffs(ps_mul(a, b)) == R({{1, 1}, {0, 1}, {-1, 1}, {0, 1}}));
    CHECK(ps_mul(kernel(KernelKind::BernoulliKernel, 1, 12), kernel(KernelKind::UniformKernel, 1, 12)) ==
          PowerSeries::constant(1, 12));
    // sech(t) = 1 - t^2/2 + 5t^4/24 - 61t^6/720, cosh(t) = 1 + t^2/2 + t^4/24 + t^6/720
    const PowerSeries sech_hand(R({{1, 1}, {0, 1}, {-1, 2}, {0, 1}, {5, 24}, {0, 1}, {-61, 720}}));
    const PowerSeries cosh_hand(R({{1, 1}, {0, 1}, {1, 2}, {0, 1}, {1, 24}, {0, 1}, {1, 720}}));
    CHECK(kernel(KernelKind::Sech, 1, 7) == sech_hand);
    CHECK(ps_mul(sech_hand, cosh_hand) == PowerSeries::constant(1, 7));
    CHECK(ps_mul(kernel(KernelKind::Sech, 1, 7), kernel(KernelKind::Cosh, 1, 7)) == PowerSeries::constant(1, 7));
}

TEST_CASE("series: division") {
    const PowerSeries geo = ps_div(PowerSeries::constant(1, 10), PowerSeries(R({{1, 1}, {-1, 1}, {0, 1}, {0, 1}, {0, 1},
                                                                                {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}})));
    for (const auto& c : geo.coeffs()) CHECK(c == Rational(1));

    const PowerSeries recip = ps_div(PowerSeries::constant(1, 10), kernel(KernelKind::BernoulliKernel, 1, 10));
    for (unsigned i = 0; i < 10; ++i) CHECK(recip[i] == Rational(1) / factorial(i + 1));

    // sinh(w)/sinh(2w) = sech(w)/2
    const PowerSeries ratio = ps_div(shift_factor(kernel(KernelKind::Sinh, 1, 13, "w"), 1),
                                     shift_factor(kernel(KernelKind::Sinh, 2, 13, "w"), 1));
    CHECK(ratio.order() == 12);
    CHECK(coeffs(truncate(ratio, 5)) == R({{1, 2}, {0, 1}, {-1, 4}, {0, 1}, {5, 48}}));
    CHECK(ratio == from(oracle::sinh_ratio(1, 2, 12), "w"));
}

TEST_CASE("series: powers") {
    CHECK(ps_pow(kernel(KernelKind::Cosh, 3, 6), 0) == PowerSeries::constant(1, 6));
    const PowerSeries s2 = ps_pow(kernel(KernelKind::Sech, 1, 5), 2);
    CHECK(coeffs(s2) == R({{1, 1}, {0, 1}, {-1, 1}, {0, 1}, {2, 3}}));
    CHECK(ps_pow(PowerSeries::monomial(1, 5), 3) == PowerSeries::monomial(3, 5));
    const PowerSeries base(R({{1, 2}, {1, 3}, {-2, 1}, {0, 1}, {1, 5}, {7, 1}}));
    PowerSeries acc = PowerSeries::constant(1, 6);
    for (unsigned k = 0; k <= 9; ++k) {
        CHECK(ps_pow(base, k) == acc);
        acc = ps_mul(acc, base);
    }
}

TEST_CASE("series: kernels match hand expansions") {
    CHECK(coeffs(kernel(KernelKind::BernoulliKernel, 1, 6)) ==
          R({{1, 1}, {-1, 2}, {1, 12}, {0, 1}, {-1, 720}, {0, 1}}));
    CHECK(coeffs(kernel(KernelKind::Sech, 1, 6)) == R({{1, 1}, {0, 1}, {-1, 2}, {0, 1}, {5, 24}, {0, 1}}));
    CHECK(coeffs(kernel(KernelKind::Exp, 0, 4)) == R({{1, 1}, {0, 1}, {0, 1}, {0, 1}}));

    constexpr std::size_t L = 14;
    for (const oracle::Q c : {frac(1), frac(1, 2), frac(2), frac(-3, 2), frac(5, 3)}) {
        const Rational rc = oracle::lift(c);
        const oracle::Seq ex = oracle::exp_series(c, L + 1);
        oracle::Seq unif = oracle::drop(ex, 1);  // (e^{ct} - 1)/(ct) up to the 1/c^i scaling below
        for (std::size_t i = 0; i < unif.size(); ++i) unif[i] /= c;
        unif.resize(L);
        oracle::Seq one(L, 0), two(L, 0), onepe(oracle::exp_series(c, L));
        one[0] = 1;
        two[0] = 2;
        onepe[0] += 1;
        oracle::Seq soa = oracle::drop(oracle::sinh_series(c, L + 1), 1);
        for (auto& v : soa) v /= c;
        soa.resize(L);
        oracle::Seq exL = ex;
        exL.resize(L);

        CHECK(kernel(KernelKind::Exp, rc, L) == from(exL));
        CHECK(kernel(KernelKind::Sinh, rc, L) == from(oracle::sinh_series(c, L)));
        CHECK(kernel(KernelKind::Cosh, rc, L) == from(oracle::cosh_series(c, L)));
        CHECK(kernel(KernelKind::Sech, rc, L) == from(oracle::sech_series(c, L)));
        CHECK(kernel(KernelKind::UniformKernel, rc, L) == from(unif));
        CHECK(kernel(KernelKind::BernoulliKernel, rc, L) == from(oracle::long_div(one, unif)));
        CHECK(kernel(KernelKind::EulerKernel, rc, L) == from(oracle::long_div(two, onepe)));
        CHECK(kernel(KernelKind::SinhOverArg, rc, L) == from(soa));
    }
}

TEST_CASE("series: kernels at scale zero are their value at the origin") {
    for (auto kind : {KernelKind::Exp, KernelKind::BernoulliKernel, KernelKind::EulerKernel, KernelKind::UniformKernel,
                      KernelKind::Cosh, KernelKind::Sech, KernelKind::SinhOverArg})
        CHECK(kernel(kind, 0, 5) == PowerSeries::constant(1, 5));
    CHECK(kernel(KernelKind::Sinh, 0, 5).is_zero());
}

TEST_CASE("series: shift_factor") {
    const PowerSeries s(R({{0, 1}, {0, 1}, {3, 1}, {4, 1}}));
    CHECK(coeffs(shift_factor(s, 2)) == R({{3, 1}, {4, 1}}));
    CHECK_THROWS_AS(shift_factor(s, 3), std::domain_error);
    CHECK_THROWS_AS(shift_factor(s, 4), std::invalid_argument);
}

TEST_CASE("series: geometric resummation") {
    CHECK(geometric_resum(PowerSeries(6)) == PowerSeries::constant(1, 6));
    CHECK(geometric_resum(PowerSeries::constant(Rational(1, 2), 6)) == PowerSeries::constant(2, 6));
    const PowerSeries I = ps_scale(ps_pow(kernel(KernelKind::Sech, 1, 16, "w"), 2), Rational(1, 2));
    const PowerSeries G = geometric_resum(I);
    CHECK(ps_mul(G, ps_sub(PowerSeries::constant(1, 16, "w"), I)) == PowerSeries::constant(1, 16, "w"));
    CHECK_THROWS_AS(geometric_resum(PowerSeries::constant(1, 4)), std::domain_error);
    CHECK_THROWS_AS(geometric_resum(PowerSeries::constant(3, 4)), std::domain_error);
}

TEST_CASE("series: max_abs_diff and truncate") {
    const PowerSeries a(R({{1, 1}, {2, 1}, {3, 1}})), b(R({{1, 1}, {-1, 1}, {3, 2}}));
    CHECK(max_abs_diff(a, b) == Rational(3));
    CHECK(max_abs_diff(a, a).is_zero());
    CHECK(truncate(a, 2) == PowerSeries(R({{1, 1}, {2, 1}})));
    CHECK_THROWS(truncate(a, 4));
}

TEST_CASE("series: csv") {
    std::ostringstream os;
    write_csv(os, PowerSeries(R({{1, 2}, {0, 1}, {-5, 3}})));
    CHECK(os.str() == "index,numerator,denominator\n0,1,2\n1,0,1\n2,-5,3\n");
}
