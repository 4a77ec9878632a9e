#include "umbra/polynomials.hpp"

#include <stdexcept>
#include <utility>

namespace umbra {

Poly::Poly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

Rational eval_poly(const Poly& q, const Rational& x0) {
    Rational acc;
    const auto& c = q.coeffs();
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x0 + *it;
    return acc;
}

Poly derivative(const Poly& q) {
    const auto& c = q.coeffs();
    if (c.size() <= 1) return {};
    std::vector<Rational> d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * Rational(static_cast<long>(i));
    return Poly(std::move(d));
}

Poly poly_add(const Poly& a, const Poly& b) {
    std::vector<Rational> c(std::max(a.coeffs().size(), b.coeffs().size()));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
    return Poly(std::move(c));
}

Poly poly_scale(const Poly& a, const Rational& s) {
    std::vector<Rational> c = a.coeffs();
    for (auto& v : c) v *= s;
    return Poly(std::move(c));
}

Poly appell_polynomial(const PowerSeries& egf, int n) {
    if (n < 0) throw std::invalid_argument("appell_polynomial: negative degree");
    if (egf.order() <= static_cast<std::size_t>(n))
        throw std::invalid_argument("appell_polynomial: series order too small for degree " + std::to_string(n));
    // [t^n] K(t) e^{xt} = sum_j K_j x^{n-j} / (n-j)!
    std::vector<Rational> c(static_cast<std::size_t>(n) + 1);
    const Rational nf = factorial(static_cast<unsigned>(n));
    for (int j = 0; j <= n; ++j) {
        const auto& kj = egf[static_cast<std::size_t>(j)];
        if (kj.is_zero()) continue;
        c[static_cast<std::size_t>(n - j)] = nf * kj / factorial(static_cast<unsigned>(n - j));
    }
    return Poly(std::move(c));
}

namespace {

Poly higher_order(KernelKind kind, int n, unsigned p) {
    if (n < 0) throw std::invalid_argument("polynomial degree must be nonnegative");
    const auto order = static_cast<std::size_t>(n) + 1;
    return appell_polynomial(ps_pow(kernel(kind, 1, order), p), n);
}

}  // namespace

Poly hop_bernoulli(int n, unsigned p) { return higher_order(KernelKind::BernoulliKernel, n, p); }
Poly hop_euler(int n, unsigned p) { return higher_order(KernelKind::EulerKernel, n, p); }

Rational bernoulli_number(int n) { return eval_poly(hop_bernoulli(n, 1), 0); }

Rational euler_number(int n) { return pow(Rational(2), n) * eval_poly(hop_euler(n, 1), Rational(1, 2)); }

Poly chebyshev_t(unsigned N) {
    Poly prev({Rational(1)});
    if (N == 0) return prev;
    Poly cur({Rational(0), Rational(1)});
    for (unsigned k = 1; k < N; ++k) {
        // T_{k+1} = 2x T_k - T_{k-1}
        std::vector<Rational> shifted(cur.coeffs().size() + 1);
        for (std::size_t i = 0; i < cur.coeffs().size(); ++i) shifted[i + 1] = 2 * cur.coeffs()[i];
        Poly next = poly_add(Poly(std::move(shifted)), poly_scale(prev, -1));
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

std::vector<Rational> chebyshev_recip_weights(unsigned N, std::size_t count) {
    if (N < 1) throw std::invalid_argument("chebyshev_recip_weights: N must be at least 1");
    if (count < N) throw std::invalid_argument("chebyshev_recip_weights: count must be at least N");
    // T_N(1/t) = Q(t) / t^N with Q(t) = sum_i c_i t^{N-i}; 1/T_N(1/t) = t^N / Q(t).
    const Poly t = chebyshev_t(N);
    PowerSeries q(count, "t");
    for (std::size_t i = 0; i < t.coeffs().size(); ++i)
        if (N - i < count) q[N - i] = t.coeffs()[i];
    const PowerSeries p = ps_div(PowerSeries::monomial(N, count, "t"), q);
    return {p.coeffs().begin(), p.coeffs().end()};
}

}  // namespace umbra
