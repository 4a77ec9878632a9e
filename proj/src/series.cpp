#include "umbra/series.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace umbra {

namespace {

void require_same_order(const PowerSeries& a, const PowerSeries& b, const char* op) {
    if (a.order() != b.order())
        throw std::invalid_argument(std::string(op) + ": order mismatch (" + std::to_string(a.order()) +
                                    " vs " + std::to_string(b.order()) + ")");
}

// Reciprocal of a series with nonzero constant term; triangular solve.
std::vector<Rational> reciprocal(std::span<const Rational> b) {
    const std::size_t n = b.size();
    std::vector<Rational> r(n);
    if (n == 0) return r;
    const Rational inv0 = Rational(1) / b[0];
    r[0] = inv0;
    for (std::size_t k = 1; k < n; ++k) {
        Rational acc;
        for (std::size_t j = 1; j <= k; ++j)
            if (!b[j].is_zero()) acc += b[j] * r[k - j];
        r[k] = -(acc * inv0);
    }
    return r;
}

// Base coefficients of each kernel at unit scale.
std::vector<Rational> unit_kernel(KernelKind kind, std::size_t n) {
    std::vector<Rational> c(n);
    switch (kind) {
        case KernelKind::Exp:
            for (std::size_t i = 0; i < n; ++i) c[i] = Rational(1) / factorial(i);
            break;
        case KernelKind::UniformKernel:
            for (std::size_t i = 0; i < n; ++i) c[i] = Rational(1) / factorial(i + 1);
            break;
        case KernelKind::BernoulliKernel:
            c = reciprocal(unit_kernel(KernelKind::UniformKernel, n));
            break;
        case KernelKind::EulerKernel: {
            // (e^t + 1) / 2 = 1 + sum_{i>=1} t^i / (2 i!)
            std::vector<Rational> d(n);
            for (std::size_t i = 0; i < n; ++i) d[i] = i == 0 ? Rational(1) : Rational(1) / (2 * factorial(i));
            c = reciprocal(d);
            break;
        }
        case KernelKind::Sinh:
            for (std::size_t i = 1; i < n; i += 2) c[i] = Rational(1) / factorial(i);
            break;
        case KernelKind::Cosh:
            for (std::size_t i = 0; i < n; i += 2) c[i] = Rational(1) / factorial(i);
            break;
        case KernelKind::Sech:
            c = reciprocal(unit_kernel(KernelKind::Cosh, n));
            break;
        case KernelKind::SinhOverArg:
            for (std::size_t i = 0; i < n; i += 2) c[i] = Rational(1) / factorial(i + 1);
            break;
    }
    return c;
}

}  // namespace

PowerSeries::PowerSeries(std::size_t order, std::string var) : coeffs_(order), var_(std::move(var)) {
    if (order == 0) throw std::invalid_argument("PowerSeries: order must be positive");
}

PowerSeries::PowerSeries(std::vector<Rational> coeffs, std::string var)
    : coeffs_(std::move(coeffs)), var_(std::move(var)) {
    if (coeffs_.empty()) throw std::invalid_argument("PowerSeries: order must be positive");
}

PowerSeries PowerSeries::constant(const Rational& c, std::size_t order, std::string var) {
    PowerSeries s(order, std::move(var));
    s.coeffs_[0] = c;
    return s;
}

PowerSeries PowerSeries::monomial(std::size_t degree, std::size_t order, std::string var) {
    PowerSeries s(order, std::move(var));
    if (degree < order) s.coeffs_[degree] = 1;
    return s;
}

bool PowerSeries::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& q) { return q.is_zero(); });
}

PowerSeries ps_add(const PowerSeries& a, const PowerSeries& b) {
    require_same_order(a, b, "ps_add");
    PowerSeries r = a;
    for (std::size_t i = 0; i < a.order(); ++i) r[i] += b[i];
    return r;
}

PowerSeries ps_sub(const PowerSeries& a, const PowerSeries& b) {
    require_same_order(a, b, "ps_sub");
    PowerSeries r = a;
    for (std::size_t i = 0; i < a.order(); ++i) r[i] -= b[i];
    return r;
}

PowerSeries ps_scale(const PowerSeries& a, const Rational& c) {
    PowerSeries r = a;
    for (std::size_t i = 0; i < a.order(); ++i) r[i] *= c;
    return r;
}

PowerSeries ps_mul(const PowerSeries& a, const PowerSeries& b) {
    require_same_order(a, b, "ps_mul");
    const std::size_t n = a.order();
    PowerSeries r(n, a.var());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; i + j < n; ++j)
            if (!b[j].is_zero()) r[i + j] += a[i] * b[j];
    }
    return r;
}

PowerSeries ps_div(const PowerSeries& a, const PowerSeries& b) {
    require_same_order(a, b, "ps_div");
    if (b[0].is_zero())
        throw std::domain_error("ps_div: divisor has zero constant term (apply shift_factor first)");
    const std::size_t n = a.order();
    const Rational inv0 = Rational(1) / b[0];
    PowerSeries q(n, a.var());
    for (std::size_t k = 0; k < n; ++k) {
        Rational acc = a[k];
        for (std::size_t j = 1; j <= k; ++j)
            if (!b[j].is_zero()) acc -= b[j] * q[k - j];
        q[k] = acc * inv0;
    }
    return q;
}

PowerSeries ps_pow(const PowerSeries& a, unsigned k) {
    PowerSeries result = PowerSeries::constant(1, a.order(), a.var());
    PowerSeries base = a;
    while (k > 0) {
        if (k & 1u) result = ps_mul(result, base);
        k >>= 1u;
        if (k > 0) base = ps_mul(base, base);
    }
    return result;
}

PowerSeries shift_factor(const PowerSeries& a, std::size_t m) {
    if (m >= a.order()) throw std::invalid_argument("shift_factor: shift must be smaller than the order");
    for (std::size_t i = 0; i < m; ++i)
        if (!a[i].is_zero())
            throw std::domain_error("shift_factor: coefficient " + std::to_string(i) + " is nonzero");
    std::vector<Rational> c(a.coeffs().begin() + static_cast<std::ptrdiff_t>(m), a.coeffs().end());
    return PowerSeries(std::move(c), a.var());
}

PowerSeries truncate(const PowerSeries& a, std::size_t order) {
    if (order == 0 || order > a.order()) throw std::invalid_argument("truncate: order out of range");
    std::vector<Rational> c(a.coeffs().begin(), a.coeffs().begin() + static_cast<std::ptrdiff_t>(order));
    return PowerSeries(std::move(c), a.var());
}

Rational max_abs_diff(const PowerSeries& a, const PowerSeries& b) {
    require_same_order(a, b, "max_abs_diff");
    Rational worst;
    for (std::size_t i = 0; i < a.order(); ++i) worst = std::max(worst, abs(a[i] - b[i]));
    return worst;
}

PowerSeries kernel(KernelKind kind, const Rational& scale, std::size_t order, std::string var) {
    if (order == 0) throw std::invalid_argument("kernel: order must be positive");
    std::vector<Rational> c = unit_kernel(kind, order);
    Rational power = 1;
    for (std::size_t i = 1; i < order; ++i) {
        power *= scale;
        c[i] *= power;
    }
    return PowerSeries(std::move(c), std::move(var));
}

PowerSeries geometric_resum(const PowerSeries& loop) {
    if (loop[0] == Rational(1))
        throw std::domain_error("geometric_resum: loop kernel has constant term 1");
    if (abs(loop[0]) >= Rational(1))
        throw std::domain_error("geometric_resum: |I(0)| must be below 1, got " + loop[0].str());
    const PowerSeries one = PowerSeries::constant(1, loop.order(), loop.var());
    return ps_div(one, ps_sub(one, loop));
}

void write_csv(std::ostream& os, const PowerSeries& s) {
    os << "index,numerator,denominator\n";
    for (std::size_t i = 0; i < s.order(); ++i)
        os << i << ',' << s[i].numerator().get_str() << ',' << s[i].denominator().get_str() << '\n';
}

}  // namespace umbra
