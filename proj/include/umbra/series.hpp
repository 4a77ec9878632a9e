#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "umbra/rational.hpp"

namespace umbra {

/// Truncated formal power series over the rationals. Holds exactly `order`
/// coefficients; index i is the coefficient of var^i. Binary operations
/// require equal orders and never resize.
class PowerSeries {
public:
    explicit PowerSeries(std::size_t order, std::string var = "t");
    PowerSeries(std::vector<Rational> coeffs, std::string var = "t");

    static PowerSeries constant(const Rational& c, std::size_t order, std::string var = "t");
    static PowerSeries monomial(std::size_t degree, std::size_t order, std::string var = "t");

    std::size_t order() const { return coeffs_.size(); }
    const std::string& var() const { return var_; }
    std::span<const Rational> coeffs() const { return coeffs_; }

    const Rational& operator[](std::size_t i) const { return coeffs_.at(i); }
    Rational& operator[](std::size_t i) { return coeffs_.at(i); }

    bool is_zero() const;

    friend bool operator==(const PowerSeries& a, const PowerSeries& b) { return a.coeffs_ == b.coeffs_; }

private:
    std::vector<Rational> coeffs_;
    std::string var_;
};

PowerSeries ps_add(const PowerSeries& a, const PowerSeries& b);
PowerSeries ps_sub(const PowerSeries& a, const PowerSeries& b);
PowerSeries ps_scale(const PowerSeries& a, const Rational& c);
/// Cauchy product truncated at the common order.
PowerSeries ps_mul(const PowerSeries& a, const PowerSeries& b);
/// q with q*b = a. Throws std::domain_error when b has zero constant term;
/// use shift_factor first to strip a leading power of the variable.
PowerSeries ps_div(const PowerSeries& a, const PowerSeries& b);
PowerSeries ps_pow(const PowerSeries& a, unsigned k);

/// Divides out var^m exactly. The first m coefficients must be zero
/// (std::domain_error otherwise); the result has order a.order() - m.
PowerSeries shift_factor(const PowerSeries& a, std::size_t m);

/// Same series at a smaller order.
PowerSeries truncate(const PowerSeries& a, std::size_t order);

/// max_i |a_i - b_i|.
Rational max_abs_diff(const PowerSeries& a, const PowerSeries& b);

inline PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) { return ps_add(a, b); }
inline PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) { return ps_sub(a, b); }
inline PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) { return ps_mul(a, b); }
inline PowerSeries operator*(const Rational& c, const PowerSeries& a) { return ps_scale(a, c); }
inline PowerSeries operator/(const PowerSeries& a, const PowerSeries& b) { return ps_div(a, b); }

enum class KernelKind {
    Exp,              // e^{ct}
    BernoulliKernel,  // ct / (e^{ct} - 1)
    EulerKernel,      // 2 / (e^{ct} + 1)
    UniformKernel,    // (e^{ct} - 1) / (ct)
    Sinh,
    Cosh,
    Sech,
    SinhOverArg,      // sinh(ct) / (ct)
};

/// Taylor coefficients of the named function at argument scale*t.
/// Scale 0 yields the constant series of the function's value at 0.
PowerSeries kernel(KernelKind kind, const Rational& scale, std::size_t order, std::string var = "t");

/// Sum over k of I^k, i.e. 1/(1 - I). Requires |I(0)| < 1.
PowerSeries geometric_resum(const PowerSeries& loop);

/// CSV with header `index,numerator,denominator`, one row per coefficient.
void write_csv(std::ostream& os, const PowerSeries& s);

}  // namespace umbra
