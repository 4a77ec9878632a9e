#pragma once

#include <cstddef>
#include <vector>

#include "umbra/rational.hpp"
#include "umbra/series.hpp"

namespace umbra {

/// Polynomial in x with rational coefficients, ascending degree. Trailing
/// zeros are trimmed, so the zero polynomial has no coefficients.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<Rational> coeffs);

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }
    Rational coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Rational(); }
    bool is_zero() const { return coeffs_.empty(); }

    friend bool operator==(const Poly&, const Poly&) = default;

private:
    std::vector<Rational> coeffs_;
};

Rational eval_poly(const Poly& q, const Rational& x0);
Poly derivative(const Poly& q);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, const Rational& c);

/// n! [t^n] of egf(t) * e^{xt}: the Appell polynomial attached to an EGF.
Poly appell_polynomial(const PowerSeries& egf, int n);

/// B_n^{(p)}(x) from (t/(e^t-1))^p e^{xt}.
Poly hop_bernoulli(int n, unsigned p);
/// E_n^{(p)}(x) from (2/(e^t+1))^p e^{xt}.
Poly hop_euler(int n, unsigned p);

Rational bernoulli_number(int n);
/// E_n = 2^n E_n(1/2).
Rational euler_number(int n);

/// First-kind Chebyshev polynomial T_N.
Poly chebyshev_t(unsigned N);
/// Coefficients p_0..p_{count-1} of 1/T_N(1/t).
std::vector<Rational> chebyshev_recip_weights(unsigned N, std::size_t count);

}  // namespace umbra
