#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "umbra/polynomials.hpp"
#include "umbra/rational.hpp"
#include "umbra/series.hpp"

namespace umbra {

enum class Family { Bernoulli, Euler, Uniform };

const char* family_letter(Family f);

/// coefficient * S^{(order)}, where S^{(order)} is a sum of `order`
/// independent copies of the family's symbol. copy_id tells blocks apart.
struct SymbolBlock {
    Family family = Family::Bernoulli;
    unsigned order = 1;
    int copy_id = 0;
    Rational coefficient = 1;
};

/// [x] + sum_j c_j S_j + d, with every block independent of the others.
class UmbralExpr {
public:
    UmbralExpr() = default;
    static UmbralExpr variable();
    static UmbralExpr constant_only(const Rational& c);

    bool has_x() const { return has_x_; }
    const Rational& constant() const { return constant_; }
    const std::vector<SymbolBlock>& blocks() const { return blocks_; }

    /// Appends a block with a fresh copy id. A zero order is an empty sum and
    /// is dropped, which keeps k = 0 terms of the loop expansions uniform.
    UmbralExpr& plus(Family family, const Rational& coefficient, unsigned order = 1);
    /// Appends a block with the given id; throws if the id is taken or order is 0.
    UmbralExpr& plus(const SymbolBlock& block);
    UmbralExpr& plus_constant(const Rational& c);
    UmbralExpr& set_has_x(bool v);

    const SymbolBlock* find(int copy_id) const;
    int next_copy_id() const;

private:
    bool has_x_ = false;
    Rational constant_;
    std::vector<SymbolBlock> blocks_;
};

/// Canonical report form, e.g. `x + (3/2)*B^(2)#1 + 2*U#2 + 5/4`, blocks
/// ordered by (family, copy_id).
std::string to_string(const UmbralExpr& e);

/// Memo of kernel powers at a fixed series order. Not thread-safe; use one
/// per worker.
class EgfCache {
public:
    explicit EgfCache(std::size_t order) : order_(order) {}
    std::size_t order() const { return order_; }
    const PowerSeries& power(Family family, const Rational& scale, unsigned p);

private:
    std::size_t order_;
    std::map<std::pair<int, Rational>, std::vector<PowerSeries>> powers_;
};

/// EGF of the expression without the x factor: e^{dw} * prod_j K_j(c_j w)^{p_j}.
PowerSeries umbral_egf(const UmbralExpr& e, std::size_t order);
PowerSeries umbral_egf(const UmbralExpr& e, EgfCache& cache);

/// The polynomial (in x) that the n-th power of the expression evaluates to.
/// `order` is the series capacity used; it must be at least n + 1.
Poly umbral_moment(const UmbralExpr& e, int n, std::size_t order);
Poly umbral_moment(const UmbralExpr& e, int n);
Poly umbral_moment(const UmbralExpr& e, int n, EgfCache& cache);

/// Rewrites c*B^{(p)} as (c/2)*B^{(p)} + (c/2)*E^{(p)} (doubling rule 2B = B + E).
/// Both replacement blocks receive fresh copy ids.
UmbralExpr split_bernoulli(const UmbralExpr& e, int copy_id);

/// Drops every (Bernoulli, Uniform) pair with equal coefficient and order.
UmbralExpr cancel_pairs(const UmbralExpr& e);

struct QuadratureParams {
    double tol = 1e-10;
    /// Integration range [-T, T]; 0 picks a per-family default wide enough
    /// for the density tail at degree 12.
    double half_width = 0.0;
    unsigned initial_panels = 16;
    unsigned max_panels = 1u << 14;
};

/// Re of the integral of (x - 1/2 + it)^n against the family's density:
/// (pi/2) sech^2(pi t) for Bernoulli, sech(pi t) for Euler. Approximates
/// B_n(x) or E_n(x). Throws std::runtime_error when the panel refinement
/// does not converge or the imaginary part is not negligible.
double density_moment(Family family, int n, const Rational& x, const QuadratureParams& quad = {});

}  // namespace umbra
