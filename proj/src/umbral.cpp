#include "umbra/umbral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace umbra {

const char* family_letter(Family f) {
    switch (f) {
        case Family::Bernoulli: return "B";
        case Family::Euler: return "E";
        case Family::Uniform: return "U";
    }
    return "?";
}

namespace {

KernelKind kernel_of(Family f) {
    switch (f) {
        case Family::Bernoulli: return KernelKind::BernoulliKernel;
        case Family::Euler: return KernelKind::EulerKernel;
        case Family::Uniform: return KernelKind::UniformKernel;
    }
    throw std::logic_error("unknown family");
}

std::string coefficient_text(const Rational& c) {
    return c.is_integer() ? c.str() : "(" + c.str() + ")";
}

}  // namespace

UmbralExpr UmbralExpr::variable() {
    UmbralExpr e;
    e.has_x_ = true;
    return e;
}

UmbralExpr UmbralExpr::constant_only(const Rational& c) {
    UmbralExpr e;
    e.constant_ = c;
    return e;
}

UmbralExpr& UmbralExpr::plus(Family family, const Rational& coefficient, unsigned order) {
    if (order == 0) return *this;
    blocks_.push_back(SymbolBlock{family, order, next_copy_id(), coefficient});
    return *this;
}

UmbralExpr& UmbralExpr::plus(const SymbolBlock& block) {
    if (block.order == 0) throw std::invalid_argument("SymbolBlock: order must be at least 1");
    if (find(block.copy_id) != nullptr)
        throw std::invalid_argument("SymbolBlock: copy id " + std::to_string(block.copy_id) + " already used");
    blocks_.push_back(block);
    return *this;
}

UmbralExpr& UmbralExpr::plus_constant(const Rational& c) {
    constant_ += c;
    return *this;
}

UmbralExpr& UmbralExpr::set_has_x(bool v) {
    has_x_ = v;
    return *this;
}

const SymbolBlock* UmbralExpr::find(int copy_id) const {
    auto it = std::find_if(blocks_.begin(), blocks_.end(), [&](const SymbolBlock& b) { return b.copy_id == copy_id; });
    return it == blocks_.end() ? nullptr : &*it;
}

int UmbralExpr::next_copy_id() const {
    int id = 0;
    for (const auto& b : blocks_) id = std::max(id, b.copy_id);
    return id + 1;
}

std::string to_string(const UmbralExpr& e) {
    std::vector<SymbolBlock> sorted = e.blocks();
    std::sort(sorted.begin(), sorted.end(), [](const SymbolBlock& a, const SymbolBlock& b) {
        return std::pair(static_cast<int>(a.family), a.copy_id) < std::pair(static_cast<int>(b.family), b.copy_id);
    });
    std::ostringstream os;
    bool first = true;
    auto emit = [&](const Rational& signed_value, const std::string& body) {
        const bool negative = signed_value.sign() < 0;
        if (first) {
            if (negative) os << '-';
        } else {
            os << (negative ? " - " : " + ");
        }
        os << body;
        first = false;
    };
    if (e.has_x()) emit(1, "x");
    for (const auto& b : sorted) {
        const Rational mag = abs(b.coefficient);
        std::string body = mag == Rational(1) ? "" : coefficient_text(mag) + "*";
        body += family_letter(b.family);
        if (b.order > 1) body += "^(" + std::to_string(b.order) + ")";
        body += "#" + std::to_string(b.copy_id);
        emit(b.coefficient, body);
    }
    if (!e.constant().is_zero()) emit(e.constant(), abs(e.constant()).str());
    if (first) os << '0';
    return os.str();
}

const PowerSeries& EgfCache::power(Family family, const Rational& scale, unsigned p) {
    auto& table = powers_[std::pair(static_cast<int>(family), scale)];
    if (table.empty()) {
        table.push_back(PowerSeries::constant(1, order_, "w"));
        table.push_back(kernel(kernel_of(family), scale, order_, "w"));
    }
    while (table.size() <= p) table.push_back(ps_mul(table.back(), table[1]));
    return table[p];
}

PowerSeries umbral_egf(const UmbralExpr& e, EgfCache& cache) {
    PowerSeries acc = kernel(KernelKind::Exp, e.constant(), cache.order(), "w");
    for (const auto& b : e.blocks()) acc = ps_mul(acc, cache.power(b.family, b.coefficient, b.order));
    return acc;
}

PowerSeries umbral_egf(const UmbralExpr& e, std::size_t order) {
    PowerSeries acc = kernel(KernelKind::Exp, e.constant(), order, "w");
    for (const auto& b : e.blocks())
        acc = ps_mul(acc, ps_pow(kernel(kernel_of(b.family), b.coefficient, order, "w"), b.order));
    return acc;
}

namespace {

Poly moment_from_egf(const UmbralExpr& e, const PowerSeries& egf, int n) {
    if (e.has_x()) return appell_polynomial(egf, n);
    return Poly({factorial(static_cast<unsigned>(n)) * egf[static_cast<std::size_t>(n)]});
}

void check_order(int n, std::size_t order) {
    if (n < 0) throw std::invalid_argument("umbral_moment: negative degree");
    if (order < static_cast<std::size_t>(n) + 1)
        throw std::invalid_argument("umbral_moment: series order " + std::to_string(order) +
                                    " too small for degree " + std::to_string(n));
}

}  // namespace

Poly umbral_moment(const UmbralExpr& e, int n, std::size_t order) {
    check_order(n, order);
    return moment_from_egf(e, umbral_egf(e, order), n);
}

Poly umbral_moment(const UmbralExpr& e, int n) { return umbral_moment(e, n, static_cast<std::size_t>(n < 0 ? 0 : n) + 1); }

Poly umbral_moment(const UmbralExpr& e, int n, EgfCache& cache) {
    check_order(n, cache.order());
    return moment_from_egf(e, umbral_egf(e, cache), n);
}

UmbralExpr split_bernoulli(const UmbralExpr& e, int copy_id) {
    const SymbolBlock* target = e.find(copy_id);
    if (target == nullptr) throw std::invalid_argument("split_bernoulli: no block with copy id " + std::to_string(copy_id));
    if (target->family != Family::Bernoulli)
        throw std::invalid_argument("split_bernoulli: block " + std::to_string(copy_id) + " is not a Bernoulli block");
    const Rational half = target->coefficient / 2;
    const unsigned order = target->order;
    UmbralExpr out = UmbralExpr::constant_only(e.constant()).set_has_x(e.has_x());
    for (const auto& b : e.blocks())
        if (b.copy_id != copy_id) out.plus(b);
    const int fresh = std::max(out.next_copy_id(), e.next_copy_id());
    out.plus(SymbolBlock{Family::Bernoulli, order, fresh, half});
    out.plus(SymbolBlock{Family::Euler, order, fresh + 1, half});
    return out;
}

UmbralExpr cancel_pairs(const UmbralExpr& e) {
    std::vector<SymbolBlock> blocks = e.blocks();
    std::sort(blocks.begin(), blocks.end(), [](const SymbolBlock& a, const SymbolBlock& b) { return a.copy_id < b.copy_id; });
    std::vector<bool> dropped(blocks.size(), false);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (dropped[i] || blocks[i].family != Family::Bernoulli) continue;
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            if (dropped[j] || blocks[j].family != Family::Uniform) continue;
            if (blocks[j].order == blocks[i].order && blocks[j].coefficient == blocks[i].coefficient) {
                dropped[i] = dropped[j] = true;
                break;
            }
        }
    }
    UmbralExpr out = UmbralExpr::constant_only(e.constant()).set_has_x(e.has_x());
    for (std::size_t i = 0; i < e.blocks().size(); ++i) {
        const SymbolBlock& b = e.blocks()[i];
        const auto pos = std::find_if(blocks.begin(), blocks.end(), [&](const SymbolBlock& s) { return s.copy_id == b.copy_id; });
        if (!dropped[static_cast<std::size_t>(pos - blocks.begin())]) out.plus(b);
    }
    return out;
}

double density_moment(Family family, int n, const Rational& x, const QuadratureParams& quad) {
    if (family == Family::Uniform) throw std::invalid_argument("density_moment: only Bernoulli and Euler densities");
    if (n < 0 || n > 12) throw std::invalid_argument("density_moment: degree must be in [0, 12]");
    constexpr double pi = std::numbers::pi;
    // sech decays like e^{-pi|t|}, sech^2 like e^{-2 pi|t|}; the Euler tail
    // needs a wider window to stay below 1e-12 at degree 12.
    const double T = quad.half_width > 0 ? quad.half_width : (family == Family::Bernoulli ? 8.0 : 24.0);
    const double shift = x.to_double() - 0.5;

    auto density = [&](double t) {
        const double s = 1.0 / std::cosh(pi * t);
        return family == Family::Bernoulli ? 0.5 * pi * s * s : s;
    };
    auto power = [&](double t) {
        std::complex<double> z(shift, t), acc(1.0, 0.0);
        for (int i = 0; i < n; ++i) acc *= z;
        return acc;
    };
    auto composite = [&](unsigned panels) {
        using rule = boost::math::quadrature::gauss<double, 20>;
        const double h = 2.0 * T / panels;
        double re = 0.0, im = 0.0;
        for (unsigned p = 0; p < panels; ++p) {
            const double a = -T + p * h, b = a + h;
            re += rule::integrate([&](double t) { return power(t).real() * density(t); }, a, b);
            im += rule::integrate([&](double t) { return power(t).imag() * density(t); }, a, b);
        }
        return std::pair(re, im);
    };

    auto prev = composite(quad.initial_panels);
    for (unsigned panels = quad.initial_panels * 2; panels <= quad.max_panels; panels *= 2) {
        const auto cur = composite(panels);
        if (std::abs(cur.first - prev.first) < quad.tol / 2) {
            if (std::abs(cur.second) >= quad.tol * std::max(1.0, std::abs(cur.first)))
                throw std::runtime_error("density_moment: imaginary part " + std::to_string(cur.second) +
                                         " exceeds tolerance");
            return cur.first;
        }
        prev = cur;
    }
    throw std::runtime_error("density_moment: quadrature did not converge");
}

}  // namespace umbra
