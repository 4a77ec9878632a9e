#include "umbra/loopcalc.hpp"

#include <stdexcept>

namespace umbra {

const char* walk_name(Walk w) { return w == Walk::ReflectedBM1D ? "reflected" : "bessel"; }

LevelSystem::LevelSystem(Walk walk, std::vector<Rational> levels) : walk_(walk), levels_(std::move(levels)) {
    if (levels_.size() < 2) throw std::invalid_argument("LevelSystem: need at least a_0 and a_1");
    if (!levels_.front().is_zero()) throw std::invalid_argument("LevelSystem: a_0 must be 0");
    for (std::size_t i = 1; i < levels_.size(); ++i)
        if (!(levels_[i - 1] < levels_[i])) throw std::invalid_argument("LevelSystem: levels must strictly increase");
    const std::size_t max_top = walk_ == Walk::ReflectedBM1D ? 3 : 4;
    if (top() > max_top)
        throw std::invalid_argument("LevelSystem: at most " + std::to_string(max_top) + " levels above 0 for the " +
                                    walk_name(walk_) + " walk");
}

std::string to_string(const PhiMove& mv) {
    std::string s = std::to_string(mv.from) + "->" + std::to_string(mv.to);
    if (mv.taboo) s += "|!" + std::to_string(*mv.taboo);
    return s;
}

PowerSeries sinh_ratio(const Rational& alpha, const Rational& beta, std::size_t order) {
    if (beta.sign() <= 0 || alpha.sign() < 0) throw std::invalid_argument("sinh_ratio: need beta > 0 and alpha >= 0");
    const PowerSeries num = shift_factor(kernel(KernelKind::Sinh, alpha, order + 1, "w"), 1);
    const PowerSeries den = shift_factor(kernel(KernelKind::Sinh, beta, order + 1, "w"), 1);
    return ps_div(num, den);
}

namespace {

void check_move(const LevelSystem& sys, const PhiMove& mv) {
    const std::size_t n = sys.levels().size();
    const auto bad = [&](const std::string& why) {
        return std::invalid_argument("phi: inconsistent move " + to_string(mv) + ": " + why);
    };
    if (mv.from >= n || mv.to >= n || (mv.taboo && *mv.taboo >= n)) throw bad("level index out of range");
    if (mv.from == mv.to) throw bad("start equals target");
    if (!mv.taboo) {
        if (mv.to < mv.from) throw bad("unrestricted moves must go outward");
        return;
    }
    const std::size_t t = *mv.taboo;
    const auto dist = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
    if (dist(mv.from, mv.to) != 1 || dist(mv.from, t) != 1 || t == mv.to)
        throw bad("target and taboo must be the two neighbours of the start");
}

}  // namespace

PowerSeries phi(const LevelSystem& sys, const PhiMove& mv, std::size_t order, BesselPrefactor prefactor) {
    check_move(sys, mv);
    const Rational& start = sys.level(mv.from);
    const Rational& target = sys.level(mv.to);
    const bool bessel = sys.walk() == Walk::Bessel3D;

    if (!mv.taboo) {
        if (!bessel) {
            // cosh(a w) / cosh(b w)
            return ps_div(kernel(KernelKind::Cosh, start, order, "w"), kernel(KernelKind::Cosh, target, order, "w"));
        }
        // b sinh(a w) / (a sinh(b w)); the a -> 0 limit is b w / sinh(b w).
        const PowerSeries den = shift_factor(kernel(KernelKind::Sinh, target, order + 1, "w"), 1);
        if (start.is_zero()) return ps_div(PowerSeries::constant(target, order, "w"), den);
        const PowerSeries num = shift_factor(kernel(KernelKind::Sinh, start, order + 1, "w"), 1);
        return ps_scale(ps_div(num, den), target / start);
    }

    const Rational& taboo = sys.level(*mv.taboo);
    const bool upward = target > start;
    // Reflected walk: sinh(|start - taboo| w) / sinh(|target - taboo| w).
    PowerSeries ratio = upward ? sinh_ratio(start - taboo, target - taboo, order)
                               : sinh_ratio(taboo - start, taboo - target, order);
    if (!bessel) return ratio;

    Rational factor = target / start;
    if (!upward && prefactor == BesselPrefactor::PrintedTabooFactor) factor = target / taboo;
    return ps_scale(ratio, factor);
}

ChainPlan chain_plan(const LevelSystem& sys) {
    using M = PhiMove;
    ChainPlan plan;
    switch (sys.top()) {
        case 1:
            plan.forward = {M{0, 1, {}}};
            break;
        case 2:
            plan.forward = {M{0, 1, {}}, M{1, 2, 0}};
            plan.loops = {{M{0, 1, {}}, M{1, 0, 2}}};
            break;
        case 3:
            // Loops based at a_1: down to the origin and back, up to a_2 and back.
            plan.forward = {M{0, 1, {}}, M{1, 2, 0}, M{2, 3, 1}};
            plan.loops = {{M{0, 1, {}}, M{1, 0, 2}}, {M{1, 2, 0}, M{2, 1, 3}}};
            break;
        case 4:
            // Bessel only: the origin is transient, so the loops are based at a_2.
            plan.forward = {M{0, 1, {}}, M{1, 2, 0}, M{2, 3, 1}, M{3, 4, 2}};
            plan.loops = {{M{1, 2, 0}, M{2, 1, 3}}, {M{2, 3, 1}, M{3, 2, 4}}};
            break;
        default:
            throw std::invalid_argument("chain_plan: unsupported number of levels");
    }
    return plan;
}

std::vector<PowerSeries> loop_kernels(const LevelSystem& sys, std::size_t order, BesselPrefactor prefactor) {
    std::vector<PowerSeries> out;
    for (const auto& [a, b] : chain_plan(sys).loops)
        out.push_back(ps_mul(phi(sys, a, order, prefactor), phi(sys, b, order, prefactor)));
    return out;
}

PowerSeries chain_mgf(const LevelSystem& sys, std::size_t order, BesselPrefactor prefactor) {
    const ChainPlan plan = chain_plan(sys);
    PowerSeries acc = PowerSeries::constant(1, order, "w");
    for (const auto& mv : plan.forward) acc = ps_mul(acc, phi(sys, mv, order, prefactor));
    PowerSeries loops(order, "w");
    for (const auto& kernel_series : loop_kernels(sys, order, prefactor)) loops = ps_add(loops, kernel_series);
    return ps_mul(acc, geometric_resum(loops));
}

PowerSeries direct_mgf(const LevelSystem& sys, std::size_t order) {
    const Rational& top = sys.level(sys.top());
    if (sys.walk() == Walk::ReflectedBM1D) return kernel(KernelKind::Sech, top, order, "w");
    return ps_div(PowerSeries::constant(1, order, "w"), kernel(KernelKind::SinhOverArg, top, order, "w"));
}

Rational decomposition_residual(const LevelSystem& sys, std::size_t order, BesselPrefactor prefactor) {
    return max_abs_diff(chain_mgf(sys, order, prefactor), direct_mgf(sys, order));
}

}  // namespace umbra
