#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "umbra/rational.hpp"
#include "umbra/series.hpp"

namespace umbra {

enum class Walk { ReflectedBM1D, Bessel3D };

const char* walk_name(Walk w);

/// Walk kind and sites 0 = a_0 < a_1 < ... < a_N. N is at most 3 for the
/// reflected walk and at most 4 for the Bessel process, whose origin is
/// never revisited.
class LevelSystem {
public:
    LevelSystem(Walk walk, std::vector<Rational> levels);

    Walk walk() const { return walk_; }
    const std::vector<Rational>& levels() const { return levels_; }
    std::size_t top() const { return levels_.size() - 1; }
    const Rational& level(std::size_t i) const { return levels_.at(i); }

private:
    Walk walk_;
    std::vector<Rational> levels_;
};

/// Move between level indices, optionally forbidding the adjacent level on
/// the other side of the start.
struct PhiMove {
    std::size_t from = 0;
    std::size_t to = 1;
    std::optional<std::size_t> taboo;
};

std::string to_string(const PhiMove& mv);

/// Radial prefactor of the Bessel taboo transforms. TargetOverStart is the
/// one consistent with the closed forms; PrintedTabooFactor reproduces the
/// a/c factor of the downward formula as printed, for the errata audit.
enum class BesselPrefactor { TargetOverStart, PrintedTabooFactor };

/// Laplace transform of the hitting time as a series in w = sqrt(2z).
PowerSeries phi(const LevelSystem& sys, const PhiMove& mv, std::size_t order,
                BesselPrefactor prefactor = BesselPrefactor::TargetOverStart);

/// Forward moves and loop pairs whose resummation gives 0 -> a_N.
struct ChainPlan {
    std::vector<PhiMove> forward;
    std::vector<std::pair<PhiMove, PhiMove>> loops;
};

ChainPlan chain_plan(const LevelSystem& sys);

/// Each loop kernel I = phi(first) * phi(second) of the plan.
std::vector<PowerSeries> loop_kernels(const LevelSystem& sys, std::size_t order,
                                      BesselPrefactor prefactor = BesselPrefactor::TargetOverStart);

/// prod(forward phis) * geometric_resum(sum of loop kernels).
PowerSeries chain_mgf(const LevelSystem& sys, std::size_t order,
                      BesselPrefactor prefactor = BesselPrefactor::TargetOverStart);

/// Closed form for 0 -> a_N: sech(a_N w), or a_N w / sinh(a_N w) for Bessel.
PowerSeries direct_mgf(const LevelSystem& sys, std::size_t order);

/// max_i |chain_i - direct_i|; zero whenever the decomposition is exact.
Rational decomposition_residual(const LevelSystem& sys, std::size_t order,
                                BesselPrefactor prefactor = BesselPrefactor::TargetOverStart);

/// sinh(alpha w) / sinh(beta w) for beta > 0, alpha >= 0.
PowerSeries sinh_ratio(const Rational& alpha, const Rational& beta, std::size_t order);

}  // namespace umbra
