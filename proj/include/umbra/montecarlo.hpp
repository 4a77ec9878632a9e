#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include <json.hpp>

#include "umbra/loopcalc.hpp"

namespace umbra {

/// Philox4x32-10 counter-based generator.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(Key key) : key_(key) {}
    Counter operator()(Counter ctr) const;

private:
    Key key_;
};

/// Standard normals for one path: block b of path p is Philox(seed)((b, p)),
/// each block gives four 32-bit words mapped to 2 (word + 1/2) / 2^32 - 1,
/// and consecutive pairs go through the Marsaglia polar method. Rejected
/// pairs are skipped; blocks are drawn until four normals are buffered.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path_index);
    double next();

private:
    void refill();

    Philox4x32 gen_;
    std::uint64_t path_;
    std::uint64_t block_ = 0;
    std::array<double, 4> buf_{};
    int pos_ = 4;
};

struct WalkConfig {
    Walk walk = Walk::ReflectedBM1D;
    double start = 0.0;
    double target = 1.0;
    std::optional<double> taboo;
    double z = 0.5;
    double dt = 1e-4;
    std::uint64_t paths = 100000;
    std::uint64_t seed = 20240601;
    double t_max = 50.0;
    /// 0 means one per hardware thread. Never changes the result.
    unsigned workers = 0;
};

struct HittingEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n_hit_target = 0;
    std::uint64_t n_hit_taboo = 0;
    std::uint64_t n_censored = 0;
};

/// Throws std::invalid_argument for an inconsistent config.
void validate(const WalkConfig& cfg);

/// Untabooed run; cfg.taboo must be empty.
HittingEstimate simulate_hit(const WalkConfig& cfg);
/// Taboo run; cfg.taboo must lie on the other side of the start.
HittingEstimate simulate_taboo(const WalkConfig& cfg);
/// Dispatches on whether a taboo is set.
HittingEstimate simulate(const WalkConfig& cfg);

/// Closed-form transform at w = sqrt(2z), in overflow-safe exponential form.
double eval_phi_numeric(Walk walk, double start, double target, std::optional<double> taboo, double z);
double eval_phi_numeric(const LevelSystem& sys, const PhiMove& move, double z);

struct ComparisonReport {
    double reference = 0.0;
    double z_score = 0.0;
    double rel_err = 0.0;
    bool pass = false;
};

/// pass iff |z_score| <= 4 or rel_err <= 0.02. Throws if std_error <= 0.
ComparisonReport compare_closed_form(const HittingEstimate& est, double reference);

nlohmann::json to_json(const WalkConfig& cfg);
nlohmann::json to_json(const HittingEstimate& est);
nlohmann::json to_json(const ComparisonReport& cmp);

}  // namespace umbra
