#include "umbra/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace umbra {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::operator()(Counter c) const {
    Key k = key_;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kW0;
            k[1] += kW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t path_index)
    : gen_({static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}), path_(path_index) {}

void NormalStream::refill() {
    // Marsaglia polar method; each accepted pair of words yields two normals.
    constexpr double inv32 = 1.0 / 4294967296.0;
    int filled = 0;
    while (filled < 4) {
        const auto w = gen_({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                             static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32)});
        ++block_;
        for (int i = 0; i < 4 && filled < 4; i += 2) {
            const double u = 2.0 * ((w[i] + 0.5) * inv32) - 1.0;
            const double v = 2.0 * ((w[i + 1] + 0.5) * inv32) - 1.0;
            const double s = u * u + v * v;
            if (s >= 1.0) continue;
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            buf_[filled++] = u * f;
            buf_[filled++] = v * f;
        }
    }
    pos_ = 0;
}

double NormalStream::next() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
}

void validate(const WalkConfig& c) {
    const auto bad = [](const std::string& why) { return std::invalid_argument("WalkConfig: " + why); };
    if (!(c.dt > 0)) throw bad("dt must be positive");
    if (c.paths < 1) throw bad("paths must be at least 1");
    if (!(c.z > 0)) throw bad("z must be positive");
    if (!(c.t_max > 0)) throw bad("t_max must be positive");
    if (!(c.start >= 0) || !(c.target >= 0)) throw bad("levels must be nonnegative");
    if (c.start == c.target) throw bad("start equals target");
    if (!c.taboo) {
        if (c.target < c.start) throw bad("without a taboo the target must lie above the start");
        return;
    }
    const double t = *c.taboo;
    if (!(t >= 0)) throw bad("taboo must be nonnegative");
    if ((c.target - c.start) * (t - c.start) >= 0) throw bad("start must lie strictly between target and taboo");
}

namespace {

enum Outcome : std::uint8_t { Target, Taboo, Censored };

struct PathResult {
    double value;
    Outcome outcome;
};

/// Crossing of level L given the pre-reflection 1-D value y (or the radius).
inline bool crossed(double y, double level, bool from_below) { return from_below ? std::abs(y) >= level : y <= level; }

PathResult run_path(const WalkConfig& c, std::uint64_t index, std::uint64_t max_steps) {
    NormalStream normals(c.seed, index);
    const double sdt = std::sqrt(c.dt);
    const bool target_above = c.target > c.start;
    const bool has_taboo = c.taboo.has_value();
    const double taboo = has_taboo ? *c.taboo : 0.0;
    const double censored = std::exp(-c.z * c.t_max);

    if (c.walk == Walk::ReflectedBM1D) {
        double x = c.start;
        for (std::uint64_t i = 1; i <= max_steps; ++i) {
            const double y = x + sdt * normals.next();
            if (crossed(y, c.target, target_above)) return {std::exp(-c.z * (i * c.dt)), Target};
            if (has_taboo && crossed(y, taboo, !target_above)) return {0.0, Taboo};
            x = std::abs(y);
        }
        return {censored, Censored};
    }

    double v0 = c.start, v1 = 0.0, v2 = 0.0;
    for (std::uint64_t i = 1; i <= max_steps; ++i) {
        v0 += sdt * normals.next();
        v1 += sdt * normals.next();
        v2 += sdt * normals.next();
        const double r = std::sqrt(v0 * v0 + v1 * v1 + v2 * v2);
        if (crossed(r, c.target, target_above)) return {std::exp(-c.z * (i * c.dt)), Target};
        if (has_taboo && crossed(r, taboo, !target_above)) return {0.0, Taboo};
    }
    return {censored, Censored};
}

HittingEstimate run(const WalkConfig& c) {
    validate(c);
    const auto max_steps = static_cast<std::uint64_t>(std::ceil(c.t_max / c.dt));
    std::vector<PathResult> results(c.paths);

    unsigned workers = c.workers ? c.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, c.paths));
    auto body = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t p = lo; p < hi; ++p) results[p] = run_path(c, p, max_steps);
    };
    if (workers <= 1) {
        body(0, c.paths);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (c.paths + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t lo = w * chunk, hi = std::min(c.paths, lo + chunk);
            if (lo < hi) pool.emplace_back(body, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    // Sequential fold in path order keeps the numbers independent of scheduling.
    HittingEstimate est;
    double sum = 0.0;
    for (const auto& r : results) {
        sum += r.value;
        if (r.outcome == Target) ++est.n_hit_target;
        else if (r.outcome == Taboo) ++est.n_hit_taboo;
        else ++est.n_censored;
    }
    const double n = static_cast<double>(c.paths);
    est.mean = sum / n;
    if (c.paths > 1) {
        double ss = 0.0;
        for (const auto& r : results) ss += (r.value - est.mean) * (r.value - est.mean);
        est.std_error = std::sqrt(ss / (n - 1) / n);
    }
    return est;
}

/// sinh(a w) / sinh(b w) for 0 <= a, 0 < b.
double sinh_ratio_num(double a, double b, double w) {
    return std::exp((a - b) * w) * -std::expm1(-2 * a * w) / -std::expm1(-2 * b * w);
}

}  // namespace

HittingEstimate simulate_hit(const WalkConfig& cfg) {
    if (cfg.taboo) throw std::invalid_argument("simulate_hit: taboo must not be set");
    return run(cfg);
}

HittingEstimate simulate_taboo(const WalkConfig& cfg) {
    if (!cfg.taboo) throw std::invalid_argument("simulate_taboo: taboo level required");
    return run(cfg);
}

HittingEstimate simulate(const WalkConfig& cfg) { return run(cfg); }

double eval_phi_numeric(Walk walk, double start, double target, std::optional<double> taboo, double z) {
    if (!(z > 0)) throw std::invalid_argument("eval_phi_numeric: z must be positive");
    if (!(start >= 0) || !(target >= 0) || start == target)
        throw std::invalid_argument("eval_phi_numeric: need distinct nonnegative levels");
    const double w = std::sqrt(2 * z);
    const bool bessel = walk == Walk::Bessel3D;
    if (!taboo) {
        if (target < start) throw std::invalid_argument("eval_phi_numeric: untabooed moves go outward");
        if (!bessel)  // cosh(a w) / cosh(b w)
            return std::exp((start - target) * w) * (1 + std::exp(-2 * start * w)) / (1 + std::exp(-2 * target * w));
        if (start == 0) return 2 * target * w * std::exp(-target * w) / -std::expm1(-2 * target * w);
        return target / start * sinh_ratio_num(start, target, w);
    }
    const double t = *taboo;
    if ((target - start) * (t - start) >= 0)
        throw std::invalid_argument("eval_phi_numeric: start must lie strictly between target and taboo");
    const double ratio = sinh_ratio_num(std::abs(start - t), std::abs(target - t), w);
    return bessel ? target / start * ratio : ratio;
}

double eval_phi_numeric(const LevelSystem& sys, const PhiMove& move, double z) {
    const auto lv = [&](std::size_t i) { return sys.level(i).to_double(); };
    std::optional<double> taboo;
    if (move.taboo) taboo = lv(*move.taboo);
    return eval_phi_numeric(sys.walk(), lv(move.from), lv(move.to), taboo, z);
}

ComparisonReport compare_closed_form(const HittingEstimate& est, double reference) {
    if (!(est.std_error > 0)) throw std::invalid_argument("compare_closed_form: std_error must be positive");
    ComparisonReport r;
    r.reference = reference;
    r.z_score = (est.mean - reference) / est.std_error;
    r.rel_err = reference != 0 ? std::abs(est.mean - reference) / std::abs(reference) : std::abs(est.mean);
    r.pass = std::abs(r.z_score) <= 4 || r.rel_err <= 0.02;
    return r;
}

nlohmann::json to_json(const WalkConfig& c) {
    nlohmann::json j{{"walk", walk_name(c.walk)}, {"start", c.start}, {"target", c.target},
                     {"z", c.z},                  {"dt", c.dt},       {"paths", c.paths},
                     {"seed", c.seed},            {"t_max", c.t_max}};
    j["taboo"] = c.taboo ? nlohmann::json(*c.taboo) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const HittingEstimate& e) {
    return {{"mean", e.mean},
            {"stderr", e.std_error},
            {"n_hit_target", e.n_hit_target},
            {"n_hit_taboo", e.n_hit_taboo},
            {"n_censored", e.n_censored}};
}

nlohmann::json to_json(const ComparisonReport& c) {
    return {{"reference", c.reference}, {"z_score", c.z_score}, {"rel_err", c.rel_err}, {"pass", c.pass}};
}

}  // namespace umbra
