#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "umbra/loopcalc.hpp"
#include "umbra/rational.hpp"

namespace umbra {

/// Declaration order is the canonical report order.
enum class IdentityId {
    EULER_CHEB,
    THREE_SITES_1D_STATED,
    THREE_SITES_1D_CORRECTED,
    FOUR_UNIFORM_1D,
    FOUR_GENERAL_1D,
    N3_GENERAL,
    N3_UNIFORM,
    EVEN_BERNOULLI,
    N4_UNIFORM_STATED,
    N4_UNIFORM_CORRECTED,
};

std::string_view to_string(IdentityId id);
std::optional<IdentityId> parse_identity(std::string_view name);
const std::vector<IdentityId>& all_identities();

struct IdentityParams {
    int n = 0;
    Rational x;
    /// a_1 < a_2 [< a_3] for the identities with free sites; the fixed-site
    /// identities accept either nothing or exactly their own sites.
    std::vector<Rational> levels;
    unsigned N = 1;  // Chebyshev index
    int m = 1;       // half-degree for the even Bernoulli expansion
};

struct TruncationPolicy {
    double tol = 1e-12;
    int stable_run = 4;
    int k_max = 512;
};

enum class Status { VERIFIED, RESIDUAL_NONZERO, DEGENERATE_TRIVIAL, NOT_CONVERGED };
std::string_view to_string(Status s);

struct IdentityReport {
    IdentityId id{};
    IdentityParams params;
    int K_used = 0;  // last summation index included
    Rational lhs_exact;
    Rational rhs_partial_exact;
    double residual = 0.0;
    bool converged = false;
    Status status = Status::NOT_CONVERGED;
    /// Exact chain-vs-closed-form check of the underlying w-series, when the
    /// identity comes from a level system.
    std::optional<bool> series_ground_truth;
    /// Nonzero term magnitudes strictly decrease beyond k = 32.
    bool monotone_tail = true;
};

struct CatalogEntry {
    IdentityId id;
    std::string description;
    std::string reference;
    std::string variant;  // "stated" or "corrected"
};

const std::vector<CatalogEntry>& catalog();

/// Throws std::invalid_argument when params are outside the identity's domain.
void validate(IdentityId id, const IdentityParams& params);

Rational eval_lhs(IdentityId id, const IdentityParams& params);
/// Single summand with index k (for EULER_CHEB, k = l - N).
Rational eval_term(IdentityId id, const IdentityParams& params, int k);
/// Sum of the summands k = 0..K.
Rational eval_rhs_partial(IdentityId id, const IdentityParams& params, int K);

/// Level system whose w-series identity underlies the expansion, if any.
std::optional<LevelSystem> ground_system(IdentityId id, const IdentityParams& params);

IdentityReport verify(IdentityId id, const IdentityParams& params, const TruncationPolicy& policy = {});

/// Tail-controlled summation shared by verify() and the errata audits.
struct SummationResult {
    int K_used = 0;
    Rational partial;
    bool converged = false;
    bool monotone_tail = true;
};
SummationResult sum_until_stable(const std::function<Rational(int)>& term, const Rational& lhs,
                                 const TruncationPolicy& policy);

nlohmann::json to_json(const IdentityReport& r);

/// Machine-generated audit of the printed forms against their re-derived
/// counterparts, built from actual residuals.
nlohmann::json errata_report(const TruncationPolicy& policy);

}  // namespace umbra
