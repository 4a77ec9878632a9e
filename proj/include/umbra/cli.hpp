#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "umbra/identities.hpp"
#include "umbra/montecarlo.hpp"
#include "umbra/rational.hpp"
#include "umbra/umbral.hpp"

namespace umbra::cli {

enum class Kind { Poly, Numbers, Weights, Series, Verify, VerifyAll, Simulate, Quadrature };

const char* kind_name(Kind k);

/// Raised by parse_args; `code` is the process exit code (2 for usage
/// errors, 0 for --help).
struct CliExit : std::runtime_error {
    CliExit(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
    int code;
};

struct SeriesRequest {
    std::string kernel;  // empty unless --kernel
    Rational scale = 1;
    std::optional<Walk> walk;
    std::vector<Rational> levels;  // including the leading 0
    std::string move;              // "i->j" or "i->j|!k"
    std::string mgf;               // "chain" or "direct"
};

struct Command {
    Kind kind = Kind::Poly;
    std::size_t order = 48;  // global series capacity

    // poly / quadrature
    Family family = Family::Bernoulli;
    int n = 0;
    unsigned p = 1;  // poly: higher order
    std::optional<Rational> x;

    // numbers
    bool euler_numbers = false;
    int upto = 0;

    // weights
    unsigned N = 1;
    std::size_t count = 0;

    SeriesRequest series;

    // verify / verify-all
    IdentityId id = IdentityId::EULER_CHEB;
    IdentityParams params;
    TruncationPolicy policy;
    unsigned jobs = 0;

    // simulate
    WalkConfig walk;

    // quadrature
    double check_tol = 1e-8;
};

/// argv[0] is the program name. Throws CliExit on usage errors.
Command parse_args(int argc, const char* const* argv);
Command parse_args(const std::vector<std::string>& args);

/// Runs the command; returns 0 when every check passed, 1 otherwise, 2 on
/// invalid input detected while executing.
int execute(const Command& cmd, std::ostream& out, std::ostream& err);

/// parse_args + execute with usage errors reported on err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct MatrixEntry {
    IdentityId id;
    IdentityParams params;
    Status expected;
};

/// Cases run by verify-all: the VERIFIED-expected matrix and the stated audits.
std::vector<MatrixEntry> verify_all_matrix();

/// "i->j" or "i->j|!k"; throws std::invalid_argument.
PhiMove parse_move(const std::string& text);

}  // namespace umbra::cli
