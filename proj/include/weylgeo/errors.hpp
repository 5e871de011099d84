#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace weylgeo {

// Syntax error while parsing an expression. `offset` is the byte offset of
// the first offending character; `expected` describes the token set that
// would have been accepted there.
struct ParseError : std::runtime_error {
    std::size_t offset;
    std::string expected;
    ParseError(std::size_t off, const std::string& msg, std::string exp = {})
        : std::runtime_error(msg + " (offset " + std::to_string(off) + ")"),
          offset(off), expected(std::move(exp)) {}
};

// Evaluation stepped outside the domain of a function (log of a non-positive
// value, division by zero, ...). `where` holds the printed subexpression.
struct EvalDomainError : std::runtime_error {
    std::string where;
    EvalDomainError(const std::string& msg, std::string w)
        : std::runtime_error(msg + " in `" + w + "`"), where(std::move(w)) {}
};

// Geometric precondition violated at a point (non-SPD metric, incompatible
// almost-complex structure, rank-deficient jet, ...).
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario / configuration problems.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flow aborted: residual blow-up or monotonicity violation.
struct FlowDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Index counting refused: a zero locus is not isolated at grid resolution.
struct DegenerateZeroLocus : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace weylgeo
