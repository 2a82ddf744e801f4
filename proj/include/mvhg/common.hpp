#ifndef MVHG_COMMON_HPP
#define MVHG_COMMON_HPP

#include <stdexcept>
#include <string>

namespace mvhg {

inline constexpr const char* version_string = "0.1.0";

// Error taxonomy shared by the whole library. Everything derives from
// mvhg::Error so callers can catch one type at the CLI boundary.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A parameter violates a stated bound. The message names the bound.
struct DomainError : Error {
    using Error::Error;
};

// A lower series parameter produced a vanishing Pochhammer against a
// nonzero numerator.
struct PoleError : Error {
    using Error::Error;
};

// A series left its convergence domain, or the divergence guard tripped.
struct DivergenceError : Error {
    using Error::Error;
};

// A table or policy ceiling was exceeded.
struct ResourceError : Error {
    using Error::Error;
};

// Matrix shapes do not conform.
struct DimensionError : Error {
    using Error::Error;
};

// A matrix that must be symmetric positive definite is not.
struct NotSpdError : Error {
    double smallest_eigenvalue;
    NotSpdError(const std::string& msg, double lambda_min)
        : Error(msg), smallest_eigenvalue(lambda_min) {}
};

// Bad CLI arguments or spec-file contents.
struct ConfigError : Error {
    using Error::Error;
};

// A partition is not covered by the table it was looked up in.
struct LookupError : Error {
    using Error::Error;
};

// A quadrature or Monte-Carlo oracle failed to converge.
struct OracleError : Error {
    using Error::Error;
};

}  // namespace mvhg

#endif
