#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace livsic {

// Base for every domain error raised by the library. The CLI maps these to
// exit code 1; ParseError is the exception and maps to 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitian : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct Singular : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct ChannelTooSmall : Error { using Error::Error; };
struct ExternalMismatch : Error { using Error::Error; };
struct NotSimple : Error { using Error::Error; };
struct NotJContractive : Error { using Error::Error; };
struct HypothesisViolated : Error { using Error::Error; };
struct ConstraintViolation : Error { using Error::Error; };
struct NotNondecreasing : Error { using Error::Error; };
struct NotDissipative : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

struct NotInvariant : Error {
    NotInvariant(std::size_t idx, double res)
        : Error("subspace " + std::to_string(idx) + " is not invariant (residual " +
                std::to_string(res) + ")"),
          index(idx), residual(res) {}
    std::size_t index;
    double residual;
};

struct PoleAt : Error {
    explicit PoleAt(std::complex<double> p)
        : Error("pole at (" + std::to_string(p.real()) + ", " + std::to_string(p.imag()) + ")"),
          pole(p) {}
    std::complex<double> pole;
};

struct NoConvergence : Error {
    NoConvergence(int levels, double res)
        : Error("no convergence after " + std::to_string(levels) + " levels (residual " +
                std::to_string(res) + ")"),
          max_levels(levels), residual(res) {}
    int max_levels;
    double residual;
};

}  // namespace livsic
