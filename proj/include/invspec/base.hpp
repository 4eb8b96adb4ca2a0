#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace invspec {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx iu{0.0, 1.0};

// Recoverable failures carry a category so the CLI can map them to exit codes.

// Input data that is syntactically fine but cannot identify a unique answer
// (missing h or beta for a variant that needs it, parametric families).
class IdentifiabilityError : public std::runtime_error {
public:
  explicit IdentifiabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown: non-convergence, singular systems, unresolved roots,
// data inconsistent with any admissible potential.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed files, bad variants, missing fields.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace invspec
