#pragma once

#include <optional>
#include <vector>

#include "invspec/base.hpp"
#include "invspec/polynomial.hpp"

namespace invspec {
namespace rational {

// Complex rational function in reduced zero/pole/gain form. This is the exact
// carrier for Jost functions and scattering coefficients whenever the input
// data is rational, so the whole reconstruction pipeline can run in closed
// form against it.
struct RationalFn {
  std::vector<cplx> zeros;
  std::vector<cplx> poles;
  cplx gain{1.0};

  cplx operator()(cplx k) const;
};

// Distance below which a zero and a pole are identified and cancelled.
inline constexpr double coincidence_tol = 1e-7;

RationalFn constant(cplx c);
RationalFn monomial();                 // k
RationalFn from_ratio(const Polynomial& num, const Polynomial& den);

Polynomial numerator(const RationalFn& r);
Polynomial denominator(const RationalFn& r);

cplx eval(const RationalFn& r, cplx k);

RationalFn add(const RationalFn& a, const RationalFn& b);
RationalFn sub(const RationalFn& a, const RationalFn& b);
RationalFn mul(const RationalFn& a, const RationalFn& b);
RationalFn div(const RationalFn& a, const RationalFn& b);
RationalFn scale(const RationalFn& a, cplx s);
RationalFn add_const(const RationalFn& a, cplx c);
RationalFn derivative(const RationalFn& a);

// r(-k)
RationalFn reflect(const RationalFn& a);
// Function with conjugated parameters; on the real axis it equals conj(r(k)).
RationalFn conj_params(const RationalFn& a);
// |r(k)|^2 on the real axis as a rational function of k.
RationalFn abs_squared(const RationalFn& a);

// Hermitian symmetry conj(r(-conj k)) == s * r(k) on a real-axis probe grid.
// Dirichlet-class Jost functions carry s = +1; the -i prefactor of the
// mixed-class definition flips it to s = -1. Returns +1, -1 or 0 (neither).
int hermitian_symmetry_sign(const RationalFn& a, double tol = 1e-10);
inline bool is_hermitian(const RationalFn& a, double tol = 1e-10) {
  return hermitian_symmetry_sign(a, tol) == 1;
}

// deg(num) - deg(den)
int relative_degree(const RationalFn& a);

cplx residue(const RationalFn& r, cplx p);

// Coefficients c_0..c_maxOrder of the expansion r(k) = c_0 + c_1/k + c_2/k^2 + ...
// Requires deg(num) <= deg(den) and simple poles.
std::vector<cplx> asymptotic_coefficients(const RationalFn& r, int maxOrder);

enum class AmplitudeClass {
  Mixed,     // |F| ~ |k| at infinity (boundary condition with alpha < pi)
  Dirichlet, // |F| ~ 1 at infinity
};

// Analytic spectral factor of a given modulus-squared function: returns F with
// no poles in the closed upper half-plane, upper zeros exactly {i*kappa_j},
// |F|^2 = amp2 on the real axis and the asymptotic normalization of its class.
RationalFn spectral_factor(const RationalFn& amp2, const std::vector<double>& boundStateZeros,
                           AmplitudeClass cls);

// Finite sum of decaying exponentials sum_i coeff_i * exp(-rate_i * y); every
// rate has strictly positive real part.
struct ExponentialSum {
  struct Term {
    cplx coeff;
    cplx rate;
  };
  std::vector<Term> terms;

  cplx operator()(double y) const;
  double real_at(double y) const;
  ExponentialSum derivative() const;
  // Drop numerically-zero terms and merge coincident rates.
  void compress(double tol = 1e-13);
};

// Half-line Fourier transform (1/2pi) * integral (r(k)-subtractConst) e^{iky} dk
// for y > 0, by closing the contour in the upper half-plane; the result is the
// residue sum as an exponential sum in y. r - subtractConst must decay at
// least like 1/k and have no real poles.
ExponentialSum fourier_half_line(const RationalFn& r, cplx subtractConst);

} // namespace rational
} // namespace invspec
