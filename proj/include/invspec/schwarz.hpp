#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "invspec/base.hpp"
#include "invspec/quadrature.hpp"
#include "invspec/rational.hpp"

namespace invspec {
namespace schwarz {

using rational::AmplitudeClass;
using rational::RationalFn;

// Boundary data of a function analytic in the upper half-plane: the real part
// sampled on a symmetric k-grid, a fitted decay model for the tails, and an
// optional exact rational form used as a fast path.
struct HalfPlaneFn {
  std::vector<double> grid;
  std::vector<double> re;
  quad::TailModel tail;
  std::optional<RationalFn> rationalForm;

  static HalfPlaneFn from_samples(std::vector<double> grid, std::vector<double> re);
  static HalfPlaneFn from_rational(const RationalFn& r, std::vector<double> grid);
};

// Default construction grid: 4096 points, |k| <= 200, graded toward 0.
std::vector<double> default_grid();

// Imaginary part on the grid from the real part: -(1/pi) PV int re(t)/(t-k) dt.
std::vector<double> hilbert_transform(const HalfPlaneFn& re);

// The analytic extension (1/(pi i)) int re(t)/(t-k) dt for Im k > 0.
cplx schwarz_extend(const HalfPlaneFn& re, cplx k);

// Exact Schwarz transform of a decaying rational real part.
RationalFn rational_schwarz(const RationalFn& re);

// Amplitude |F| data, either exact (|F|^2 rational in k) or sampled.
struct AmplitudeData {
  bool isRational = true;
  RationalFn amp2;
  std::vector<double> grid;
  std::vector<double> absF;
  AmplitudeClass cls = AmplitudeClass::Dirichlet;

  static AmplitudeData from_rational(RationalFn amp2, AmplitudeClass cls);
  static AmplitudeData from_samples(std::vector<double> grid, std::vector<double> absF,
                                    AmplitudeClass cls);
};

// A Jost function on the closed upper half-plane: exact rational form when
// available, otherwise grid values on the real axis plus an analytic
// continuation callable.
struct JostFn {
  std::optional<RationalFn> rationalForm;
  std::function<cplx(cplx)> continuation;
  std::vector<double> grid;
  std::vector<cplx> gridValues;

  cplx operator()(cplx k) const;
};

// Builds F from its amplitude and upper zeros {i kappa_j}: Blaschke product
// times the outer function of the amplitude, normalized per class. Rational
// amplitudes take the exact factorization path.
JostFn reconstruct_jost(const AmplitudeData& amp, const std::vector<double>& kappas,
                        const std::vector<double>& grid = default_grid());

// Coefficient c_order of the expansion g = c_0 + c_1/k + c_2/k^2 + ... by
// Richardson extrapolation along the ray k = |k| e^{i pi/4}, sampled at
// baseRadius * {1,2,4,8,16}. The base radius must clear the support of any
// grid data feeding g.
cplx nontangential_limit(const std::function<cplx(cplx)>& g, int order,
                         double baseRadius = 300.0);

} // namespace schwarz
} // namespace invspec
