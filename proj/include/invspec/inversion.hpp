#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "invspec/base.hpp"
#include "invspec/forward.hpp"
#include "invspec/schwarz.hpp"

namespace invspec {
namespace inversion {

using rational::ExponentialSum;
using rational::RationalFn;

// Spectral data feeding the spectral-measure backend: amplitude of the Jost
// function, eigenvalues, and the spectral norming constants.
struct GLData {
  bool dirichlet = false;
  std::optional<RationalFn> amp2; // exact |F|^2
  std::vector<double> grid;       // sampled alternative
  std::vector<double> absF;
  std::vector<double> kappa;
  std::vector<double> gl;
};

// Scattering data for the half-line scattering backend.
struct MarchenkoData {
  bool dirichlet = false;
  std::optional<RationalFn> S; // exact scattering function
  std::vector<double> grid;    // sampled alternative (symmetric grid)
  std::vector<cplx> Svals;
  std::vector<double> kappa;
  std::vector<double> m;
};

// Full-line scattering data of the potential extended by zero to x < 0.
struct FullLineData {
  std::optional<RationalFn> L, T, R;
  std::vector<double> grid; // sampled alternative
  std::vector<cplx> Lvals, Tvals, Rvals;
  std::vector<double> tau;   // full-line bound states, ascending
  std::vector<double> cl, cr;
  std::vector<double> gamma; // dependency constants, signs (-1)^(N-j)
};

// Solved translation kernel: diagonal trace on a uniform lattice plus an
// evaluator that vanishes on the unsupported triangle.
struct KernelSolve {
  std::vector<double> xGrid;
  std::vector<double> diagonal;
  std::function<double(double, double)> eval;
};

struct GLOutput {
  KernelSolve kernel;
  forward::Potential V;
  double cotAlphaOut = 0.0; // meaningful for the non-Dirichlet kernel only
};

struct MarchenkoOutput {
  KernelSolve kernel;
  forward::Potential V;
};

// Spectral-measure kernel value at (x, y).
double gl_kernel(const GLData& d, double x, double y);

// Per-x dense solve of the spectral-measure equation on [0, x] (midpoint
// rule, growing bordered inverse in extended precision); the potential is
// twice the diagonal derivative and cot(alpha) = -A(0,0).
GLOutput gl_solve(const GLData& d, const std::vector<double>& xGrid);

// Scattering kernel value at y > 0.
double marchenko_kernel(const MarchenkoData& d, double y);

// Scattering-data inversion: exact n x n separable solve per x when the
// kernel is an exponential sum, shrinking-domain dense solve otherwise.
MarchenkoOutput marchenko_solve(const MarchenkoData& d, const std::vector<double>& xGrid);

// Full-line data from a recovered pair (the alpha slot carries the Dirichlet
// function when alphaDirichlet is set).
FullLineData build_full_line(const schwarz::JostFn& Falpha, const schwarz::JostFn& Fbeta,
                             bool alphaDirichlet, double cotAlpha, double cotBeta);

struct FaddeevOutput {
  forward::Potential V;                 // x >= 0
  std::vector<double> xNegative;        // probe lattice on x < 0
  std::vector<double> vNegative;        // recovered values there (should be ~0)
};

// Left Faddeev-Marchenko inversion for x >= 0 plus the right-equation probe
// of the zero extension on x < 0.
FaddeevOutput faddeev_marchenko_solve(const FullLineData& fl, const std::vector<double>& xGrid);

} // namespace inversion
} // namespace invspec
