#pragma once

#include <functional>
#include <vector>

#include "invspec/base.hpp"

namespace invspec {
namespace forward {

// Half-line potential in one of three representations. Values are real and
// the first moment int (1+x)|V| dx is finite.
class Potential {
public:
  enum class Kind { Sampled, ExpSum, Table };

  static Potential zero();
  // Piecewise-linear interpolation of samples, zero beyond the last node.
  static Potential sampled(std::vector<double> x, std::vector<double> v);
  // V(x) = -2 (log Gamma)'' with Gamma(x) = sum_i c_i e^{-r_i x}; this is the
  // closed form the degenerate-kernel solvers produce.
  static Potential exp_sum(std::vector<double> coeff, std::vector<double> rate);
  // Arbitrary callable with known support bound; `jumps` lists discontinuities
  // the integrator must not step across.
  static Potential table(std::function<double(double)> f, double xmax,
                         std::vector<double> jumps = {});

  double operator()(double x) const;
  Kind kind() const { return kind_; }
  double xmax() const { return xmax_; }
  const std::vector<double>& jumps() const { return jumps_; }
  double first_moment() const { return firstMoment_; }
  double sup_abs() const { return supAbs_; }

  const std::vector<double>& sample_x() const { return x_; }
  const std::vector<double>& sample_v() const { return v_; }
  const std::vector<double>& gamma_coeff() const { return gammaCoeff_; }
  const std::vector<double>& gamma_rate() const { return gammaRate_; }

private:
  void finalize_moments();

  Kind kind_ = Kind::Table;
  std::vector<double> x_, v_;
  std::vector<double> gammaCoeff_, gammaRate_;
  std::function<double(double)> table_;
  std::vector<double> jumps_;
  double xmax_ = 30.0;
  double firstMoment_ = 0.0;
  double supAbs_ = 0.0;
};

struct BoundaryCondition {
  double alpha = pi;     // in (0, pi]
  double cotAlpha = 0.0; // meaningless when dirichlet
  bool dirichlet = true;

  static BoundaryCondition from_alpha(double a);
  static BoundaryCondition from_cot(double c);
  static BoundaryCondition dirichlet_bc();
};

// Jost solution data at the origin.
struct JostBoundaryData {
  cplx f0;
  cplx fp0;
  cplx k;
};

struct SpectralSet {
  std::vector<double> eigenvalues; // kappa_j, ascending
  std::vector<double> glNorming;
  std::vector<double> mNorming;
};

// Integrates the halfline equation from beyond the support inward with the
// outgoing normalization f ~ e^{ikx}; requires Im k >= 0.
JostBoundaryData integrate_jost(const Potential& V, cplx k, double xmax = 0.0);

cplx jost_function(const Potential& V, const BoundaryCondition& bc, cplx k);

// All kappa in (0, kappaMax) where the Jost function vanishes at i*kappa,
// by sign scan and bisection of the real-valued restriction to the imaginary
// axis. Throws if a doubled grid changes the count (unresolved zeros).
std::vector<double> eigenvalues(const Potential& V, const BoundaryCondition& bc, double kappaMax);

// Upper bound for the eigenvalue scan, from the potential depth and the
// boundary parameter.
double default_kappa_max(const Potential& V, const BoundaryCondition& bc);

// Norming constants computed by direct quadrature of the bound-state Jost
// solution, cross-checked against the k-derivative formula for the norm.
SpectralSet norming_constants(const Potential& V, const BoundaryCondition& bc,
                              const std::vector<double>& kappas);

cplx scattering_matrix(const Potential& V, const BoundaryCondition& bc, double k);

struct FullLineCoefficients {
  std::function<cplx(double)> L;
  std::function<cplx(double)> T;
  std::function<cplx(double)> R;
};

// Reflection/transmission coefficients of the potential extended by zero to
// the whole line, built from Jost boundary data.
FullLineCoefficients full_line_coefficients(std::function<cplx(cplx)> f0,
                                            std::function<cplx(cplx)> fp0);

} // namespace forward
} // namespace invspec
