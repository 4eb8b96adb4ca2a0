#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "invspec/base.hpp"
#include "invspec/schwarz.hpp"

namespace invspec {
namespace reconstruct {

using schwarz::AmplitudeData;
using schwarz::HalfPlaneFn;
using schwarz::JostFn;
using schwarz::RationalFn;

enum class Variant { D1, D2, D3, D4, D5, D6, D7, D8 };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& s);

// One of the eight admissible input data sets: boundary parameters, the
// amplitude of one Jost function, and two eigenvalue lists (for D3/D4 the
// second list is the known subset and nBetaDeclared carries the full count).
struct DataSet {
  Variant variant = Variant::D1;
  std::optional<double> hBetaAlpha;
  std::optional<double> cotBeta;
  AmplitudeData amplitude;
  std::vector<double> kappaAlpha; // eigenvalues for alpha (or the Dirichlet condition)
  std::vector<double> kappaBeta;  // eigenvalues for beta; subset for D3/D4
  int nBetaDeclared = -1;

  bool alpha_is_dirichlet() const;
  bool needs_h() const;
  bool needs_beta() const;
  bool has_missing_eigenvalue() const;
};

// Checked and normalized data set; for D3/D4 the interlacing pattern forces
// the slot of the absent eigenvalue and provides the root bracket.
struct ValidatedDataSet {
  DataSet data;
  double bracketLo = 0.0;
  double bracketHi = 0.0; // 0 = open slot above the largest known eigenvalue
};

ValidatedDataSet validate(DataSet ds);

// The Hardy-class correction function of a variant: data-built real part on
// the grid, its conjugate, asymptotic coefficients, and an evaluator on the
// closed upper half-plane.
struct LambdaFn {
  Variant variant = Variant::D1;
  HalfPlaneFn re;
  std::vector<double> im;
  std::optional<RationalFn> rationalForm;
  std::function<cplx(cplx)> continuation;

  cplx eval(cplx k) const;
  // c1 of the large-k expansion via the exact integral of the real part.
  cplx c1() const;
};

// Assembles the variant's correction function from the data and the known
// Jost function; for D3/D4 pass the already recovered missing eigenvalue.
LambdaFn build_lambda(const ValidatedDataSet& ds, const JostFn& Fknown,
                      std::optional<double> recoveredKappa = std::nullopt);

// One-parameter family member for the missing-eigenvalue search.
struct MissingEigenvalueProblem {
  std::function<cplx(double)> limitOfKTimesFamily; // kappa -> lim k H(k, kappa)
  cplx target;
  double lo = 0.0;
  double hi = 0.0; // 0 = grow geometrically until the mismatch flips
};

MissingEigenvalueProblem missing_eigenvalue_problem(const ValidatedDataSet& ds,
                                                    const JostFn& Fknown);
double solve_missing_eigenvalue(const MissingEigenvalueProblem& p);

struct Angles {
  bool alphaIsDirichlet = false;
  double cotAlpha = 0.0;
  double cotBeta = 0.0;
  double h = 0.0; // cot(beta) - cot(alpha); 0 for Dirichlet variants
};

Angles extract_angles(const LambdaFn& lambda, const ValidatedDataSet& ds);

// The other Jost function by the variant's algebraic inversion formula.
JostFn recover_second_jost(const LambdaFn& lambda, const JostFn& Fknown,
                           const ValidatedDataSet& ds, const Angles& angles);

struct ReconstructionResult {
  Variant variant = Variant::D1;
  bool alphaIsDirichlet = false;
  double cotAlpha = 0.0; // meaningless when alphaIsDirichlet
  double cotBeta = 0.0;
  double h = 0.0;
  std::optional<double> recoveredKappa;
  std::vector<double> kappaAlpha;
  std::vector<double> kappaBeta;
  JostFn Falpha; // the Dirichlet-condition function for D2/D4/D6/D8
  JostFn Fbeta;
  std::vector<double> glNorming;
  std::vector<double> mNorming;
  std::vector<std::string> flags;

  // Residual diagnostics over the construction grid.
  double reIdentityResidual = 0.0;  // boundary-data identity of the pair
  double amplitudeResidual = 0.0;   // recovered |F| vs input amplitude
  double lambdaOriginBound = 0.0;   // max |Lambda| near k = 0 over |Lambda(1)|
};

// Full spectral pipeline: known Jost function, correction function, missing
// eigenvalue where applicable, second Jost function, angles, norming
// constants, and consistency diagnostics. Potential recovery is driven by the
// inversion backends on top of this result.
ReconstructionResult reconstruct(const DataSet& ds);

} // namespace reconstruct
} // namespace invspec
