#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "invspec/inversion.hpp"
#include "invspec/reconstruct.hpp"
#include "support.hpp"

using namespace invspec;
using namespace invspec::inversion;
using invspec::Polynomial;
using rational::RationalFn;

namespace {

std::vector<double> uniform_grid(double a, double b, double step) {
  std::vector<double> g;
  for (double x = a; x <= b + 1e-12; x += step) g.push_back(x);
  return g;
}

// The unique-beta fixture: Dirichlet function (k-i)/(k+2i), beta function
// k-2i, cot(beta) = -1. Closed forms checked in the paper-level tests.
RationalFn fpi_69() {
  return rational::from_ratio(Polynomial({cplx(0, -1), cplx(1)}),
                              Polynomial({cplx(0, 2), cplx(1)}));
}
RationalFn fbeta_69() {
  return rational::from_ratio(Polynomial({cplx(0, -2), cplx(1)}), Polynomial({cplx(1)}));
}

GLData gl_data_69() {
  GLData d;
  d.dirichlet = true;
  d.amp2 = rational::abs_squared(fpi_69());
  d.kappa = {1.0};
  d.gl = {std::sqrt(6.0)};
  return d;
}

MarchenkoData marchenko_data_69() {
  MarchenkoData d;
  d.dirichlet = true;
  RationalFn F = fpi_69();
  d.S = rational::div(rational::reflect(F), F);
  d.kappa = {1.0};
  d.m = {std::sqrt(6.0)};
  return d;
}

// Bargmann potential with cot(beta)=3 seen from the alpha side of the
// cot(alpha)=1 pair: F_alpha = (k^2+2ik-2)/(k+2i), no alpha bound states.
RationalFn falpha_610() {
  return rational::from_ratio(Polynomial({cplx(-2), cplx(0, 2), cplx(1)}),
                              Polynomial({cplx(0, 2), cplx(1)}));
}

double v_610(double x) {
  double e = std::exp(-4.0 * x);
  return 160.0 * e / ((5.0 - e) * (5.0 - e));
}

double v_69(double x) {
  // Gamma = 1 + 3 e^{-4x}; independently verified against the forward oracle
  // in the test below.
  double e = std::exp(-4.0 * x);
  return -96.0 * e / ((1.0 + 3.0 * e) * (1.0 + 3.0 * e));
}

} // namespace

TEST_CASE("gl_kernel: closed form for the unique-beta fixture, both paths") {
  GLData d = gl_data_69();
  auto want = [](double x, double y) {
    return 1.5 * (std::exp(-std::abs(x - y)) - std::exp(-(x + y))) +
           6.0 * std::sinh(x) * std::sinh(y);
  };
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ux(0.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    double x = ux(rng), y = ux(rng);
    CHECK(std::abs(gl_kernel(d, x, y) - want(x, y)) < 1e-10 * (1.0 + std::abs(want(x, y))));
    CHECK(std::abs(gl_kernel(d, x, y) - gl_kernel(d, y, x)) < 1e-12 * (1.0 + std::abs(want(x, y))));
  }

  // Sampled path against the residue path.
  GLData s;
  s.dirichlet = true;
  s.grid = schwarz::default_grid();
  s.absF.resize(s.grid.size());
  for (std::size_t j = 0; j < s.grid.size(); ++j)
    s.absF[j] = std::abs(rational::eval(fpi_69(), cplx(s.grid[j], 0.0)));
  s.kappa = d.kappa;
  s.gl = d.gl;
  for (int i = 0; i < 5; ++i) {
    double x = ux(rng), y = ux(rng);
    CHECK(std::abs(gl_kernel(s, x, y) - want(x, y)) < 1e-6 * (1.0 + std::abs(want(x, y))));
  }
}

TEST_CASE("gl_kernel: free Dirichlet data gives the zero kernel") {
  GLData d;
  d.dirichlet = true;
  d.amp2 = rational::constant(cplx(1.0));
  CHECK(std::abs(gl_kernel(d, 0.7, 1.3)) < 1e-14);
}

TEST_CASE("gl_solve: zero kernel and the flat-potential boundary readout") {
  GLData zero;
  zero.dirichlet = true;
  zero.amp2 = rational::constant(cplx(1.0));
  auto xg = uniform_grid(0.0, 2.0, 0.01);
  GLOutput out = gl_solve(zero, xg);
  for (double x : xg) CHECK(std::abs(out.V(x)) < 1e-12);

  // V = 0 with cot(alpha) = -1: |F|^2 = k^2+1, nontrivial kernel, zero
  // potential, and the boundary readout recovers cot(alpha).
  GLData flat;
  flat.dirichlet = false;
  flat.amp2 = rational::from_ratio(Polynomial({cplx(1), cplx(0), cplx(1)}), Polynomial({cplx(1)}));
  GLOutput f = gl_solve(flat, xg);
  double worst = 0.0;
  for (double x : xg)
    if (x > 0.02 && x < 1.9) worst = std::max(worst, std::abs(f.V(x)));
  CHECK(worst < 1e-5);
  CHECK(std::abs(f.cotAlphaOut + 1.0) < 1e-9);
}

TEST_CASE("gl_solve: Bargmann closed form through the alpha-side data") {
  GLData d;
  d.dirichlet = false;
  d.amp2 = rational::abs_squared(falpha_610());
  auto xg = uniform_grid(0.0, 5.0, 0.01);
  GLOutput out = gl_solve(d, xg);
  double worst = 0.0;
  for (double x : xg) worst = std::max(worst, std::abs(out.V(x) - v_610(x)));
  CHECK(worst < 1e-3);
  CHECK(std::abs(out.cotAlphaOut - 1.0) < 1e-3);
}

TEST_CASE("marchenko_kernel: closed forms and reality") {
  // Free data: S == 1, no bound states.
  MarchenkoData free;
  free.dirichlet = true;
  free.S = rational::constant(cplx(1.0));
  CHECK(std::abs(marchenko_kernel(free, 0.9)) < 1e-14);

  // Unique-beta fixture: M(y) = 12 e^{-2y} after the bound-state term joins.
  MarchenkoData d = marchenko_data_69();
  for (double y : {0.2, 0.9, 2.5}) {
    CHECK(std::abs(marchenko_kernel(d, y) - 12.0 * std::exp(-2.0 * y)) < 1e-10);
  }

  // Residue path against the brute-force transform of the sampled path.
  MarchenkoData s;
  s.dirichlet = true;
  s.grid = schwarz::default_grid();
  s.Svals.resize(s.grid.size());
  RationalFn S = *d.S;
  for (std::size_t j = 0; j < s.grid.size(); ++j)
    s.Svals[j] = rational::eval(S, cplx(s.grid[j], 0.0));
  s.kappa = d.kappa;
  s.m = d.m;
  for (double y : {0.3, 1.1, 3.7}) {
    CHECK(std::abs(marchenko_kernel(s, y) - 12.0 * std::exp(-2.0 * y)) < 1e-7);
  }
  for (int i = 1; i <= 50; ++i) {
    double y = 0.1 * i;
    CHECK(std::abs(marchenko_kernel(d, y)) == marchenko_kernel(d, y)); // real by construction
  }
}

TEST_CASE("marchenko_solve: zero kernel and the unique-beta closed form") {
  MarchenkoData free;
  free.dirichlet = true;
  free.S = rational::constant(cplx(1.0));
  auto xg = uniform_grid(0.0, 2.0, 0.01);
  MarchenkoOutput z = marchenko_solve(free, xg);
  for (double x : xg) CHECK(std::abs(z.V(x)) < 1e-13);

  // The recovered potential of the unique-beta fixture must reproduce its
  // own Dirichlet Jost function through the forward oracle.
  forward::Potential cand = forward::Potential::exp_sum({1.0, 3.0}, {0.0, 4.0});
  cplx probe = forward::jost_function(cand, forward::BoundaryCondition::dirichlet_bc(),
                                      cplx(1.3, 0.0));
  cplx wantF = rational::eval(fpi_69(), cplx(1.3, 0.0));
  REQUIRE(std::abs(probe - wantF) < 1e-8);

  MarchenkoOutput out = marchenko_solve(marchenko_data_69(), uniform_grid(0.0, 5.0, 0.01));
  double worst = 0.0;
  for (double x : uniform_grid(0.0, 5.0, 0.01))
    worst = std::max(worst, std::abs(out.V(x) - v_69(x)));
  CHECK(worst < 1e-8);
}

TEST_CASE("marchenko_solve: Bargmann alpha-side data, exact path") {
  MarchenkoData d;
  d.dirichlet = false;
  RationalFn F = falpha_610();
  d.S = rational::scale(rational::div(rational::reflect(F), F), cplx(-1.0));
  auto xg = uniform_grid(0.0, 5.0, 0.01);
  MarchenkoOutput out = marchenko_solve(d, xg);
  double worst = 0.0;
  for (double x : xg) worst = std::max(worst, std::abs(out.V(x) - v_610(x)));
  CHECK(worst < 1e-8);
}

TEST_CASE("marchenko_solve: sampled path agrees with the closed form") {
  MarchenkoData s;
  s.dirichlet = true;
  s.grid = schwarz::default_grid();
  s.Svals.resize(s.grid.size());
  RationalFn S = *marchenko_data_69().S;
  for (std::size_t j = 0; j < s.grid.size(); ++j)
    s.Svals[j] = rational::eval(S, cplx(s.grid[j], 0.0));
  s.kappa = {1.0};
  s.m = {std::sqrt(6.0)};
  auto xg = uniform_grid(0.0, 2.5, 0.01);
  MarchenkoOutput out = marchenko_solve(s, xg);
  double worst = 0.0;
  for (double x : xg)
    if (x > 0.02) worst = std::max(worst, std::abs(out.V(x) - v_69(x)));
  CHECK(worst < 5e-3);
}

TEST_CASE("build_full_line: free pair") {
  // V = 0 with cot(alpha) = -2, cot(beta) = -1.
  schwarz::JostFn Fa, Fb;
  Fa.rationalForm = rational::from_ratio(Polynomial({cplx(0, 2), cplx(1)}), Polynomial({cplx(1)}));
  Fb.rationalForm = rational::from_ratio(Polynomial({cplx(0, 1), cplx(1)}), Polynomial({cplx(1)}));
  FullLineData fl = build_full_line(Fa, Fb, false, -2.0, -1.0);
  CHECK(fl.tau.empty());
  CHECK(std::abs(rational::eval(*fl.L, cplx(1.1, 0.0))) < 1e-12);
  CHECK(std::abs(rational::eval(*fl.T, cplx(1.1, 0.0)) - cplx(1.0)) < 1e-12);
  CHECK(std::abs(rational::eval(*fl.R, cplx(1.1, 0.0))) < 1e-12);
}

TEST_CASE("build_full_line: unique-beta fixture closed forms") {
  schwarz::JostFn Fpi, Fb;
  Fpi.rationalForm = fpi_69();
  Fb.rationalForm = fbeta_69();
  FullLineData fl = build_full_line(Fpi, Fb, true, 0.0, -1.0);

  for (double k : {0.6, 1.7, -2.4}) {
    cplx kk(k, 0.0);
    cplx den = kk * kk - iu * kk + 1.5;
    CHECK(std::abs(rational::eval(*fl.L, kk) - (-1.5) / den) < 1e-10);
    CHECK(std::abs(rational::eval(*fl.T, kk) - kk * (kk + 2.0 * iu) / den) < 1e-10);
    CHECK(std::abs(std::norm(rational::eval(*fl.L, kk)) +
                   std::norm(rational::eval(*fl.T, kk)) - 1.0) < 1e-10);
  }
  REQUIRE(fl.tau.size() == 1);
  CHECK(std::abs(fl.tau[0] - (std::sqrt(7.0) + 1.0) / 2.0) < 1e-10);
  CHECK(std::abs(fl.cl[0] * fl.cl[0] - (6.0 + 33.0 * std::sqrt(7.0) / 14.0)) < 1e-9);
  CHECK(std::abs(fl.gamma[0] - 1.0 / (2.0 + std::sqrt(7.0))) < 1e-10);
  CHECK(fl.gamma[0] > 0.0);
}

TEST_CASE("build_full_line: two-eigenvalue Dirichlet pair") {
  // cot(beta) = 3 member of the D8 family with kappa_pi = {2}.
  schwarz::JostFn Fpi, Fb;
  Fpi.rationalForm = rational::from_ratio(
      Polynomial({cplx(0, -2), cplx(1)}) * Polynomial({cplx(0, 3), cplx(1)}),
      Polynomial({cplx(0, 1), cplx(1)}) * Polynomial({cplx(0, 4), cplx(1)}));
  Fb.rationalForm = rational::from_ratio(
      Polynomial({cplx(0, -1), cplx(1)}) * Polynomial({cplx(0, -4), cplx(1)}),
      Polynomial({cplx(0, 2), cplx(1)}));
  FullLineData fl = build_full_line(Fpi, Fb, true, 0.0, 3.0);
  for (double k : {0.9, 2.1}) {
    cplx kk(k, 0.0);
    cplx chi = 2.0 * kk * kk * kk * kk + 6.0 * iu * kk * kk * kk + 12.0 * kk * kk +
               24.0 * iu * kk - 20.0;
    // The published closed form drops a (k+i) factor here: with it, T -> 1 at
    // infinity and |L|^2+|T|^2 = 1 holds exactly; without it T would decay.
    cplx wantT = 2.0 * kk * (kk + iu) * (kk + 2.0 * iu) * (kk + 4.0 * iu) / chi;
    CHECK(std::abs(rational::eval(*fl.T, kk) - wantT) < 1e-9 * (1.0 + std::abs(wantT)));
  }
}

TEST_CASE("faddeev_marchenko_solve: zero data and the unique-beta fixture") {
  schwarz::JostFn Fa, Fb;
  Fa.rationalForm = rational::from_ratio(Polynomial({cplx(0, 2), cplx(1)}), Polynomial({cplx(1)}));
  Fb.rationalForm = rational::from_ratio(Polynomial({cplx(0, 1), cplx(1)}), Polynomial({cplx(1)}));
  FullLineData flFree = build_full_line(Fa, Fb, false, -2.0, -1.0);
  auto xg = uniform_grid(0.0, 2.0, 0.01);
  FaddeevOutput z = faddeev_marchenko_solve(flFree, xg);
  for (double x : xg) CHECK(std::abs(z.V(x)) < 1e-12);

  schwarz::JostFn Fpi, Fbb;
  Fpi.rationalForm = fpi_69();
  Fbb.rationalForm = fbeta_69();
  FullLineData fl = build_full_line(Fpi, Fbb, true, 0.0, -1.0);
  auto xg5 = uniform_grid(0.0, 5.0, 0.01);
  FaddeevOutput out = faddeev_marchenko_solve(fl, xg5);
  double worst = 0.0;
  for (double x : xg5) worst = std::max(worst, std::abs(out.V(x) - v_69(x)));
  CHECK(worst < 1e-8);
  double worstNeg = 0.0;
  for (double v : out.vNegative) worstNeg = std::max(worstNeg, std::abs(v));
  CHECK(worstNeg < 1e-8);
}

TEST_CASE("faddeev_marchenko_solve: Bargmann closed form") {
  schwarz::JostFn Fa, Fb;
  Fa.rationalForm = falpha_610();
  Fb.rationalForm = rational::from_ratio(Polynomial({cplx(0, -2), cplx(1)}), Polynomial({cplx(1)}));
  FullLineData fl = build_full_line(Fa, Fb, false, 1.0, 3.0);
  auto xg = uniform_grid(0.0, 5.0, 0.01);
  FaddeevOutput out = faddeev_marchenko_solve(fl, xg);
  double worst = 0.0;
  for (double x : xg) worst = std::max(worst, std::abs(out.V(x) - v_610(x)));
  CHECK(worst < 1e-8);
}

TEST_CASE("kernel triangularity") {
  GLData d = gl_data_69();
  auto xg = uniform_grid(0.0, 1.5, 0.01);
  GLOutput out = gl_solve(d, xg);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(0.0, 1.4);
  for (int i = 0; i < 30; ++i) {
    double x = ux(rng), y = ux(rng);
    if (y > x) CHECK(out.kernel.eval(x, y) == 0.0);
  }
}
