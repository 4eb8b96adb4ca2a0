#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "invspec/quadrature.hpp"
#include "invspec/rational.hpp"
#include "support.hpp"

using namespace invspec;
using namespace invspec::quad;

namespace {

// Exact whole-line Cauchy integral of a strictly proper rational function with
// poles off the axis, by residue calculus (contour closed upward).
cplx cauchy_exact(const rational::RationalFn& r, cplx k) {
  cplx acc(0.0);
  for (cplx p : r.poles)
    if (p.imag() > 0.0) acc += rational::residue(r, p) / (p - k);
  if (k.imag() > 0.0) acc += rational::eval(r, k);
  return 2.0 * pi * iu * acc;
}

rational::RationalFn lorentz_odd(double h) {
  // h t/(t^2+1)
  return rational::RationalFn{{cplx(0.0)}, {cplx(0, 1), cplx(0, -1)}, cplx(h)};
}

} // namespace

TEST_CASE("sici: reference values") {
  SiCi r1 = sici(1.0);
  CHECK(std::abs(r1.si - 0.9460830703671830) < 1e-13);
  CHECK(std::abs(r1.ci - 0.3374039229009681) < 1e-13);
  SiCi r10 = sici(10.0);
  CHECK(std::abs(r10.si - 1.6583475942188740) < 1e-12);
  CHECK(std::abs(r10.ci + 0.0454564330044554) < 1e-12);
  SiCi big = sici(1e4);
  CHECK(std::abs(big.si - pi / 2.0) < 2e-4);
}

TEST_CASE("filon_segment: exact for linear integrands") {
  double a = 0.4, b = 1.1, y = 7.3;
  auto exact = [&](double t) {
    cplx iy(0.0, y);
    return std::exp(iy * t) * ((2.0 + 3.0 * t) / iy - 3.0 / (iy * iy));
  };
  cplx want = exact(b) - exact(a);
  cplx got = filon_segment(a, b, cplx(2.0 + 3.0 * a), cplx(2.0 + 3.0 * b), y);
  CHECK(std::abs(got - want) < 1e-13);

  cplx got0 = filon_segment(a, a + 1e-5, cplx(2.0 + 3.0 * a), cplx(2.0 + 3.0 * (a + 1e-5)), y);
  cplx exact0 = exact(a + 1e-5) - exact(a);
  CHECK(std::abs(got0 - exact0) < 1e-15);
}

TEST_CASE("cauchy_tail: all orders and sides against direct quadrature") {
  double K = 50.0;
  std::array<cplx, 6> a = {cplx(1.3, -0.4), cplx(-2.0, 0.7), cplx(0.9, 0.2), cplx(-0.3, 0.5), cplx(0.15, -0.1), cplx(-0.05, 0.08)};
  for (cplx k : {cplx(3.0, 0.0), cplx(-7.0, 0.0), cplx(2.0, 5.0), cplx(0.0, 0.0),
                 cplx(283.0, 283.0)}) {
    for (int side : {+1, -1}) {
      // Substitution u = 1/|t| gives a smooth integrand on [0, 1/K]:
      //   side=+1: (a0 + a1 u + a2 u^2) / (1 - k u)
      //   side=-1: (-a0 + a1 u - a2 u^2) / (-1 - k u)
      auto f = [&](double u) -> cplx {
        if (side > 0)
          return (a[0] + (a[1] + (a[2] + (a[3] + (a[4] + a[5] * u) * u) * u) * u) * u) /
                 (1.0 - k * u);
        return (-a[0] + (a[1] + (-a[2] + (a[3] + (-a[4] + a[5] * u) * u) * u) * u) * u) /
               (-1.0 - k * u);
      };
      int n = 4000;
      double h = (1.0 / K) / n;
      cplx acc = f(0.0) + f(1.0 / K);
      for (int j = 1; j < n; ++j) acc += (j % 2 ? 4.0 : 2.0) * f(j * h);
      acc *= h / 3.0;
      cplx got = cauchy_tail(K, k, a, side);
      CHECK(std::abs(got - acc) < 1e-12);
    }
  }
}

TEST_CASE("oscillatory_tail: against direct quadrature") {
  double K = 40.0;
  std::array<cplx, 6> a = {cplx(0.8, 0.3), cplx(-1.1, 0.2), cplx(0.4, -0.6), cplx(0.2, 0.1), cplx(-0.1, 0.05), cplx(0.06, -0.02)};
  for (double y : {0.3, 1.7}) {
    for (int side : {+1, -1}) {
      // Brute force: Simpson over [K,T] plus the integration-by-parts
      // remainder -g e/(iy) + g' e/(iy)^2 - g'' e/(iy)^3 at T.
      double s = side > 0 ? 1.0 : -1.0;
      auto g = [&](double tt) -> cplx {
        double t = s * tt;
        cplx acc(0.0);
        double tp = t;
        for (int m = 0; m < 6; ++m) {
          acc += a[m] / tp;
          tp *= t;
        }
        return acc;
      };
      auto gp = [&](double tt) -> cplx { // d/d(tt) of g(s * tt)
        double t = s * tt;
        cplx acc(0.0);
        double tp = t * t;
        for (int m = 0; m < 6; ++m) {
          acc += -double(m + 1) * a[m] / tp;
          tp *= t;
        }
        return s * acc;
      };
      auto gpp = [&](double tt) -> cplx {
        double t = s * tt;
        cplx acc(0.0);
        double tp = t * t * t;
        for (int m = 0; m < 6; ++m) {
          acc += double((m + 1) * (m + 2)) * a[m] / tp;
          tp *= t;
        }
        return acc;
      };
      // Ray parametrized by tt in [K, inf): t = s*tt; the substitution for
      // s = -1 flips the limits and absorbs the sign of dt.
      double ys = s * y;
      auto f = [&](double tt) { return g(tt) * std::exp(cplx(0.0, tt * ys)); };
      double T = 4.0e4;
      int n = 800'000;
      double h = (T - K) / n;
      cplx acc = f(K) + f(T);
      for (int j = 1; j < n; ++j) acc += (j % 2 ? 4.0 : 2.0) * f(K + j * h);
      acc *= h / 3.0;
      cplx iy(0.0, ys);
      cplx eT = std::exp(cplx(0.0, T * ys));
      acc += eT * (-g(T) / iy + gp(T) / (iy * iy) - gpp(T) / (iy * iy * iy));
      cplx got = oscillatory_tail(K, y, a, side);
      CHECK(std::abs(got - acc) < 5e-9);
    }
  }
}

TEST_CASE("fourier_line matches the exact residue transform on rational data") {
  using namespace invspec::rational;
  RationalFn L = from_ratio(Polynomial({cplx(-1.5)}),
                            Polynomial({cplx(1.5), cplx(0, -1), cplx(1.0)}));
  RationalFn F{{cplx(0, -1), cplx(0, 2)}, {cplx(0, -4)}, cplx(1.0)};
  RationalFn Sm1 = add_const(scale(div(reflect(F), F), cplx(-1.0)), cplx(-1.0));

  auto grid = graded_symmetric_grid(4096, 200.0);
  for (const RationalFn* r : {&L, &Sm1}) {
    std::vector<cplx> vals(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) vals[j] = eval(*r, cplx(grid[j], 0.0));
    TailModel tail = fit_tail_model(grid, vals);
    ExponentialSum s = fourier_half_line(*r, cplx(0.0));
    double worst = 0.0;
    for (double y : {0.05, 0.2, 0.7, 1.5, 3.0, 6.0, 10.0}) {
      cplx got = fourier_line(grid, vals, y, tail);
      worst = std::max(worst, std::abs(got - s(y)));
    }
    CHECK(worst < 5e-8);
  }
}

TEST_CASE("cauchy_line: far, near-axis and ray evaluation against residues") {
  using namespace invspec::rational;
  RationalFn F{{cplx(0, -1), cplx(0, 2)}, {cplx(0, -4)}, cplx(1.0)};
  RationalFn Sm1 = add_const(scale(div(reflect(F), F), cplx(-1.0)), cplx(-1.0));
  RationalFn odd = lorentz_odd(2.5);

  auto grid = graded_symmetric_grid(4096, 200.0);
  for (const RationalFn* r : {&odd, &Sm1}) {
    std::vector<cplx> vals(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) vals[j] = eval(*r, cplx(grid[j], 0.0));
    TailModel tail = fit_tail_model(grid, vals);
    double r50 = 50.0 / std::sqrt(2.0);
    for (cplx k : {cplx(0.0, 2.3), cplx(3.0, 1.0), cplx(1.5, 1e-2), cplx(-4.0, 1e-4),
                   cplx(r50, r50), cplx(4.0 * r50, 4.0 * r50), cplx(8.0 * r50, 8.0 * r50)}) {
      cplx got = cauchy_line(grid, vals, k, tail);
      cplx want = cauchy_exact(*r, k);
      CHECK(std::abs(got - want) < 1e-7 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("hilbert_point: odd Lorentzian has the known transform") {
  using namespace invspec::rational;
  double h = 0.75;
  RationalFn odd = lorentz_odd(h);
  auto grid = graded_symmetric_grid(4096, 200.0);
  std::vector<double> vals(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    vals[j] = eval(odd, cplx(grid[j], 0.0)).real();
  TailModel tail = fit_tail_model(grid, vals);
  double worst = 0.0;
  for (std::size_t j = 1; j + 1 < grid.size(); j += 37) {
    double k = grid[j];
    if (std::abs(k) > 100.0) continue;
    double want = pi * h / (k * k + 1.0); // PV integral of the transform pair
    worst = std::max(worst, std::abs(hilbert_point(grid, vals, j, tail) - want));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("graded grid is symmetric, increasing and excludes zero") {
  auto g = graded_symmetric_grid(1024, 200.0);
  REQUIRE(g.size() == 1024);
  for (std::size_t j = 0; j + 1 < g.size(); ++j) CHECK(g[j] < g[j + 1]);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(g[j] != 0.0);
    CHECK(std::abs(g[j] + g[g.size() - 1 - j]) < 1e-12);
  }
  CHECK(std::abs(g.back() - 200.0) < 1e-9);
}
