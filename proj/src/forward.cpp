#include "invspec/forward.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace invspec {
namespace forward {

namespace {

double trapz_first_moment(const std::function<double(double)>& f, double xmax) {
  int n = 4000;
  double h = xmax / n, acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x = i * h;
    double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * (1.0 + x) * std::abs(f(x));
  }
  return acc * h;
}

} // namespace

Potential Potential::zero() { return table([](double) { return 0.0; }, 1.0); }

Potential Potential::sampled(std::vector<double> x, std::vector<double> v) {
  if (x.size() != v.size() || x.size() < 2)
    throw ParseError("sampled potential needs matching x/v arrays of length >= 2");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (x[i] >= x[i + 1]) throw ParseError("sampled potential grid must be increasing");
  Potential p;
  p.kind_ = Kind::Sampled;
  p.x_ = std::move(x);
  p.v_ = std::move(v);
  p.xmax_ = p.x_.back();
  p.finalize_moments();
  return p;
}

Potential Potential::exp_sum(std::vector<double> coeff, std::vector<double> rate) {
  if (coeff.size() != rate.size() || coeff.empty())
    throw ParseError("exp-sum potential needs matching coeff/rate arrays");
  Potential p;
  p.kind_ = Kind::ExpSum;
  p.gammaCoeff_ = std::move(coeff);
  p.gammaRate_ = std::move(rate);
  // Support bound: smallest x where the Faddeev tail estimate drops below
  // 1e-10, probed on a coarse walk.
  double rmin = 1e300;
  for (double r : p.gammaRate_)
    if (r > 1e-12) rmin = std::min(rmin, r);
  if (rmin > 1e299) rmin = 1.0;
  double x = 5.0;
  while (x < 200.0) {
    double tail = (1.0 + x + 1.0 / rmin) * std::abs(p(x)) / rmin;
    if (tail < 1e-10) break;
    x += 0.5;
  }
  p.xmax_ = x;
  p.finalize_moments();
  return p;
}

Potential Potential::table(std::function<double(double)> f, double xmax,
                           std::vector<double> jumps) {
  Potential p;
  p.kind_ = Kind::Table;
  p.table_ = std::move(f);
  p.xmax_ = xmax;
  p.jumps_ = std::move(jumps);
  std::sort(p.jumps_.begin(), p.jumps_.end());
  p.finalize_moments();
  return p;
}

void Potential::finalize_moments() {
  firstMoment_ = trapz_first_moment([this](double x) { return (*this)(x); }, xmax_);
  supAbs_ = 0.0;
  for (int i = 0; i <= 2000; ++i)
    supAbs_ = std::max(supAbs_, std::abs((*this)(xmax_ * i / 2000.0)));
}

double Potential::operator()(double x) const {
  if (x < 0.0) return 0.0;
  switch (kind_) {
    case Kind::Sampled: {
      if (x <= x_.front()) return v_.front();
      if (x == x_.back()) return v_.back();
      if (x > x_.back()) return 0.0;
      auto it = std::upper_bound(x_.begin(), x_.end(), x);
      std::size_t hi = it - x_.begin();
      double w = (x - x_[hi - 1]) / (x_[hi] - x_[hi - 1]);
      return v_[hi - 1] * (1.0 - w) + v_[hi] * w;
    }
    case Kind::ExpSum: {
      double g = 0.0, gp = 0.0, gpp = 0.0;
      for (std::size_t i = 0; i < gammaCoeff_.size(); ++i) {
        double e = gammaCoeff_[i] * std::exp(-gammaRate_[i] * x);
        g += e;
        gp += -gammaRate_[i] * e;
        gpp += gammaRate_[i] * gammaRate_[i] * e;
      }
      if (std::abs(g) < 1e-280) throw NumericalError("exp-sum potential denominator vanished");
      return -2.0 * (gpp * g - gp * gp) / (g * g);
    }
    case Kind::Table:
      return x <= xmax_ ? table_(x) : 0.0;
  }
  return 0.0;
}

BoundaryCondition BoundaryCondition::from_alpha(double a) {
  if (!(a > 0.0 && a <= pi)) throw ParseError("boundary parameter must lie in (0, pi]");
  BoundaryCondition bc;
  bc.alpha = a;
  if (std::abs(a - pi) < 1e-14) {
    bc.dirichlet = true;
  } else {
    bc.dirichlet = false;
    bc.cotAlpha = std::cos(a) / std::sin(a);
  }
  return bc;
}

BoundaryCondition BoundaryCondition::from_cot(double c) {
  BoundaryCondition bc;
  bc.dirichlet = false;
  bc.cotAlpha = c;
  bc.alpha = std::atan2(1.0, c); // in (0, pi)
  return bc;
}

BoundaryCondition BoundaryCondition::dirichlet_bc() { return BoundaryCondition{}; }

namespace {

using State = std::array<cplx, 3>;

// Scaled Jost system: f = g e^{ikx} turns the outgoing normalization into
// g(xmax) = 1, g'(xmax) = 0 and avoids e^{ik xmax} underflow for Im k > 0.
// The third component accumulates int_x^inf f^2 (used on the imaginary axis).
struct JostOde {
  const Potential& V;
  cplx k;
  bool withNorm;

  State rhs(double x, const State& y) const {
    State d;
    d[0] = y[1];
    d[1] = V(x) * y[0] - 2.0 * iu * k * y[1];
    if (withNorm) {
      cplx f = y[0] * std::exp(iu * k * x);
      d[2] = -f * f;
    } else {
      d[2] = cplx(0.0);
    }
    return d;
  }
};

// Dormand-Prince 5(4), relative tolerance 1e-10.
void integrate_segment(const JostOde& ode, double x0, double x1, State& y) {
  static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double b5[7] = {35.0 / 384,     0.0,       500.0 / 1113, 125.0 / 192,
                               -2187.0 / 6784, 11.0 / 84, 0.0};
  static const double b4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  const double rtol = 1e-10, atol = 1e-12;
  double x = x0;
  double dir = (x1 > x0) ? 1.0 : -1.0;
  double h = dir * std::min(0.1, std::abs(x1 - x0));
  int steps = 0;
  while (dir * (x1 - x) > 1e-14 * (1.0 + std::abs(x))) {
    if (++steps > 2'000'000) throw NumericalError("jost integration exceeded the step budget");
    if (dir * (x + h - x1) > 0.0) h = x1 - x;
    if (std::abs(h) < 1e-15 * (1.0 + std::abs(x)))
      throw NumericalError("jost integration step size underflow");

    State ks[7];
    ks[0] = ode.rhs(x, y);
    for (int s = 1; s < 7; ++s) {
      State ya = y;
      for (int j = 0; j < s; ++j)
        for (int m = 0; m < 3; ++m) ya[m] += h * A[s][j] * ks[j][m];
      ks[s] = ode.rhs(x + c[s] * h, ya);
    }
    State y5{};
    double errNorm = 0.0;
    for (int m = 0; m < 3; ++m) {
      cplx acc5(0.0), acc4(0.0);
      for (int s = 0; s < 7; ++s) {
        acc5 += b5[s] * ks[s][m];
        acc4 += b4[s] * ks[s][m];
      }
      y5[m] = y[m] + h * acc5;
      cplx y4 = y[m] + h * acc4;
      double sc = atol + rtol * std::max(std::abs(y[m]), std::abs(y5[m]));
      errNorm = std::max(errNorm, std::abs(y5[m] - y4) / sc);
    }
    bool accepted = errNorm <= 1.0;
    if (accepted) {
      x += h;
      y = y5;
    }
    double factor = 0.9 * std::pow(std::max(errNorm, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, accepted ? 5.0 : 1.0);
  }
}

State solve_scaled(const Potential& V, cplx k, double xmax, bool withNorm) {
  State y{cplx(1.0), cplx(0.0), cplx(0.0)};
  if (withNorm) {
    // Tail of int_x^inf f^2 with f = e^{ikx} beyond the support.
    cplx twoik = 2.0 * iu * k;
    y[2] = -std::exp(twoik * xmax) / twoik;
  }
  JostOde ode{V, k, withNorm};
  std::vector<double> cuts;
  for (double j : V.jumps())
    if (j > 0.0 && j < xmax) cuts.push_back(j);
  std::sort(cuts.rbegin(), cuts.rend());
  double x = xmax;
  for (double j : cuts) {
    integrate_segment(ode, x, j, y);
    x = j;
  }
  integrate_segment(ode, x, 0.0, y);
  return y;
}

} // namespace

JostBoundaryData integrate_jost(const Potential& V, cplx k, double xmax) {
  if (k.imag() < -1e-12) throw NumericalError("jost integration requires Im k >= 0");
  if (xmax <= 0.0) xmax = V.xmax();
  State y = solve_scaled(V, k, xmax, false);
  JostBoundaryData out;
  out.k = k;
  out.f0 = y[0];
  out.fp0 = y[1] + iu * k * y[0];
  return out;
}

cplx jost_function(const Potential& V, const BoundaryCondition& bc, cplx k) {
  JostBoundaryData j = integrate_jost(V, k);
  if (bc.dirichlet) return j.f0;
  return -iu * (j.fp0 + bc.cotAlpha * j.f0);
}

namespace {

double axis_test_function(const Potential& V, const BoundaryCondition& bc, double kappa) {
  cplx F = jost_function(V, bc, cplx(0.0, kappa));
  return bc.dirichlet ? F.real() : F.imag();
}

std::vector<double> scan_eigenvalues(const Potential& V, const BoundaryCondition& bc,
                                     double kappaMax, int gridN) {
  const double lo = 1e-3;
  if (kappaMax <= lo) return {};
  std::vector<double> roots;
  double prevK = lo;
  double prevF = axis_test_function(V, bc, prevK);
  for (int i = 1; i <= gridN; ++i) {
    double kap = lo * std::pow(kappaMax / lo, double(i) / gridN);
    double f = axis_test_function(V, bc, kap);
    if (f * prevF < 0.0) {
      double a = prevK, b = kap, fa = prevF;
      while (b - a > 1e-12 * (1.0 + b)) {
        double m = 0.5 * (a + b);
        double fm = axis_test_function(V, bc, m);
        if (fm * fa <= 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prevK = kap;
    prevF = f;
  }
  return roots;
}

} // namespace

std::vector<double> eigenvalues(const Potential& V, const BoundaryCondition& bc,
                                double kappaMax) {
  std::vector<double> roots = scan_eigenvalues(V, bc, kappaMax, 400);
  std::vector<double> check = scan_eigenvalues(V, bc, kappaMax, 800);
  if (roots.size() != check.size())
    throw NumericalError("eigenvalue scan unresolved: count changed under grid refinement");
  return roots;
}

double default_kappa_max(const Potential& V, const BoundaryCondition& bc) {
  double boundary = bc.dirichlet ? 0.0 : std::abs(bc.cotAlpha);
  return std::sqrt(V.sup_abs() + boundary * boundary + 1.0) + boundary + 1.0;
}

SpectralSet norming_constants(const Potential& V, const BoundaryCondition& bc,
                              const std::vector<double>& kappas) {
  SpectralSet out;
  out.eigenvalues = kappas;
  for (double kap : kappas) {
    cplx k(0.0, kap);
    State y = solve_scaled(V, k, V.xmax(), true);
    double f0 = y[0].real();
    double fp0 = (y[1] + iu * k * y[0]).real();
    double norm2 = y[2].real();
    if (!(norm2 > 0.0)) throw NumericalError("bound-state norm must be positive");

    double delta = 1e-5 * (1.0 + kap);
    cplx Fp = jost_function(V, bc, cplx(0.0, kap + delta));
    cplx Fm = jost_function(V, bc, cplx(0.0, kap - delta));
    cplx Fdot = (Fp - Fm) / (2.0 * iu * delta);
    double alt = bc.dirichlet ? (iu / (2.0 * kap) * Fdot * fp0).real()
                              : (Fdot * cplx(f0) / (2.0 * kap)).real();
    if (std::abs(alt - norm2) > 1e-4 * std::abs(norm2))
      throw NumericalError("norming-constant cross-check failed (ill-conditioned data)");

    double g = bc.dirichlet ? std::abs(fp0) / std::sqrt(norm2) : std::abs(f0) / std::sqrt(norm2);
    out.glNorming.push_back(g);
    out.mNorming.push_back(1.0 / std::sqrt(norm2));
  }
  return out;
}

cplx scattering_matrix(const Potential& V, const BoundaryCondition& bc, double k) {
  cplx num = jost_function(V, bc, cplx(-k, 0.0));
  cplx den = jost_function(V, bc, cplx(k, 0.0));
  if (std::abs(den) < 1e-12)
    throw NumericalError("scattering matrix at a zero of the Jost function");
  return bc.dirichlet ? num / den : -num / den;
}

FullLineCoefficients full_line_coefficients(std::function<cplx(cplx)> f0,
                                            std::function<cplx(cplx)> fp0) {
  auto den = [f0, fp0](double k) {
    cplx kk(k, 0.0);
    cplx d = iu * kk * f0(kk) + fp0(kk);
    if (std::abs(d) < 1e-12)
      throw NumericalError("spectral singularity: ik f(k,0) + f'(k,0) vanishes on the real axis");
    return d;
  };
  FullLineCoefficients out;
  out.L = [f0, fp0, den](double k) {
    cplx kk(k, 0.0);
    return (iu * kk * f0(kk) - fp0(kk)) / den(k);
  };
  out.T = [den](double k) { return 2.0 * iu * cplx(k, 0.0) / den(k); };
  auto L = out.L;
  auto T = out.T;
  out.R = [L, T](double k) { return -L(-k) * T(k) / T(-k); };
  return out;
}

} // namespace forward
} // namespace invspec
