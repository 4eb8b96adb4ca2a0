#include "invspec/schwarz.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace invspec {
namespace schwarz {

HalfPlaneFn HalfPlaneFn::from_samples(std::vector<double> grid, std::vector<double> re) {
  if (grid.size() != re.size() || grid.size() < 16)
    throw ParseError("half-plane boundary data needs matching grid/value arrays");
  for (std::size_t j = 0; j + 1 < grid.size(); ++j)
    if (grid[j] >= grid[j + 1]) throw ParseError("half-plane grid must be strictly increasing");
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double mirror = grid[grid.size() - 1 - j];
    if (std::abs(grid[j] + mirror) > 1e-9 * (1.0 + std::abs(mirror)))
      throw ParseError("half-plane grid must be symmetric about 0");
  }
  HalfPlaneFn f;
  f.grid = std::move(grid);
  f.re = std::move(re);
  f.tail = quad::fit_tail_model(f.grid, f.re);
  return f;
}

HalfPlaneFn HalfPlaneFn::from_rational(const RationalFn& r, std::vector<double> grid) {
  std::vector<double> re(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    re[j] = rational::eval(r, cplx(grid[j], 0.0)).real();
  HalfPlaneFn f = from_samples(std::move(grid), std::move(re));
  f.rationalForm = r;
  return f;
}

std::vector<double> default_grid() { return quad::graded_symmetric_grid(4096, 200.0); }

RationalFn rational_schwarz(const RationalFn& re) {
  if (rational::relative_degree(re) >= 0)
    throw NumericalError("schwarz transform requires a decaying real part");
  // (1/(pi i)) int re(t)/(t-k) dt = 2 re(k) + sum over upper poles of
  // 2 Res(re,p)/(p-k), by closing the contour upward.
  RationalFn out = rational::scale(re, cplx(2.0));
  for (cplx p : re.poles) {
    if (p.imag() <= 0.0) continue;
    cplx res = rational::residue(re, p);
    out = rational::add(out, RationalFn{{}, {p}, -2.0 * res});
  }
  return out;
}

std::vector<double> hilbert_transform(const HalfPlaneFn& f) {
  const std::size_t n = f.grid.size();
  std::vector<double> im(n);
  if (f.rationalForm) {
    RationalFn lam = rational_schwarz(*f.rationalForm);
    for (std::size_t j = 0; j < n; ++j)
      im[j] = rational::eval(lam, cplx(f.grid[j], 0.0)).imag();
    return im;
  }
  // Declared tail must be consistent with the data; a two-point probe at the
  // grid edge catches mislabeled inputs.
  for (bool right : {false, true}) {
    std::size_t idx = right ? n - 1 : 0;
    const auto& a = right ? f.tail.right : f.tail.left;
    double t = f.grid[idx];
    cplx model = a[0] / t + a[1] / (t * t) + a[2] / (t * t * t) + a[3] / (t * t * t * t);
    if (std::abs(model.real() - f.re[idx]) > 0.05 * (1e-12 + std::abs(f.re[idx]) + std::abs(model)))
      throw NumericalError("tail model inconsistent with boundary samples");
  }
  for (std::size_t j = 1; j + 1 < n; ++j)
    im[j] = -(1.0 / pi) * quad::hilbert_point(f.grid, f.re, j, f.tail);
  im[0] = im[1] + (im[2] - im[1]) * (f.grid[0] - f.grid[1]) / (f.grid[2] - f.grid[1]);
  im[n - 1] =
      im[n - 2] + (im[n - 3] - im[n - 2]) * (f.grid[n - 1] - f.grid[n - 2]) /
                      (f.grid[n - 3] - f.grid[n - 2]);
  return im;
}

cplx schwarz_extend(const HalfPlaneFn& f, cplx k) {
  if (k.imag() <= 0.0) throw NumericalError("schwarz extension requires Im k > 0");
  if (f.rationalForm) {
    RationalFn re = *f.rationalForm;
    cplx acc = 2.0 * rational::eval(re, k);
    for (cplx p : re.poles) {
      if (p.imag() <= 0.0) continue;
      acc += 2.0 * rational::residue(re, p) / (p - k);
    }
    return acc;
  }
  std::vector<cplx> vals(f.re.begin(), f.re.end());
  return quad::cauchy_line(f.grid, vals, k, f.tail) / (pi * iu);
}

AmplitudeData AmplitudeData::from_rational(RationalFn amp2, AmplitudeClass cls) {
  AmplitudeData a;
  a.isRational = true;
  a.amp2 = std::move(amp2);
  a.cls = cls;
  return a;
}

AmplitudeData AmplitudeData::from_samples(std::vector<double> grid, std::vector<double> absF,
                                          AmplitudeClass cls) {
  if (grid.size() != absF.size() || grid.size() < 16)
    throw ParseError("sampled amplitude needs matching grid/value arrays");
  AmplitudeData a;
  a.isRational = false;
  a.grid = std::move(grid);
  a.absF = std::move(absF);
  a.cls = cls;
  for (double v : a.absF)
    if (!(v > 0.0)) throw NumericalError("amplitude samples must be positive");
  return a;
}

cplx JostFn::operator()(cplx k) const { return continuation(k); }

JostFn reconstruct_jost(const AmplitudeData& amp, const std::vector<double>& kappas,
                        const std::vector<double>& grid) {
  JostFn F;
  F.grid = grid;
  if (amp.isRational) {
    RationalFn r = rational::spectral_factor(amp.amp2, kappas, amp.cls);
    F.rationalForm = r;
    F.continuation = [r](cplx k) { return rational::eval(r, k); };
    F.gridValues.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
      F.gridValues[j] = rational::eval(r, cplx(grid[j], 0.0));
    return F;
  }

  // Outer-function route: log of the zero-free modulus goes through the
  // Schwarz machinery, the upper zeros enter as a Blaschke product.
  const std::vector<double>& g = amp.grid;
  std::vector<double> rho(g.size());
  const bool mixed = amp.cls == AmplitudeClass::Mixed;
  // Borderline amplitudes (F(0) = 0) are rejected: the generic-case formulas
  // downstream assume F(0) != 0. On sampled data the zero shows up as a
  // positive log-slope of |F| near the origin.
  {
    std::size_t j0 = g.size() / 2; // innermost positive node
    double t0 = g[j0], v0 = amp.absF[j0];
    std::size_t j1 = j0;
    while (j1 + 1 < g.size() && g[j1] < 50.0 * t0) ++j1;
    double slope = std::log(amp.absF[j1] / v0) / std::log(g[j1] / t0);
    if (slope > 0.5)
      throw NumericalError("amplitude vanishes at k=0: borderline data rejected");
  }
  // For the mixed class the literal outer integrand log(|t|/|F|) is
  // log-singular at t = 0, which wrecks the transform accuracy near the
  // origin. Factor F = (k+i) Q instead: |Q| = |F|/sqrt(t^2+1) is smooth and
  // decaying, and the product reproduces the same function (same upper zeros,
  // same modulus, same normalization F/k -> 1).
  for (std::size_t j = 0; j < g.size(); ++j) {
    double t = g[j];
    rho[j] = mixed ? std::log(amp.absF[j] / std::sqrt(t * t + 1.0)) : std::log(amp.absF[j]);
  }

  auto hp = std::make_shared<HalfPlaneFn>(HalfPlaneFn::from_samples(g, rho));
  std::vector<double> hil = hilbert_transform(*hp);
  std::vector<double> kap = kappas;

  F.gridValues.resize(g.size());
  F.grid = g;
  for (std::size_t j = 0; j < g.size(); ++j) {
    cplx t(g[j], 0.0);
    cplx blaschke(1.0);
    for (double q : kap) blaschke *= (t - iu * q) / (t + iu * q);
    cplx logQ(rho[j], hil[j]);
    cplx pref = mixed ? (t + iu) : cplx(1.0);
    F.gridValues[j] = pref * blaschke * std::exp(logQ);
  }
  auto gridCopy = std::make_shared<std::vector<double>>(F.grid);
  auto valsCopy = std::make_shared<std::vector<cplx>>(F.gridValues);
  F.continuation = [hp, kap, mixed, gridCopy, valsCopy](cplx k) -> cplx {
    if (std::abs(k.imag()) <= 1e-9) {
      // Real axis: interpolate the precomputed boundary values.
      const auto& gg = *gridCopy;
      double x = k.real();
      if (x <= gg.front() || x >= gg.back())
        throw NumericalError("jost evaluation outside the construction grid");
      auto it = std::upper_bound(gg.begin(), gg.end(), x);
      std::size_t hi = it - gg.begin();
      double w = (x - gg[hi - 1]) / (gg[hi] - gg[hi - 1]);
      return (*valsCopy)[hi - 1] * (1.0 - w) + (*valsCopy)[hi] * w;
    }
    if (k.imag() < 0.0) throw NumericalError("jost continuation is defined for Im k >= 0");
    cplx blaschke(1.0);
    for (double q : kap) blaschke *= (k - iu * q) / (k + iu * q);
    cplx logQ = schwarz_extend(*hp, k);
    cplx pref = mixed ? (k + iu) : cplx(1.0);
    return pref * blaschke * std::exp(logQ);
  };
  return F;
}

namespace {

cplx extract_ray_coefficient(const std::function<cplx(cplx)>& g, int order, double scale,
                             double baseRadius) {
  constexpr int nr = 5;
  const cplx dir = std::exp(iu * (pi / 4.0));
  cplx samples[nr], kvals[nr];
  for (int j = 0; j < nr; ++j) {
    kvals[j] = scale * baseRadius * double(1 << j) * dir;
    samples[j] = g(kvals[j]);
  }
  cplx coeff(0.0);
  for (int m = 0; m <= order; ++m) {
    // E_j = k^m (g - partial sums) sampled along the ray; the radii double,
    // so Richardson in 1/k eliminates successive expansion orders.
    cplx table[nr];
    for (int j = 0; j < nr; ++j) table[j] = samples[j];
    int len = nr;
    double pw = 1.0;
    for (int level = 1; level < nr; ++level) {
      pw *= 2.0;
      for (int j = 0; j + 1 < len; ++j) table[j] = (pw * table[j + 1] - table[j]) / (pw - 1.0);
      --len;
    }
    coeff = table[0];
    if (m == order) break;
    for (int j = 0; j < nr; ++j) samples[j] = (samples[j] - coeff) * kvals[j];
  }
  return coeff;
}

} // namespace

cplx nontangential_limit(const std::function<cplx(cplx)>& g, int order, double baseRadius) {
  // Extract twice on shifted radius sets: anything outside the 1/k power
  // class (log terms, branch cuts) shows up as a scale-dependent answer,
  // which the internal Richardson table cannot detect on its own.
  cplx a = extract_ray_coefficient(g, order, 1.0, baseRadius);
  cplx b = extract_ray_coefficient(g, order, 1.4, baseRadius);
  if (std::abs(a - b) > 1e-4 * (1.0 + std::abs(a)))
    throw NumericalError("nontangential limit did not stabilize");
  return 0.5 * (a + b);
}

} // namespace schwarz
} // namespace invspec
