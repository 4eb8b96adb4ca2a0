#include "invspec/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "invspec/quadrature.hpp"

namespace invspec {
namespace reconstruct {

using rational::AmplitudeClass;

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::D1: return "D1";
    case Variant::D2: return "D2";
    case Variant::D3: return "D3";
    case Variant::D4: return "D4";
    case Variant::D5: return "D5";
    case Variant::D6: return "D6";
    case Variant::D7: return "D7";
    case Variant::D8: return "D8";
  }
  return "?";
}

Variant variant_from_name(const std::string& s) {
  for (Variant v : {Variant::D1, Variant::D2, Variant::D3, Variant::D4, Variant::D5, Variant::D6,
                    Variant::D7, Variant::D8})
    if (s == variant_name(v)) return v;
  throw ParseError("unknown data-set variant: " + s);
}

bool DataSet::alpha_is_dirichlet() const {
  return variant == Variant::D2 || variant == Variant::D4 || variant == Variant::D6 ||
         variant == Variant::D8;
}

bool DataSet::needs_h() const {
  return variant == Variant::D1 || variant == Variant::D3 || variant == Variant::D5 ||
         variant == Variant::D7;
}

bool DataSet::needs_beta() const {
  return variant == Variant::D2 || variant == Variant::D4 || variant == Variant::D7 ||
         variant == Variant::D8;
}

bool DataSet::has_missing_eigenvalue() const {
  return variant == Variant::D3 || variant == Variant::D4;
}

namespace {

void require_sorted_positive(const std::vector<double>& v, const char* what) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!(v[j] > 0.0)) throw NumericalError(std::string(what) + " must be strictly positive");
    if (j > 0 && !(v[j] > v[j - 1]))
      throw NumericalError(std::string(what) + " must be strictly increasing");
  }
}

// Strict alternation: first[0] < second[0] < first[1] < second[1] < ...
void require_interlaced(const std::vector<double>& first, const std::vector<double>& second,
                        const char* msg) {
  for (std::size_t j = 0; j < second.size(); ++j) {
    if (j >= first.size() || !(first[j] < second[j])) throw NumericalError(msg);
    if (j + 1 < first.size() && !(second[j] < first[j + 1])) throw NumericalError(msg);
  }
}

double product_ratio(double t2, const std::vector<double>& num, const std::vector<double>& den) {
  if (num.size() + den.size() <= 16) {
    double acc = 1.0;
    for (double k : num) acc *= (t2 + k * k);
    for (double k : den) acc /= (t2 + k * k);
    return acc;
  }
  // Long lists go through log space to dodge overflow.
  double lg = 0.0;
  for (double k : num) lg += std::log(t2 + k * k);
  for (double k : den) lg -= std::log(t2 + k * k);
  return std::exp(lg);
}

cplx product_ratio_c(cplx k, const std::vector<double>& num, const std::vector<double>& den) {
  cplx k2 = k * k;
  cplx acc(1.0);
  for (double q : num) acc *= (k2 + q * q);
  for (double q : den) acc /= (k2 + q * q);
  return acc;
}

RationalFn product_rational(const std::vector<double>& num, const std::vector<double>& den) {
  RationalFn r;
  for (double k : num) {
    r.zeros.push_back(iu * k);
    r.zeros.push_back(-iu * k);
  }
  for (double k : den) {
    r.poles.push_back(iu * k);
    r.poles.push_back(-iu * k);
  }
  r.gain = cplx(1.0);
  return r;
}

struct VariantShape {
  AmplitudeClass cls; // class of the known amplitude
  bool knownIsBeta;   // amplitude belongs to F_beta (D5..D8)
  bool alphaDirichlet;
};

VariantShape shape_of(Variant v) {
  switch (v) {
    case Variant::D1: return {AmplitudeClass::Mixed, false, false};
    case Variant::D2: return {AmplitudeClass::Dirichlet, false, true};
    case Variant::D3: return {AmplitudeClass::Mixed, false, false};
    case Variant::D4: return {AmplitudeClass::Dirichlet, false, true};
    case Variant::D5: return {AmplitudeClass::Mixed, true, false};
    case Variant::D6: return {AmplitudeClass::Mixed, true, true};
    case Variant::D7: return {AmplitudeClass::Mixed, true, false};
    case Variant::D8: return {AmplitudeClass::Mixed, true, true};
  }
  throw ParseError("bad variant");
}

} // namespace

ValidatedDataSet validate(DataSet ds) {
  VariantShape shape = shape_of(ds.variant);
  if (ds.amplitude.cls != shape.cls)
    throw ParseError("amplitude class does not match the variant");
  if (ds.needs_h()) {
    if (!ds.hBetaAlpha)
      throw IdentifiabilityError(
          std::string(variant_name(ds.variant)) +
          " without the boundary gap h determines only a parametric family of potentials; "
          "supply h to select a member");
    if (!(*ds.hBetaAlpha > 0.0)) throw NumericalError("the boundary gap h must be positive");
  }
  if (ds.needs_beta() && !ds.cotBeta)
    throw IdentifiabilityError(
        std::string(variant_name(ds.variant)) +
        " without beta determines only a parametric family of potentials; supply beta");

  std::sort(ds.kappaAlpha.begin(), ds.kappaAlpha.end());
  std::sort(ds.kappaBeta.begin(), ds.kappaBeta.end());
  require_sorted_positive(ds.kappaAlpha, "alpha eigenvalues");
  require_sorted_positive(ds.kappaBeta, "beta eigenvalues");
  for (double a : ds.kappaAlpha)
    for (double b : ds.kappaBeta)
      if (std::abs(a - b) < 1e-9)
        throw NumericalError("eigenvalue lists of the two conditions must be disjoint");

  const std::size_t nA = ds.kappaAlpha.size();
  const std::size_t nB = ds.kappaBeta.size();
  ValidatedDataSet out;

  if (!ds.has_missing_eigenvalue()) {
    bool equalCounts = ds.variant == Variant::D1 || ds.variant == Variant::D2 ||
                       ds.variant == Variant::D5 || ds.variant == Variant::D6;
    if (equalCounts) {
      if (nB != nA)
        throw NumericalError("variant requires equally many eigenvalues for both conditions");
      require_interlaced(ds.kappaAlpha, ds.kappaBeta,
                         "eigenvalue interlacing violated (equal-count pattern)");
    } else {
      if (nB != nA + 1)
        throw NumericalError("variant requires one extra eigenvalue for the beta condition");
      require_interlaced(ds.kappaBeta, ds.kappaAlpha,
                         "eigenvalue interlacing violated (offset pattern)");
    }
    out.data = std::move(ds);
    return out;
  }

  // D3/D4: the known subset must fill all but one slot of the offset
  // interlacing pattern; the empty slot is forced and brackets the search.
  if (ds.nBetaDeclared != static_cast<int>(nA) + 1)
    throw NumericalError("declared beta count must exceed the alpha count by one");
  if (nB != nA)
    throw NumericalError("the known beta subset must have as many elements as the alpha list");
  std::vector<int> fill(nA + 1, 0);
  for (double b : ds.kappaBeta) {
    std::size_t slot = 0;
    while (slot < nA && b > ds.kappaAlpha[slot]) ++slot;
    ++fill[slot];
  }
  int empty = -1;
  for (std::size_t s = 0; s <= nA; ++s) {
    if (fill[s] > 1)
      throw NumericalError("beta subset is not an admissible interlacing prefix (crowded slot)");
    if (fill[s] == 0) {
      if (empty >= 0)
        throw NumericalError("beta subset is not an admissible interlacing prefix (two gaps)");
      empty = static_cast<int>(s);
    }
  }
  out.data = std::move(ds);
  out.bracketLo = (empty == 0) ? 1e-8 : out.data.kappaAlpha[empty - 1];
  out.bracketHi = (empty == static_cast<int>(nA)) ? 0.0 : out.data.kappaAlpha[empty];
  return out;
}

namespace {

// Pointwise data-built right-hand side of Re Lambda, with the full beta list.
double re_value(const DataSet& ds, const std::vector<double>& betaFull, double t, double amp2) {
  const auto& A = ds.kappaAlpha;
  const double h = ds.hBetaAlpha.value_or(0.0);
  const double t2 = t * t;
  switch (ds.variant) {
    case Variant::D1:
      return t * h / amp2 * product_ratio(t2, A, betaFull);
    case Variant::D2:
      return -1.0 + product_ratio(t2, A, betaFull) / amp2;
    case Variant::D3:
      return t2 * h / amp2 * product_ratio(t2, A, betaFull);
    case Variant::D4:
      return t2 / amp2 * product_ratio(t2, A, betaFull) - 1.0;
    case Variant::D5:
      return -h + t2 * h / amp2 * product_ratio(t2, betaFull, A);
    case Variant::D6:
      return -1.0 + t2 / amp2 * product_ratio(t2, betaFull, A);
    case Variant::D7:
      return h - h / amp2 * product_ratio(t2, betaFull, A);
    case Variant::D8:
      return -1.0 + product_ratio(t2, betaFull, A) / amp2;
  }
  throw ParseError("bad variant");
}

RationalFn re_rational(const DataSet& ds, const std::vector<double>& betaFull) {
  const auto& A = ds.kappaAlpha;
  const double h = ds.hBetaAlpha.value_or(0.0);
  RationalFn inv_amp2 = rational::div(rational::constant(cplx(1.0)), ds.amplitude.amp2);
  RationalFn k = rational::monomial();
  RationalFn k2 = rational::mul(k, k);
  using rational::add_const;
  using rational::mul;
  using rational::scale;
  switch (ds.variant) {
    case Variant::D1:
      return scale(mul(mul(k, inv_amp2), product_rational(A, betaFull)), cplx(h));
    case Variant::D2:
      return add_const(mul(inv_amp2, product_rational(A, betaFull)), cplx(-1.0));
    case Variant::D3:
      return scale(mul(mul(k2, inv_amp2), product_rational(A, betaFull)), cplx(h));
    case Variant::D4:
      return add_const(mul(mul(k2, inv_amp2), product_rational(A, betaFull)), cplx(-1.0));
    case Variant::D5:
      return add_const(scale(mul(mul(k2, inv_amp2), product_rational(betaFull, A)), cplx(h)),
                       cplx(-h));
    case Variant::D6:
      return add_const(mul(mul(k2, inv_amp2), product_rational(betaFull, A)), cplx(-1.0));
    case Variant::D7:
      return add_const(scale(mul(inv_amp2, product_rational(betaFull, A)), cplx(-h)), cplx(h));
    case Variant::D8:
      return add_const(mul(inv_amp2, product_rational(betaFull, A)), cplx(-1.0));
  }
  throw ParseError("bad variant");
}

// For D3/D4 the working beta list must contain the recovered element; other
// variants carry the complete list from the start.
std::vector<double> full_beta(const ValidatedDataSet& v, std::optional<double> recovered) {
  std::vector<double> b = v.data.kappaBeta;
  if (v.data.has_missing_eigenvalue() && b.size() == v.data.kappaAlpha.size()) {
    if (!recovered)
      throw NumericalError("the missing eigenvalue must be recovered before this stage");
    b.push_back(*recovered);
    std::sort(b.begin(), b.end());
  }
  return b;
}

} // namespace

cplx LambdaFn::eval(cplx k) const { return continuation(k); }

cplx LambdaFn::c1() const {
  if (rationalForm) return rational::asymptotic_coefficients(*rationalForm, 1)[1];
  std::vector<cplx> vals(re.re.begin(), re.re.end());
  return (iu / pi) * quad::line_integral(re.grid, vals, re.tail);
}

LambdaFn build_lambda(const ValidatedDataSet& v, const JostFn& Fknown,
                      std::optional<double> recoveredKappa) {
  const DataSet& ds = v.data;
  std::vector<double> betaFull = full_beta(v, recoveredKappa);

  LambdaFn lam;
  lam.variant = ds.variant;

  if (ds.amplitude.isRational) {
    RationalFn re = re_rational(ds, betaFull);
    RationalFn L = schwarz::rational_schwarz(re);
    std::vector<double> grid = Fknown.grid.empty() ? schwarz::default_grid() : Fknown.grid;
    lam.re = HalfPlaneFn::from_rational(re, grid);
    lam.rationalForm = L;
    lam.im.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j)
      lam.im[j] = rational::eval(L, cplx(grid[j], 0.0)).imag();
    RationalFn Lc = L;
    lam.continuation = [Lc](cplx k) { return rational::eval(Lc, k); };
  } else {
    const auto& grid = ds.amplitude.grid;
    std::vector<double> re(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double a2 = ds.amplitude.absF[j] * ds.amplitude.absF[j];
      re[j] = re_value(ds, betaFull, grid[j], a2);
    }
    lam.re = HalfPlaneFn::from_samples(grid, std::move(re));
    lam.im = schwarz::hilbert_transform(lam.re);
    auto hp = std::make_shared<HalfPlaneFn>(lam.re);
    auto gridC = std::make_shared<std::vector<double>>(grid);
    auto reC = std::make_shared<std::vector<double>>(lam.re.re);
    auto imC = std::make_shared<std::vector<double>>(lam.im);
    lam.continuation = [hp, gridC, reC, imC](cplx k) -> cplx {
      if (std::abs(k.imag()) <= 1e-9) {
        const auto& g = *gridC;
        double x = k.real();
        if (x <= g.front() || x >= g.back())
          throw NumericalError("correction-function evaluation outside the grid");
        auto it = std::upper_bound(g.begin(), g.end(), x);
        std::size_t hi = it - g.begin();
        double w = (x - g[hi - 1]) / (g[hi] - g[hi - 1]);
        return cplx((*reC)[hi - 1] * (1.0 - w) + (*reC)[hi] * w,
                    (*imC)[hi - 1] * (1.0 - w) + (*imC)[hi] * w);
      }
      if (k.imag() < 0.0)
        throw NumericalError("correction function is defined on the closed upper half-plane");
      return schwarz::schwarz_extend(*hp, k);
    };
  }

  // Continuity at the origin: each driver needs Lambda = O(1) at k = 0; a
  // blow-up here signals inadmissible data (hidden zero-energy cases).
  {
    const auto& g = lam.re.grid;
    std::size_t mid = g.size() / 2;
    double nearest = 0.0;
    for (std::size_t j = mid >= 3 ? mid - 3 : 0; j < std::min(mid + 3, g.size()); ++j)
      nearest = std::max(nearest, std::abs(cplx(lam.re.re[j], lam.im[j])));
    double atOne = std::abs(lam.eval(cplx(1.0, 1e-8))) + std::abs(lam.eval(cplx(-1.0, 1e-8)));
    if (nearest > 10.0 * (0.5 * atOne + 1e-12) && nearest > 1e-9)
      throw NumericalError("correction function blows up at k=0: inadmissible data");
  }
  return lam;
}

MissingEigenvalueProblem missing_eigenvalue_problem(const ValidatedDataSet& v,
                                                    const JostFn& Fknown) {
  if (!v.data.has_missing_eigenvalue())
    throw NumericalError("variant has no missing eigenvalue to recover");
  (void)Fknown;
  MissingEigenvalueProblem p;
  p.lo = v.bracketLo;
  p.hi = v.bracketHi;
  p.target = (v.data.variant == Variant::D3) ? iu : -iu * v.data.cotBeta.value();

  // lim k H(k,kappa) equals (i/pi) times the integral of the data-built real
  // part; exact on the rational path, a line integral on the sampled path.
  const DataSet& ds = v.data;
  p.limitOfKTimesFamily = [ds](double kappa) -> cplx {
    std::vector<double> betaFull = ds.kappaBeta;
    betaFull.push_back(kappa);
    std::sort(betaFull.begin(), betaFull.end());
    if (ds.amplitude.isRational) {
      RationalFn re = re_rational(ds, betaFull);
      return rational::asymptotic_coefficients(schwarz::rational_schwarz(re), 1)[1];
    }
    const auto& grid = ds.amplitude.grid;
    std::vector<cplx> re(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double a2 = ds.amplitude.absF[j] * ds.amplitude.absF[j];
      re[j] = cplx(re_value(ds, betaFull, grid[j], a2), 0.0);
    }
    quad::TailModel tail = quad::fit_tail_model(grid, re);
    return (iu / pi) * quad::line_integral(grid, re, tail);
  };
  return p;
}

double solve_missing_eigenvalue(const MissingEigenvalueProblem& p) {
  auto mismatch = [&](double kappa) {
    // A probe can collide with a pole rate of the data (within the zero/pole
    // identification tolerance); nudge it off and retry.
    for (int attempt = 0; attempt < 3; ++attempt) {
      try {
        return (p.limitOfKTimesFamily(kappa) - p.target).imag();
      } catch (const NumericalError&) {
        kappa *= 1.0 + 2e-4;
      }
    }
    return (p.limitOfKTimesFamily(kappa) - p.target).imag();
  };
  double lo = p.lo, hi = p.hi;
  double flo = mismatch(lo * (1.0 + 1e-12) + 1e-12);
  if (hi <= 0.0) {
    // Open slot: grow geometrically until the mismatch flips orientation.
    hi = std::max(2.0 * lo, lo + 1.0);
    int tries = 0;
    while (mismatch(hi) * flo > 0.0) {
      hi *= 2.0;
      if (++tries > 48)
        throw NumericalError(
            "no bracket for the missing eigenvalue: data admits no Faddeev potential");
    }
  } else {
    double fhi = mismatch(hi * (1.0 - 1e-12));
    if (flo * fhi > 0.0)
      throw NumericalError(
          "no bracket for the missing eigenvalue: data admits no Faddeev potential");
  }
  double a = lo, b = hi, fa = flo;
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + b); ++it) {
    double m = 0.5 * (a + b);
    double fm = mismatch(m);
    if (fm * fa <= 0.0) {
      b = m;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

Angles extract_angles(const LambdaFn& lam, const ValidatedDataSet& v) {
  const DataSet& ds = v.data;
  Angles out;
  out.alphaIsDirichlet = ds.alpha_is_dirichlet();

  auto sumsq = [](const std::vector<double>& l) {
    double s = 0.0;
    for (double k : l) s += k * k;
    return s;
  };

  switch (ds.variant) {
    case Variant::D1: {
      double h = *ds.hBetaAlpha;
      double SA = sumsq(ds.kappaAlpha), SB = sumsq(ds.kappaBeta);
      cplx c2;
      if (lam.rationalForm) {
        c2 = rational::asymptotic_coefficients(*lam.rationalForm, 2)[2];
      } else {
        auto g = [&](cplx k) { return k * (k * lam.eval(k) - h); };
        c2 = schwarz::nontangential_limit(g, 0, 1.5 * lam.re.grid.back());
      }
      out.cotAlpha = ((-iu * c2).real() - (SA - SB)) / h;
      out.cotBeta = out.cotAlpha + h;
      out.h = h;
      break;
    }
    case Variant::D3: {
      double h = *ds.hBetaAlpha;
      if (ds.kappaBeta.size() != ds.kappaAlpha.size() + 1)
        throw NumericalError("angle extraction needs the completed beta list");
      double SA = sumsq(ds.kappaAlpha), SB = sumsq(ds.kappaBeta);
      cplx c3;
      if (lam.rationalForm) {
        c3 = rational::asymptotic_coefficients(*lam.rationalForm, 3)[3];
      } else {
        auto g = [&](cplx k) { return k * (k * (k * lam.eval(k) - iu) - h); };
        c3 = schwarz::nontangential_limit(g, 0, 1.5 * lam.re.grid.back());
      }
      out.cotAlpha = ((-iu * c3).real() - SA + SB) / h;
      out.cotBeta = out.cotAlpha + h;
      out.h = h;
      break;
    }
    case Variant::D5: {
      double h = *ds.hBetaAlpha;
      double SA = sumsq(ds.kappaAlpha), SB = sumsq(ds.kappaBeta);
      cplx c1 = lam.c1();
      out.cotBeta = ((-iu * c1).real() - (SA - SB)) / h;
      out.cotAlpha = out.cotBeta - h;
      out.h = h;
      break;
    }
    case Variant::D6: {
      cplx c1 = lam.c1();
      out.cotBeta = (-iu * c1).real();
      out.cotAlpha = 0.0;
      out.h = 0.0;
      break;
    }
    case Variant::D7: {
      out.cotBeta = *ds.cotBeta;
      out.h = *ds.hBetaAlpha;
      out.cotAlpha = out.cotBeta - out.h;
      break;
    }
    case Variant::D2:
    case Variant::D4:
    case Variant::D8: {
      out.cotBeta = *ds.cotBeta;
      out.cotAlpha = 0.0;
      out.h = 0.0;
      break;
    }
  }
  return out;
}

namespace {

JostFn make_recovered(const std::vector<double>& grid, std::vector<cplx> gridValues,
                      std::function<cplx(cplx)> continuation,
                      std::optional<RationalFn> rationalForm) {
  JostFn f;
  f.grid = grid;
  f.gridValues = std::move(gridValues);
  f.rationalForm = std::move(rationalForm);
  if (f.rationalForm) {
    RationalFn r = *f.rationalForm;
    f.continuation = [r](cplx k) { return rational::eval(r, k); };
  } else {
    auto gridC = std::make_shared<std::vector<double>>(f.grid);
    auto valsC = std::make_shared<std::vector<cplx>>(f.gridValues);
    auto inner = std::move(continuation);
    f.continuation = [gridC, valsC, inner](cplx k) -> cplx {
      if (std::abs(k.imag()) <= 1e-9) {
        const auto& g = *gridC;
        double x = k.real();
        if (x <= g.front() || x >= g.back())
          throw NumericalError("jost evaluation outside the construction grid");
        auto it = std::upper_bound(g.begin(), g.end(), x);
        std::size_t hi = it - g.begin();
        double w = (x - g[hi - 1]) / (g[hi] - g[hi - 1]);
        return (*valsC)[hi - 1] * (1.0 - w) + (*valsC)[hi] * w;
      }
      return inner(k);
    };
  }
  return f;
}

} // namespace

JostFn recover_second_jost(const LambdaFn& lam, const JostFn& Fknown, const ValidatedDataSet& v,
                           const Angles& angles) {
  const DataSet& ds = v.data;
  if (ds.has_missing_eigenvalue() && ds.kappaBeta.size() != ds.kappaAlpha.size() + 1)
    throw NumericalError("second-function recovery needs the completed beta list");
  std::vector<double> betaFull = ds.kappaBeta;
  const auto& A = ds.kappaAlpha;
  const double h = ds.hBetaAlpha.value_or(0.0);
  const double cotb = angles.cotBeta;

  // The variant's algebraic inversion, as a pointwise formula usable both on
  // grid values and on analytic continuations. Everything is captured by
  // value: the formula outlives this call inside the returned continuation.
  cplx c1(0.0);
  if (ds.variant == Variant::D2 || ds.variant == Variant::D7 || ds.variant == Variant::D8)
    c1 = lam.c1();

  auto formula = [variant = ds.variant, betaFull, A, h, cotb, c1](cplx k, cplx F,
                                                                  cplx L) -> cplx {
    switch (variant) {
      case Variant::D1:
        return F * (1.0 - iu * L) * product_ratio_c(k, betaFull, A);
      case Variant::D2:
        return k * F * (L + 1.0 + (-iu * cotb - c1) / k) * product_ratio_c(k, betaFull, A);
      case Variant::D3:
        return F * L / (iu * k) * product_ratio_c(k, betaFull, A);
      case Variant::D4:
        return F * (L + 1.0) / k * product_ratio_c(k, betaFull, A);
      case Variant::D5:
        return iu / k * F * (h - iu * k + L) * product_ratio_c(k, A, betaFull);
      case Variant::D6:
        return F * (L + 1.0) / k * product_ratio_c(k, A, betaFull);
      case Variant::D7: {
        cplx limP = iu * c1 - h * cotb;
        for (double q : betaFull) limP += q * q;
        for (double q : A) limP -= q * q;
        return k / iu * F * (iu * k - h + L + iu * limP / k) * product_ratio_c(k, A, betaFull);
      }
      case Variant::D8:
        return k * F * (1.0 + L + (iu * cotb - c1) / k) * product_ratio_c(k, A, betaFull);
    }
    throw ParseError("bad variant");
  };

  if (lam.rationalForm && Fknown.rationalForm) {
    // Exact algebra: same formulas over the rational carriers.
    using namespace rational;
    RationalFn K = monomial();
    RationalFn F = *Fknown.rationalForm;
    RationalFn L = *lam.rationalForm;
    RationalFn out;
    switch (ds.variant) {
      case Variant::D1:
        out = mul(mul(F, add_const(scale(L, -iu), cplx(1.0))), product_rational(betaFull, A));
        break;
      case Variant::D2: {
        RationalFn bracket = add_const(L, cplx(1.0));
        bracket = add(bracket, div(constant(-iu * cotb - c1), K));
        out = mul(mul(mul(K, F), bracket), product_rational(betaFull, A));
        break;
      }
      case Variant::D3:
        out = mul(div(mul(F, L), scale(K, iu)), product_rational(betaFull, A));
        break;
      case Variant::D4:
        out = mul(div(mul(F, add_const(L, cplx(1.0))), K), product_rational(betaFull, A));
        break;
      case Variant::D5: {
        RationalFn bracket = add_const(add(L, scale(K, -iu)), cplx(h));
        out = mul(div(scale(mul(F, bracket), iu), K), product_rational(A, betaFull));
        break;
      }
      case Variant::D6:
        out = mul(div(mul(F, add_const(L, cplx(1.0))), K), product_rational(A, betaFull));
        break;
      case Variant::D7: {
        cplx limP = iu * c1 - h * cotb;
        for (double q : betaFull) limP += q * q;
        for (double q : A) limP -= q * q;
        RationalFn bracket = add_const(add(L, scale(K, iu)), cplx(-h));
        bracket = add(bracket, div(constant(iu * limP), K));
        out = mul(div(mul(F, bracket), constant(iu)), product_rational(A, betaFull));
        out = mul(out, K);
        break;
      }
      case Variant::D8: {
        RationalFn bracket = add_const(L, cplx(1.0));
        bracket = add(bracket, div(constant(iu * cotb - c1), K));
        out = mul(mul(mul(K, F), bracket), product_rational(A, betaFull));
        break;
      }
    }
    std::vector<cplx> vals(Fknown.grid.size());
    for (std::size_t j = 0; j < vals.size(); ++j)
      vals[j] = rational::eval(out, cplx(Fknown.grid[j], 0.0));
    return make_recovered(Fknown.grid, std::move(vals), nullptr, out);
  }

  std::vector<cplx> vals(Fknown.grid.size());
  for (std::size_t j = 0; j < vals.size(); ++j) {
    cplx k(Fknown.grid[j], 0.0);
    cplx L(lam.re.re[j], lam.im[j]);
    vals[j] = formula(k, Fknown.gridValues[j], L);
  }
  auto lamEval = lam.continuation;
  auto FEval = Fknown.continuation;
  auto formulaC = formula;
  auto cont = [lamEval, FEval, formulaC](cplx k) {
    return formulaC(k, FEval(k), lamEval(k));
  };
  return make_recovered(Fknown.grid, std::move(vals), cont, std::nullopt);
}

namespace {

// d/dk of a Jost function at a point on the imaginary axis.
cplx jost_derivative(const JostFn& F, double kappa) {
  if (F.rationalForm) return rational::eval(rational::derivative(*F.rationalForm), iu * kappa);
  double delta = 1e-5 * (1.0 + kappa);
  return (F(iu * (kappa + delta)) - F(iu * (kappa - delta))) / (2.0 * iu * delta);
}

double require_positive_real(cplx v, const char* what, double tol) {
  if (std::abs(v.imag()) > tol * (1.0 + std::abs(v)) || !(v.real() > 0.0))
    throw NumericalError(std::string(what) + " must come out real and positive");
  return v.real();
}

// Norming constants of the condition carrying the spectral data, from the
// recovered pair and the k-derivative of the vanishing function.
void pair_norming(const JostFn& Falpha, const JostFn& Fbeta, bool alphaDirichlet, double h,
                  const std::vector<double>& kappaAlpha, std::vector<double>& gl,
                  std::vector<double>& m) {
  const double tol = 1e-6;
  for (double kap : kappaAlpha) {
    cplx Fb;
    if (Fbeta.rationalForm) {
      Fb = Fbeta(iu * kap);
    } else {
      // The recovery formula has a removable 0/0 at the bound states of the
      // other condition; evaluate just off the point and average.
      double d = 1e-5 * (1.0 + kap);
      Fb = 0.5 * (Fbeta(iu * (kap + d)) + Fbeta(iu * (kap - d)));
    }
    cplx Fdot = jost_derivative(Falpha, kap);
    cplx g2, m2;
    if (alphaDirichlet) {
      g2 = 2.0 * kap * Fb / Fdot;
      m2 = -2.0 * kap / (Fb * Fdot);
    } else {
      g2 = 2.0 * iu * kap * Fb / (h * Fdot);
      m2 = -2.0 * iu * kap * h / (Fb * Fdot);
    }
    gl.push_back(std::sqrt(require_positive_real(g2, "spectral norming constant", tol)));
    m.push_back(std::sqrt(require_positive_real(m2, "scattering norming constant", tol)));
  }
}

// Zeros of the recovered function on the positive imaginary axis, via sign
// scan of its real-valued restriction there.
std::vector<double> upper_axis_zeros(const JostFn& F, bool dirichletClass, double kappaMax) {
  auto probe = [&](double kap) {
    cplx v = F(iu * kap);
    return dirichletClass ? v.real() : v.imag();
  };
  std::vector<double> roots;
  const int n = 400;
  double prevK = 1e-3, prevV = probe(prevK);
  for (int i = 1; i <= n; ++i) {
    double kap = 1e-3 * std::pow(kappaMax / 1e-3, double(i) / n);
    double val = probe(kap);
    if (val * prevV < 0.0) {
      double a = prevK, b = kap, fa = prevV;
      while (b - a > 1e-11 * (1.0 + b)) {
        double mid = 0.5 * (a + b);
        double fm = probe(mid);
        if (fm * fa <= 0.0) {
          b = mid;
        } else {
          a = mid;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prevK = kap;
    prevV = val;
  }
  return roots;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (IdentifiabilityError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(std::string("[") + name + "] " + e.what());
  }
}

} // namespace

ReconstructionResult reconstruct(const DataSet& input) {
  ValidatedDataSet v = stage("validate", [&] { return validate(input); });
  const bool alphaDirichlet = v.data.alpha_is_dirichlet();
  VariantShape shape = shape_of(v.data.variant);

  // The amplitude's own eigenvalue list: alpha-side for D1-D4, beta-side for
  // D5-D8 (where the beta list is complete from the start).
  const std::vector<double>& kappaKnown =
      shape.knownIsBeta ? v.data.kappaBeta : v.data.kappaAlpha;
  JostFn Fknown = stage("reconstruct_jost", [&] {
    return schwarz::reconstruct_jost(v.data.amplitude, kappaKnown,
                                     v.data.amplitude.isRational ? schwarz::default_grid()
                                                                 : v.data.amplitude.grid);
  });

  std::optional<double> kappaStar;
  if (v.data.has_missing_eigenvalue()) {
    kappaStar = stage("solve_missing_eigenvalue", [&] {
      return solve_missing_eigenvalue(missing_eigenvalue_problem(v, Fknown));
    });
    v.data.kappaBeta.push_back(*kappaStar);
    std::sort(v.data.kappaBeta.begin(), v.data.kappaBeta.end());
  }

  LambdaFn lam = stage("build_lambda", [&] { return build_lambda(v, Fknown); });
  Angles angles = stage("extract_angles", [&] { return extract_angles(lam, v); });
  JostFn Fother =
      stage("recover_second_jost", [&] { return recover_second_jost(lam, Fknown, v, angles); });

  ReconstructionResult r;
  r.variant = v.data.variant;
  r.alphaIsDirichlet = alphaDirichlet;
  r.cotAlpha = angles.cotAlpha;
  r.cotBeta = angles.cotBeta;
  r.h = angles.h;
  r.recoveredKappa = kappaStar;
  r.kappaAlpha = v.data.kappaAlpha;
  r.kappaBeta = v.data.kappaBeta;
  if (shape.knownIsBeta) {
    r.Fbeta = Fknown;
    r.Falpha = Fother;
  } else {
    r.Falpha = Fknown;
    r.Fbeta = Fother;
  }

  stage("norming_constants", [&] {
    pair_norming(r.Falpha, r.Fbeta, alphaDirichlet, r.h, r.kappaAlpha, r.glNorming, r.mNorming);
    return 0;
  });

  // Consistency of the recovered function with the declared spectrum.
  stage("spectrum_consistency", [&] {
    double kmax = 1.0;
    for (double q : r.kappaAlpha) kmax = std::max(kmax, q + 2.0);
    for (double q : r.kappaBeta) kmax = std::max(kmax, q + 2.0);
    kmax = std::max(kmax, std::abs(r.cotBeta) + 2.0);
    bool recoveredIsDirichletClass = alphaDirichlet && shape.knownIsBeta; // recovered F_pi
    const std::vector<double>& expect = shape.knownIsBeta ? r.kappaAlpha : r.kappaBeta;
    std::vector<double> zeros = upper_axis_zeros(Fother, recoveredIsDirichletClass, kmax);
    double tol = Fother.rationalForm ? 1e-6 : 5e-3;
    if (zeros.size() != expect.size())
      throw NumericalError("recovered function has the wrong number of bound states");
    for (std::size_t j = 0; j < zeros.size(); ++j)
      if (std::abs(zeros[j] - expect[j]) > tol * (1.0 + expect[j]))
        throw NumericalError("recovered bound states disagree with the declared spectrum");
    return 0;
  });

  // Residual diagnostics on the grid.
  {
    double worstRe = 0.0;
    for (std::size_t j = 0; j < Fknown.grid.size(); ++j) {
      double t = Fknown.grid[j];
      if (std::abs(t) > 10.0) continue;
      cplx Fa = r.Falpha.gridValues[j], Fb = r.Fbeta.gridValues[j];
      double lhs, rhs;
      if (alphaDirichlet) {
        lhs = (Fa / Fb).real(); // Dirichlet function over the beta function
        rhs = t / std::norm(Fb);
      } else {
        lhs = (iu * Fb / Fa).real();
        rhs = t * r.h / std::norm(Fa);
      }
      worstRe = std::max(worstRe, std::abs(lhs - rhs));
    }
    r.reIdentityResidual = worstRe;

    double worstAmp = 0.0;
    for (std::size_t j = 0; j < Fknown.grid.size(); ++j) {
      double want;
      if (v.data.amplitude.isRational) {
        want = std::sqrt(
            rational::eval(v.data.amplitude.amp2, cplx(Fknown.grid[j], 0.0)).real());
      } else {
        want = v.data.amplitude.absF[j];
      }
      worstAmp = std::max(worstAmp, std::abs(std::abs(Fknown.gridValues[j]) - want) /
                                        (1.0 + std::abs(want)));
    }
    r.amplitudeResidual = worstAmp;

    std::size_t mid = lam.re.grid.size() / 2;
    double nearest = 0.0;
    for (std::size_t j = mid - 2; j < mid + 2; ++j)
      nearest = std::max(nearest, std::abs(cplx(lam.re.re[j], lam.im[j])));
    double atOne =
        0.5 * (std::abs(lam.eval(cplx(1.0, 1e-8))) + std::abs(lam.eval(cplx(-1.0, 1e-8))));
    r.lambdaOriginBound = nearest / (atOne + 1e-12);
  }

  // Zero-energy resonance of the Dirichlet member of the pair: downstream
  // full-line and Dirichlet-route inversions assume f(0,0) != 0.
  {
    auto boundaryValue = [&](cplx k) {
      if (alphaDirichlet) return r.Falpha(k);
      return (iu / r.h) * (r.Fbeta(k) - r.Falpha(k));
    };
    double scale = std::abs(boundaryValue(0.6 * iu));
    bool resonant;
    if (r.Falpha.rationalForm && r.Fbeta.rationalForm) {
      resonant = std::abs(boundaryValue(cplx(0.0))) < 1e-6 * (1e-12 + scale);
    } else {
      // Sampled path: a value vanishing linearly in k marks the resonance.
      cplx f1 = boundaryValue(cplx(1e-3, 0.0));
      cplx f2 = boundaryValue(cplx(2e-3, 0.0));
      resonant = std::abs(f1) < 0.01 * scale && std::abs(2.0 * f1 - f2) < 0.2 * std::abs(f2);
    }
    if (resonant)
      r.flags.push_back(
          "zero-energy resonance: f(0,0)=0; full-line and Dirichlet-route inversion disabled");
  }
  return r;
}

} // namespace reconstruct
} // namespace invspec
