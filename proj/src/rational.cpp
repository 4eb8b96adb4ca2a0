#include "invspec/rational.hpp"

#include <algorithm>
#include <cmath>

namespace invspec {
namespace rational {

namespace {

double local_scale(const std::vector<cplx>& pts, cplx k) {
  double s = 1.0 + std::abs(k);
  for (cplx p : pts) s = std::max(s, std::abs(p));
  return s;
}

// Cancel zero/pole pairs that coincide within tolerance.
void reduce(std::vector<cplx>& zeros, std::vector<cplx>& poles) {
  for (std::size_t i = 0; i < zeros.size();) {
    bool cancelled = false;
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (std::abs(zeros[i] - poles[j]) <= coincidence_tol) {
        zeros.erase(zeros.begin() + i);
        poles.erase(poles.begin() + j);
        cancelled = true;
        break;
      }
    }
    if (!cancelled) ++i;
  }
}

} // namespace

cplx RationalFn::operator()(cplx k) const { return eval(*this, k); }

RationalFn constant(cplx c) { return RationalFn{{}, {}, c}; }

RationalFn monomial() { return RationalFn{{cplx(0.0)}, {}, cplx(1.0)}; }

RationalFn from_ratio(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) throw NumericalError("rational function with zero denominator");
  if (num.is_zero()) return constant(cplx(0.0));
  RationalFn r;
  r.zeros = num.roots();
  r.poles = den.roots();
  r.gain = num.lead() / den.lead();
  reduce(r.zeros, r.poles);
  return r;
}

Polynomial numerator(const RationalFn& r) { return Polynomial::from_roots(r.zeros, r.gain); }

Polynomial denominator(const RationalFn& r) { return Polynomial::from_roots(r.poles); }

cplx eval(const RationalFn& r, cplx k) {
  double guard = 1e-12 * local_scale(r.poles, k);
  cplx num = r.gain;
  for (cplx z : r.zeros) num *= (k - z);
  cplx den(1.0);
  for (cplx p : r.poles) {
    cplx d = k - p;
    if (std::abs(d) < guard) throw NumericalError("rational evaluation at a pole");
    den *= d;
  }
  return num / den;
}

RationalFn add(const RationalFn& a, const RationalFn& b) {
  Polynomial num = numerator(a) * denominator(b) + numerator(b) * denominator(a);
  return from_ratio(num, denominator(a) * denominator(b));
}

RationalFn sub(const RationalFn& a, const RationalFn& b) { return add(a, scale(b, cplx(-1.0))); }

RationalFn mul(const RationalFn& a, const RationalFn& b) {
  RationalFn r;
  r.zeros = a.zeros;
  r.zeros.insert(r.zeros.end(), b.zeros.begin(), b.zeros.end());
  r.poles = a.poles;
  r.poles.insert(r.poles.end(), b.poles.begin(), b.poles.end());
  r.gain = a.gain * b.gain;
  reduce(r.zeros, r.poles);
  return r;
}

RationalFn div(const RationalFn& a, const RationalFn& b) {
  if (std::abs(b.gain) == 0.0) throw NumericalError("division by zero rational function");
  RationalFn inv{b.poles, b.zeros, cplx(1.0) / b.gain};
  return mul(a, inv);
}

RationalFn scale(const RationalFn& a, cplx s) {
  if (std::abs(s) == 0.0) return constant(cplx(0.0));
  RationalFn r = a;
  r.gain *= s;
  return r;
}

RationalFn add_const(const RationalFn& a, cplx c) {
  if (std::abs(c) == 0.0) return a;
  return add(a, constant(c));
}

RationalFn derivative(const RationalFn& a) {
  Polynomial n = numerator(a), d = denominator(a);
  return from_ratio(n.derivative() * d - n * d.derivative(), d * d);
}

RationalFn reflect(const RationalFn& a) {
  RationalFn r;
  for (cplx z : a.zeros) r.zeros.push_back(-z);
  for (cplx p : a.poles) r.poles.push_back(-p);
  int sign_exp = static_cast<int>(a.zeros.size()) - static_cast<int>(a.poles.size());
  r.gain = a.gain * ((sign_exp % 2 == 0) ? 1.0 : -1.0);
  return r;
}

RationalFn conj_params(const RationalFn& a) {
  RationalFn r;
  for (cplx z : a.zeros) r.zeros.push_back(std::conj(z));
  for (cplx p : a.poles) r.poles.push_back(std::conj(p));
  r.gain = std::conj(a.gain);
  return r;
}

RationalFn abs_squared(const RationalFn& a) { return mul(a, conj_params(a)); }

int hermitian_symmetry_sign(const RationalFn& a, double tol) {
  bool plus = true, minus = true;
  for (int i = 0; i < 17; ++i) {
    double k = -8.0 + i;
    cplx lhs = std::conj(eval(a, cplx(-k, 0.0)));
    cplx rhs = eval(a, cplx(k, 0.0));
    if (std::abs(lhs - rhs) > tol * (1.0 + std::abs(rhs))) plus = false;
    if (std::abs(lhs + rhs) > tol * (1.0 + std::abs(rhs))) minus = false;
  }
  if (plus) return 1;
  if (minus) return -1;
  return 0;
}

int relative_degree(const RationalFn& a) {
  if (std::abs(a.gain) == 0.0) return -1000;
  return static_cast<int>(a.zeros.size()) - static_cast<int>(a.poles.size());
}

cplx residue(const RationalFn& r, cplx p) {
  std::size_t hit = r.poles.size();
  int multiplicity = 0;
  for (std::size_t j = 0; j < r.poles.size(); ++j) {
    if (std::abs(r.poles[j] - p) <= coincidence_tol) {
      if (multiplicity == 0) hit = j;
      ++multiplicity;
    }
  }
  if (multiplicity == 0) throw NumericalError("residue requested at a point that is not a pole");
  if (multiplicity > 1) throw NumericalError("residue requested at a pole of multiplicity > 1");

  cplx num = r.gain;
  for (cplx z : r.zeros) num *= (r.poles[hit] - z);
  cplx den(1.0);
  for (std::size_t j = 0; j < r.poles.size(); ++j) {
    if (j == hit) continue;
    den *= (r.poles[hit] - r.poles[j]);
  }
  return num / den;
}

std::vector<cplx> asymptotic_coefficients(const RationalFn& r, int maxOrder) {
  int rd = relative_degree(r);
  if (rd > 0) throw NumericalError("asymptotic expansion requires deg(num) <= deg(den)");
  std::vector<cplx> c(maxOrder + 1, cplx(0.0));
  RationalFn proper = r;
  if (rd == 0) {
    // Constant at infinity: gain times ratio of leading coefficients is just
    // gain in the zero/pole form.
    c[0] = r.gain;
    proper = add_const(r, -r.gain);
    if (relative_degree(proper) >= 0 && std::abs(proper.gain) != 0.0)
      throw NumericalError("asymptotic expansion: subtraction did not reduce degree");
  }
  // Strictly proper part via partial fractions over simple poles:
  // sum_j res_j / (k - p_j) = sum_m (sum_j res_j p_j^{m-1}) / k^m.
  for (std::size_t j = 0; j < proper.poles.size(); ++j) {
    for (std::size_t l = j + 1; l < proper.poles.size(); ++l)
      if (std::abs(proper.poles[j] - proper.poles[l]) <= coincidence_tol)
        throw NumericalError("asymptotic expansion requires simple poles");
  }
  if (std::abs(proper.gain) == 0.0) return c;
  for (cplx p : proper.poles) {
    cplx res = residue(proper, p);
    cplx pw(1.0);
    for (int m = 1; m <= maxOrder; ++m) {
      c[m] += res * pw;
      pw *= p;
    }
  }
  return c;
}

RationalFn spectral_factor(const RationalFn& amp2, const std::vector<double>& boundStateZeros,
                           AmplitudeClass cls) {
  // amp2 must be an even rational function of k; rewrite numerator and
  // denominator as polynomials in s = k^2 and factor there.
  Polynomial num = numerator(amp2), den = denominator(amp2);
  auto to_s = [](const Polynomial& p) {
    const auto& c = p.coefficients();
    std::vector<cplx> s((c.size() + 1) / 2, cplx(0.0));
    double scale = 0.0;
    for (cplx v : c) scale = std::max(scale, std::abs(v));
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j % 2 == 1) {
        if (std::abs(c[j]) > 1e-10 * scale)
          throw NumericalError("spectral factorization requires an even amplitude function");
      } else {
        s[j / 2] = c[j];
      }
    }
    return Polynomial(s);
  };
  Polynomial numS = to_s(num), denS = to_s(den);

  auto matched = std::vector<bool>(boundStateZeros.size(), false);
  RationalFn F;

  for (cplx s0 : numS.roots()) {
    if (std::abs(s0.imag()) < 1e-9 * (1.0 + std::abs(s0)) && s0.real() >= -1e-12) {
      if (std::abs(s0) < 1e-9)
        throw NumericalError("amplitude vanishes at k=0; ambiguous borderline data rejected");
      throw NumericalError("amplitude has a real zero away from k=0; not a valid |F|^2");
    }
    cplx root = std::sqrt(s0); // principal branch, Im >= 0 for s0 off the positive axis
    if (root.imag() < 0.0) root = -root;
    bool isBound = false;
    if (std::abs(root.real()) <= 1e-9 * std::abs(root)) {
      double kappa = root.imag();
      for (std::size_t j = 0; j < boundStateZeros.size(); ++j) {
        if (!matched[j] && std::abs(kappa - boundStateZeros[j]) <= 1e-9 * (1.0 + kappa)) {
          matched[j] = true;
          isBound = true;
          break;
        }
      }
    }
    F.zeros.push_back(isBound ? root : -root);
  }
  for (std::size_t j = 0; j < matched.size(); ++j) {
    if (!matched[j])
      throw NumericalError("bound state i*kappa is not a zero of the amplitude continuation");
  }

  for (cplx s0 : denS.roots()) {
    if (std::abs(s0.imag()) < 1e-9 * (1.0 + std::abs(s0)) && s0.real() >= -1e-12)
      throw NumericalError("amplitude has a pole on the real axis");
    cplx root = std::sqrt(s0);
    if (root.imag() < 0.0) root = -root;
    F.poles.push_back(-root); // all poles go to the open lower half-plane
  }

  // Simple zeros only on the imaginary axis.
  for (std::size_t a = 0; a < F.zeros.size(); ++a)
    for (std::size_t b = a + 1; b < F.zeros.size(); ++b)
      if (std::abs(F.zeros[a] - F.zeros[b]) <= coincidence_tol)
        throw NumericalError("amplitude with a repeated zero; multiplicity >= 2 rejected");

  int expect = (cls == AmplitudeClass::Mixed) ? 1 : 0;
  if (relative_degree(F) != expect)
    throw NumericalError("amplitude degree does not match the requested asymptotic class");
  F.gain = cplx(1.0);

  // The class normalization leaves no free gain, so the amplitude itself must
  // already be normalized; verify on a probe grid.
  for (int i = 1; i <= 8; ++i) {
    double k = 0.35 * i;
    cplx want = eval(amp2, cplx(k, 0.0));
    if (want.real() < 0.0 || std::abs(want.imag()) > 1e-8 * (1.0 + std::abs(want)))
      throw NumericalError("amplitude is not positive on the real axis");
    double got = std::norm(eval(F, cplx(k, 0.0)));
    if (std::abs(got - want.real()) > 1e-8 * (1.0 + std::abs(want)))
      throw NumericalError("spectral factor does not reproduce the amplitude (inconsistent data)");
  }
  return F;
}

cplx ExponentialSum::operator()(double y) const {
  cplx acc(0.0);
  for (const Term& t : terms) acc += t.coeff * std::exp(-t.rate * y);
  return acc;
}

double ExponentialSum::real_at(double y) const { return (*this)(y).real(); }

ExponentialSum ExponentialSum::derivative() const {
  ExponentialSum d;
  d.terms.reserve(terms.size());
  for (const Term& t : terms) d.terms.push_back({-t.rate * t.coeff, t.rate});
  return d;
}

void ExponentialSum::compress(double tol) {
  std::vector<Term> out;
  double scale = 0.0;
  for (const Term& t : terms) scale = std::max(scale, std::abs(t.coeff));
  for (const Term& t : terms) {
    bool merged = false;
    for (Term& o : out) {
      if (std::abs(o.rate - t.rate) <= 1e-10 * (1.0 + std::abs(t.rate))) {
        o.coeff += t.coeff;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(t);
  }
  std::erase_if(out, [&](const Term& t) { return std::abs(t.coeff) <= tol * scale; });
  terms = std::move(out);
}

ExponentialSum fourier_half_line(const RationalFn& r, cplx subtractConst) {
  RationalFn g = add_const(r, -subtractConst);
  if (std::abs(g.gain) == 0.0) return {};
  if (relative_degree(g) >= 0)
    throw NumericalError("half-line Fourier transform requires decay at infinity");
  for (cplx p : g.poles) {
    if (std::abs(p.imag()) <= 1e-10 * (1.0 + std::abs(p)))
      throw NumericalError("half-line Fourier transform with a pole on the real axis");
  }
  ExponentialSum sum;
  for (cplx p : g.poles) {
    if (p.imag() <= 0.0) continue;
    // i * Res(g, p) * e^{ipy}; rate = -ip has positive real part.
    sum.terms.push_back({iu * residue(g, p), -iu * p});
  }
  sum.compress();
  return sum;
}

} // namespace rational
} // namespace invspec
