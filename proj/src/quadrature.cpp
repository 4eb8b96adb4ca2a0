#include "invspec/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace invspec {
namespace quad {

namespace {
constexpr double euler_gamma = 0.57721566490153286061;
}

SiCi sici(double x) {
  if (x <= 0.0) throw NumericalError("sici requires x > 0");
  if (x <= 2.0) {
    double sum_s = 0.0, sum_c = 0.0;
    double term = x; // x^{2n+1}/(2n+1)!
    double x2 = x * x;
    for (int n = 0; n < 40; ++n) {
      int k = 2 * n + 1;
      sum_s += term / k;
      term *= -x2 / ((k + 1.0) * (k + 2.0));
      if (std::abs(term) < 1e-20) break;
    }
    double termc = -x2 / 2.0; // (-1)^n x^{2n}/(2n)! from n=1
    for (int n = 1; n < 40; ++n) {
      int k = 2 * n;
      sum_c += termc / k;
      termc *= -x2 / ((k + 1.0) * (k + 2.0));
      if (std::abs(termc) < 1e-20) break;
    }
    return {sum_s, euler_gamma + std::log(x) + sum_c};
  }
  // Modified Lentz continued fraction for the auxiliary complex function.
  const double eps = 1e-16, fpmin = 1e-300;
  cplx b(1.0, x);
  cplx c(1.0 / fpmin, 0.0);
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 2; i <= 400; ++i) {
    double a = -double(i - 1) * double(i - 1);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    cplx del = c * d;
    h *= del;
    if (std::abs(del - cplx(1.0)) < eps) break;
  }
  h *= cplx(std::cos(x), -std::sin(x));
  return {pi / 2.0 + h.imag(), -h.real()};
}

cplx e1_neg_imag(double x) {
  SiCi r = sici(x);
  return cplx(-r.ci, pi / 2.0 - r.si);
}

cplx filon_segment(double a, double b, cplx ga, cplx gb, double y) {
  double h = b - a;
  double th = y * h;
  cplx phi0, phi1;
  cplx it(0.0, th);
  if (std::abs(th) < 1e-3) {
    phi0 = 1.0 + it / 2.0 + it * it / 6.0 + it * it * it / 24.0;
    phi1 = 0.5 + it / 3.0 + it * it / 8.0 + it * it * it / 30.0;
  } else {
    cplx e = std::exp(it);
    phi0 = (e - 1.0) / it;
    phi1 = (e * (it - 1.0) + 1.0) / (it * it);
  }
  return std::exp(cplx(0.0, y * a)) * h * (ga * phi0 + (gb - ga) * phi1);
}

namespace {

// Per-interval quadratic interpolant q(t) = a + b u + c u^2 (u = t - t_j),
// averaged over the parabolas through the two neighbouring stencils. Both
// parabolas interpolate the endpoints, so q(t_j) = v_j exactly.
struct SegQuad {
  cplx a, b, c;
};

template <typename V>
SegQuad segment_quadratic(const std::vector<double>& t, const std::vector<V>& v, std::size_t j) {
  const std::size_t n = t.size();
  double h = t[j + 1] - t[j];
  cplx d1 = (cplx(v[j + 1]) - cplx(v[j])) / h;
  bool haveA = j >= 1, haveB = j + 2 < n;
  cplx bA{}, cA{}, bB{}, cB{};
  if (haveA) {
    double hm = t[j] - t[j - 1];
    cplx d0 = (cplx(v[j]) - cplx(v[j - 1])) / hm;
    cA = (d1 - d0) / (t[j + 1] - t[j - 1]);
    bA = d0 + cA * hm;
  }
  if (haveB) {
    double hp = t[j + 2] - t[j + 1];
    cplx d2 = (cplx(v[j + 2]) - cplx(v[j + 1])) / hp;
    cB = (d2 - d1) / (t[j + 2] - t[j]);
    bB = d1 - cB * h;
  }
  SegQuad q;
  q.a = cplx(v[j]);
  if (haveA && haveB) {
    q.b = 0.5 * (bA + bB);
    q.c = 0.5 * (cA + cB);
  } else if (haveA) {
    q.b = bA;
    q.c = cA;
  } else {
    q.b = bB;
    q.c = cB;
  }
  return q;
}

// Non-logarithmic part of int q(t)/(t-k) dt over [t1,t2]; the log coefficient
// q(k) is returned separately so principal-value pairing can combine it.
struct CauchySeg {
  cplx logCoeff; // multiplies log((t2-k)/(t1-k))
  cplx rest;
};

CauchySeg cauchy_segment_quad(double t1, double t2, const SegQuad& q, cplx k) {
  cplx kap = k - t1;
  cplx qk = q.a + q.b * kap + q.c * kap * kap;
  cplx qpk = q.b + 2.0 * q.c * kap;
  cplx d2 = (t2 - k) * (t2 - k) - (t1 - k) * (t1 - k);
  return {qk, qpk * (t2 - t1) + 0.5 * q.c * d2};
}

} // namespace

namespace {

constexpr int NT = tail_orders;

enum class Parity { None, Even, Odd };

std::array<cplx, NT> fit_side(const std::vector<double>& t, const std::vector<cplx>& v,
                              bool rightSide, double fitFraction, Parity parity) {
  const int n = static_cast<int>(t.size());
  int points = std::max(NT + 3, static_cast<int>(n * fitFraction / 2.0));
  points = std::min(points, n / 3);
  if (points < NT) return {};
  // Least squares in the scaled basis (K/t)^m on the outermost samples, via
  // QR: the basis is Vandermonde-like and normal equations square its
  // condition number, which wrecks the leading coefficient. Parity-pure data
  // uses only the matching orders; the complementary coefficients are exact
  // zeros, which matters downstream where the leading tail term gets
  // multiplied by powers of k.
  std::vector<int> orders;
  for (int m = 1; m <= NT; ++m) {
    if (parity == Parity::Even && m % 2 == 1) continue;
    if (parity == Parity::Odd && m % 2 == 0) continue;
    orders.push_back(m);
  }
  const double K = std::abs(rightSide ? t[n - 1] : t[0]);
  Eigen::MatrixXcd A(points, orders.size());
  Eigen::VectorXcd b(points);
  for (int i = 0; i < points; ++i) {
    int idx = rightSide ? n - 1 - i : i;
    double u = K / t[idx];
    for (std::size_t c = 0; c < orders.size(); ++c) A(i, c) = cplx(std::pow(u, orders[c]), 0.0);
    b(i) = v[idx];
  }
  Eigen::VectorXcd sol = Eigen::HouseholderQR<Eigen::MatrixXcd>(A).solve(b);
  std::array<cplx, NT> x{};
  for (std::size_t c = 0; c < orders.size(); ++c)
    x[orders[c] - 1] = sol(c) * std::pow(K, orders[c]);
  return x;
}

Parity detect_parity(const std::vector<double>& t, const std::vector<cplx>& v) {
  // The grids here are symmetric; compare v against its mirror.
  const std::size_t n = t.size();
  double evenDev = 0.0, oddDev = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t m = n - 1 - j;
    if (std::abs(t[j] + t[m]) > 1e-9 * (1.0 + std::abs(t[j]))) return Parity::None;
    evenDev = std::max(evenDev, std::abs(v[j] - v[m]));
    oddDev = std::max(oddDev, std::abs(v[j] + v[m]));
    scale = std::max(scale, std::abs(v[j]));
  }
  if (evenDev <= 1e-9 * (1e-300 + scale)) return Parity::Even;
  if (oddDev <= 1e-9 * (1e-300 + scale)) return Parity::Odd;
  return Parity::None;
}

} // namespace

TailModel fit_tail_model(const std::vector<double>& t, const std::vector<cplx>& v,
                         double fitFraction) {
  TailModel tm;
  Parity parity = detect_parity(t, v);
  tm.left = fit_side(t, v, false, fitFraction, parity);
  tm.right = fit_side(t, v, true, fitFraction, parity);
  return tm;
}

TailModel fit_tail_model(const std::vector<double>& t, const std::vector<double>& v,
                         double fitFraction) {
  std::vector<cplx> vc(v.begin(), v.end());
  return fit_tail_model(t, vc, fitFraction);
}

cplx oscillatory_tail(double K, double y, const std::array<cplx, tail_orders>& a, int side) {
  // O_m = int_K^inf e^{ity}/t^m dt; O_1 = E1(-iKy), then integrate by parts:
  // O_{m+1} = e^{iKy}/(m K^m) + (iy/m) O_m. On the left ray the integral is
  // (-1)^m conj(O_m) for real y.
  cplx eiky = std::exp(cplx(0.0, K * y));
  cplx o = e1_neg_imag(K * y);
  cplx acc(0.0);
  double Km = 1.0;
  for (int m = 1; m <= tail_orders; ++m) {
    double sign = (side > 0) ? 1.0 : ((m % 2 == 0) ? 1.0 : -1.0);
    acc += a[m - 1] * (side > 0 ? o : std::conj(o)) * sign;
    Km *= K;
    o = eiky / (double(m) * Km) + cplx(0.0, y / double(m)) * o;
  }
  return acc;
}

cplx cauchy_tail(double K, cplx k, const std::array<cplx, tail_orders>& a, int side) {
  // T_m = int_K^inf dt/(t^m (t-k)); T_1 = -log(1-k/K)/k and
  // T_m = (T_{m-1} - 1/((m-1)K^{m-1}))/k. Left ray: (-1)^{m+1} T_m(-k).
  std::array<cplx, tail_orders> T;
  cplx kk = (side > 0) ? k : -k;
  if (std::abs(kk) < 0.3 * K) {
    // The recursion below cancels badly for small |k|; sum the series
    // T_m = sum_n kk^n / ((m+n) K^{m+n}) instead.
    for (int m = 1; m <= tail_orders; ++m) {
      cplx acc(0.0), qn(1.0);
      double Kp = std::pow(K, m);
      for (int n = 0; n < 64; ++n) {
        cplx term = qn / (double(m + n) * Kp);
        acc += term;
        if (std::abs(term) < 1e-17 * std::abs(acc)) break;
        qn *= kk;
        Kp *= K;
      }
      T[m - 1] = acc;
    }
  } else {
    T[0] = -std::log(1.0 - kk / K) / kk;
    double Km = 1.0;
    for (int m = 2; m <= tail_orders; ++m) {
      Km *= K;
      T[m - 1] = (T[m - 2] - 1.0 / (double(m - 1) * Km)) / kk;
    }
  }
  cplx acc(0.0);
  for (int m = 1; m <= tail_orders; ++m) {
    double sign = (side > 0) ? 1.0 : ((m % 2 == 0) ? -1.0 : 1.0);
    acc += a[m - 1] * T[m - 1] * sign;
  }
  return acc;
}

cplx fourier_line(const std::vector<double>& t, const std::vector<cplx>& v, double y,
                  const TailModel& tail) {
  cplx acc(0.0);
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    SegQuad q = segment_quadratic(t, v, j);
    double h = t[j + 1] - t[j];
    double th = y * h;
    cplx it(0.0, th);
    cplx phi0, phi1, phi2;
    if (std::abs(th) < 1e-3) {
      phi0 = 1.0 + it / 2.0 + it * it / 6.0 + it * it * it / 24.0;
      phi1 = 0.5 + it / 3.0 + it * it / 8.0 + it * it * it / 30.0;
      phi2 = 1.0 / 3.0 + it / 4.0 + it * it / 10.0 + it * it * it / 36.0;
    } else {
      cplx e = std::exp(it);
      phi0 = (e - 1.0) / it;
      phi1 = (e * (it - 1.0) + 1.0) / (it * it);
      phi2 = (e * (it * it - 2.0 * it + 2.0) - 2.0) / (it * it * it);
    }
    acc += std::exp(cplx(0.0, y * t[j])) * h *
           (q.a * phi0 + q.b * h * phi1 + q.c * h * h * phi2);
  }
  acc += oscillatory_tail(-t.front(), y, tail.left, -1);
  acc += oscillatory_tail(t.back(), y, tail.right, +1);
  return acc / (2.0 * pi);
}

namespace {

// Segment integral of q(t)/(t-k). Near k the exact log form is used; far
// from k it cancels catastrophically (the interpolant extrapolated to k is
// huge against a tiny log), so a two-point Gauss rule takes over there.
cplx cauchy_segment_dispatch(double t1, double t2, const SegQuad& q, cplx k) {
  double h = t2 - t1;
  double dist = std::min(std::abs(cplx(t1, 0.0) - k), std::abs(cplx(t2, 0.0) - k));
  if (dist > 18.0 * h) {
    const double off = 0.5 * h / std::sqrt(3.0);
    double u1 = 0.5 * h - off, u2 = 0.5 * h + off;
    cplx f1 = (q.a + (q.b + q.c * u1) * u1) / (cplx(t1 + u1, 0.0) - k);
    cplx f2 = (q.a + (q.b + q.c * u2) * u2) / (cplx(t1 + u2, 0.0) - k);
    return 0.5 * h * (f1 + f2);
  }
  CauchySeg s = cauchy_segment_quad(t1, t2, q, k);
  return s.rest + s.logCoeff * std::log((t2 - k) / (t1 - k));
}

} // namespace

cplx cauchy_line(const std::vector<double>& t, const std::vector<cplx>& v, cplx k,
                 const TailModel& tail) {
  if (k.imag() == 0.0 && k.real() >= t.front() && k.real() <= t.back())
    throw NumericalError("cauchy_line requires k off the integration range");
  cplx acc(0.0);
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    SegQuad q = segment_quadratic(t, v, j);
    acc += cauchy_segment_dispatch(t[j], t[j + 1], q, k);
  }
  acc += cauchy_tail(-t.front(), k, tail.left, -1);
  acc += cauchy_tail(t.back(), k, tail.right, +1);
  return acc;
}

double hilbert_point(const std::vector<double>& t, const std::vector<double>& v, std::size_t i,
                     const TailModel& tail) {
  const std::size_t n = t.size();
  if (i == 0 || i + 1 >= n)
    throw NumericalError("hilbert_point is defined for interior grid nodes");
  const cplx k(t[i], 0.0);
  cplx acc(0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    SegQuad q = segment_quadratic(t, v, j);
    if (j == i - 1) {
      // Principal value across the node: q(t_i) = v_i on both adjacent
      // intervals, so their log singularities pair up into a finite term.
      CauchySeg s = cauchy_segment_quad(t[j], t[j + 1], q, k);
      acc += s.rest + s.logCoeff * std::log(t[i] - t[i - 1]) * (-1.0);
    } else if (j == i) {
      CauchySeg s = cauchy_segment_quad(t[j], t[j + 1], q, k);
      acc += s.rest + s.logCoeff * std::log(t[i + 1] - t[i]);
    } else {
      acc += cauchy_segment_dispatch(t[j], t[j + 1], q, k);
    }
  }
  acc += cauchy_tail(-t.front(), k, tail.left, -1);
  acc += cauchy_tail(t.back(), k, tail.right, +1);
  return acc.real();
}

cplx line_integral(const std::vector<double>& t, const std::vector<cplx>& v,
                   const TailModel& tail) {
  cplx acc(0.0);
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    SegQuad q = segment_quadratic(t, v, j);
    double h = t[j + 1] - t[j];
    acc += h * (q.a + q.b * h / 2.0 + q.c * h * h / 3.0);
  }
  // int_K^inf a/t^m = a/((m-1) K^{m-1}); the left ray contributes the
  // (-1)^m mirror. The m=1 pieces diverge separately and must cancel.
  double K_r = t.back(), K_l = -t.front();
  if (std::abs(tail.right[0] - tail.left[0]) >
      1e-3 * (1.0 + std::abs(tail.right[0]) + std::abs(tail.left[0])))
    throw NumericalError("line integral: 1/t tails of the two sides do not cancel");
  for (int m = 2; m <= tail_orders; ++m) {
    acc += tail.right[m - 1] / (double(m - 1) * std::pow(K_r, m - 1));
    acc += tail.left[m - 1] * ((m % 2 == 0) ? 1.0 : -1.0) / (double(m - 1) * std::pow(K_l, m - 1));
  }
  return acc;
}

std::vector<double> trapezoid_weights(const std::vector<double>& t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    double h = 0.5 * (t[j + 1] - t[j]);
    w[j] += h;
    w[j + 1] += h;
  }
  return w;
}

std::vector<double> graded_symmetric_grid(int n, double kmax, double grading) {
  int half = n / 2;
  std::vector<double> g(2 * half);
  double denom = std::sinh(grading);
  for (int i = 0; i < half; ++i) {
    double u = double(i + 1) / half;
    double v = kmax * std::sinh(grading * u) / denom;
    g[half + i] = v;
    g[half - 1 - i] = -v;
  }
  return g;
}

} // namespace quad
} // namespace invspec
