#include "invspec/inversion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>

#include "invspec/quadrature.hpp"

namespace invspec {
namespace inversion {

namespace {

// Explicit inverse of a growing dense matrix, extended once per appended
// row/column in O(n^2). The spectral-measure kernels can carry cosh-growing
// discrete terms whose solves cancel over many digits; callers choose
// extended precision when that growth is present.
template <typename T>
class BorderedInverse {
public:
  explicit BorderedInverse(int capacity) : cap_(capacity), inv_(std::size_t(capacity) * capacity) {}

  int size() const { return n_; }

  // Appends [ [M, u], [v^T, d] ]; u and v have length n.
  void append(const std::vector<T>& u, const std::vector<T>& v, T d) {
    if (n_ >= cap_) throw NumericalError("bordered inverse capacity exceeded");
    scratchU_.assign(n_, T(0));
    scratchV_.assign(n_, T(0));
    for (int i = 0; i < n_; ++i) {
      T acc(0);
      const T* row = &inv_[std::size_t(i) * cap_];
      for (int j = 0; j < n_; ++j) acc += row[j] * u[j];
      scratchU_[i] = acc;
    }
    for (int j = 0; j < n_; ++j) {
      T acc(0);
      for (int i = 0; i < n_; ++i) acc += v[i] * inv_[std::size_t(i) * cap_ + j];
      scratchV_[j] = acc;
    }
    T s = d;
    for (int i = 0; i < n_; ++i) s -= v[i] * scratchU_[i];
    if (std::abs((double)s) < 1e-300) throw NumericalError("singular kernel system");
    T sInv = T(1) / s;
    for (int i = 0; i < n_; ++i) {
      T* row = &inv_[std::size_t(i) * cap_];
      T ui = scratchU_[i] * sInv;
      for (int j = 0; j < n_; ++j) row[j] += ui * scratchV_[j];
      row[n_] = -ui;
    }
    T* last = &inv_[std::size_t(n_) * cap_];
    for (int j = 0; j < n_; ++j) last[j] = -scratchV_[j] * sInv;
    last[n_] = sInv;
    ++n_;
  }

  // x = inv * b
  void solve(const std::vector<T>& b, std::vector<T>& x) const {
    x.assign(n_, T(0));
    for (int i = 0; i < n_; ++i) {
      T acc(0);
      const T* row = &inv_[std::size_t(i) * cap_];
      for (int j = 0; j < n_; ++j) acc += row[j] * b[j];
      x[i] = acc;
    }
  }

private:
  int cap_;
  int n_ = 0;
  std::vector<T> inv_;
  std::vector<T> scratchU_, scratchV_;
};

constexpr double nystrom_step = 1.0 / 256.0;

// Kernel construction integrands are smooth; a 4x-thinned copy of the data
// grid keeps table builds cheap at no visible accuracy cost.
void thin_grid(const std::vector<double>& g, const std::vector<cplx>& v,
               std::vector<double>& gt, std::vector<cplx>& vt) {
  gt.clear();
  vt.clear();
  const std::size_t n = g.size();
  for (std::size_t j = 0; j < n; j += 4) {
    std::size_t m = n - 1 - j;
    (void)m;
    gt.push_back(g[j]);
    vt.push_back(v[j]);
  }
  if ((n - 1) % 4 != 0) {
    gt.push_back(g[n - 1]);
    vt.push_back(v[n - 1]);
  }
}

// One-sided 4-point derivative of lattice data; forward stencils cover the
// first points so the boundary value keeps full order.
std::vector<double> lattice_derivative(const std::vector<double>& f, double h) {
  std::vector<double> d(f.size(), 0.0);
  if (f.size() < 4) {
    for (std::size_t m = 1; m < f.size(); ++m) d[m] = (f[m] - f[m - 1]) / h;
    if (f.size() > 1) d[0] = d[1];
    return d;
  }
  for (std::size_t m = 0; m < f.size(); ++m) {
    if (m >= 3) {
      d[m] = (11.0 * f[m] - 18.0 * f[m - 1] + 9.0 * f[m - 2] - 2.0 * f[m - 3]) / (6.0 * h);
    } else {
      d[m] = (-11.0 * f[m] + 18.0 * f[m + 1] - 9.0 * f[m + 2] + 2.0 * f[m + 3]) / (6.0 * h);
    }
  }
  return d;
}

// Derivative of data on a nonuniform lattice by local quadratic fits.
std::vector<double> nonuniform_derivative(const std::vector<double>& xs,
                                          const std::vector<double>& f) {
  const std::size_t n = xs.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) {
    for (std::size_t m = 1; m < n; ++m) d[m] = (f[m] - f[m - 1]) / (xs[m] - xs[m - 1]);
    if (n > 1) d[0] = d[1];
    return d;
  }
  for (std::size_t m = 0; m < n; ++m) {
    std::size_t c = std::min(std::max<std::size_t>(m, 1), n - 2);
    double x0 = xs[c - 1], x1 = xs[c], x2 = xs[c + 1];
    double f0 = f[c - 1], f1 = f[c], f2 = f[c + 1];
    double d01 = (f1 - f0) / (x1 - x0);
    double d12 = (f2 - f1) / (x2 - x1);
    double d2 = (d12 - d01) / (x2 - x0);
    // derivative of the Newton quadratic at xs[m]
    d[m] = d01 + d2 * (2.0 * xs[m] - x0 - x1);
  }
  return d;
}

double interp_lattice(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return vs.front();
  if (x <= xs.front()) {
    // Linear extrapolation: the solve lattice starts half a step inside.
    double s = (vs[1] - vs[0]) / (xs[1] - xs[0]);
    return vs[0] + s * (x - xs[0]);
  }
  if (x >= xs.back()) return vs.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t hi = it - xs.begin();
  double w = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
  return vs[hi - 1] * (1.0 - w) + vs[hi] * w;
}

// Precomputed table of a smooth decaying kernel on [0, umax].
class KernelTable {
public:
  KernelTable() = default;
  KernelTable(std::function<double(double)> f, double umax, double step) : step_(step) {
    int n = static_cast<int>(umax / step) + 2;
    vals_.resize(n);
    for (int i = 0; i < n; ++i) vals_[i] = f(i * step);
  }
  double operator()(double u) const {
    double s = u / step_;
    int i = static_cast<int>(s);
    if (i < 0) throw NumericalError("kernel table evaluated at negative argument");
    if (i + 1 >= static_cast<int>(vals_.size())) return 0.0;
    double w = s - i;
    return vals_[i] * (1.0 - w) + vals_[i + 1] * w;
  }

private:
  double step_ = 1.0;
  std::vector<double> vals_;
};

// Shared growing-domain midpoint solve: appends nodes left to right and
// records the diagonal trace at each step.
template <typename T, typename Kernel>
void run_growing_solve(const Kernel& G, const std::vector<double>& edges,
                       const std::vector<double>& nodes, const std::vector<double>& weights,
                       std::vector<double>& xs, std::vector<double>& diag,
                       std::vector<std::vector<double>>& rows) {
  const int N = static_cast<int>(nodes.size());
  BorderedInverse<T> inv(N + 1);
  rows.reserve(N);
  std::vector<T> u, v, b, a;
  for (int m = 0; m < N; ++m) {
    u.assign(m, T(0));
    v.assign(m, T(0));
    for (int j = 0; j < m; ++j) {
      u[j] = T(weights[m] * G(nodes[j], nodes[m]));
      v[j] = T(weights[j] * G(nodes[m], nodes[j]));
    }
    T dd = T(1) + T(weights[m] * G(nodes[m], nodes[m]));
    inv.append(u, v, dd);

    double x = edges[m + 1];
    b.assign(m + 1, T(0));
    for (int j = 0; j <= m; ++j) b[j] = T(-G(x, nodes[j]));
    inv.solve(b, a);

    double trace = -G(x, x);
    for (int j = 0; j <= m; ++j) trace -= weights[j] * G(x, nodes[j]) * (double)a[j];
    xs[m] = x;
    diag[m] = trace;
    rows.emplace_back(a.begin(), a.end());
  }
}

} // namespace

double gl_kernel(const GLData& d, double x, double y) {
  double continuum;
  if (d.amp2) {
    // Closed form by residues: the transform of k^2/|F|^2 - 1 (or the
    // Dirichlet variant) is an exponential sum.
    RationalFn g;
    if (d.dirichlet) {
      g = rational::add_const(rational::div(rational::constant(cplx(1.0)), *d.amp2), cplx(-1.0));
    } else {
      RationalFn k2 = rational::mul(rational::monomial(), rational::monomial());
      g = rational::add_const(rational::div(k2, *d.amp2), cplx(-1.0));
    }
    ExponentialSum e = rational::fourier_half_line(g, cplx(0.0));
    double eSum = e.real_at(x + y);
    double eDiff = e.real_at(std::abs(x - y));
    continuum = d.dirichlet ? (eDiff - eSum) : (eSum + eDiff);
  } else {
    std::vector<cplx> g(d.grid.size());
    for (std::size_t j = 0; j < d.grid.size(); ++j) {
      double a2 = d.absF[j] * d.absF[j];
      g[j] = d.dirichlet ? cplx(1.0 / a2 - 1.0, 0.0)
                         : cplx(d.grid[j] * d.grid[j] / a2 - 1.0, 0.0);
    }
    quad::TailModel tail = quad::fit_tail_model(d.grid, g);
    double eSum = quad::fourier_line(d.grid, g, x + y + 1e-300, tail).real();
    double eDiff = quad::fourier_line(d.grid, g, std::abs(x - y) + 1e-300, tail).real();
    continuum = d.dirichlet ? (eDiff - eSum) : (eSum + eDiff);
  }
  double discrete = 0.0;
  for (std::size_t j = 0; j < d.kappa.size(); ++j) {
    double kj = d.kappa[j], gj = d.gl[j];
    if (d.dirichlet) {
      discrete += gj * gj / (kj * kj) * std::sinh(kj * x) * std::sinh(kj * y);
    } else {
      discrete += gj * gj * std::cosh(kj * x) * std::cosh(kj * y);
    }
  }
  return continuum + discrete;
}

GLOutput gl_solve(const GLData& d, const std::vector<double>& xGrid) {
  if (xGrid.empty()) throw ParseError("empty output grid");
  const double h = nystrom_step;
  const double xmax = *std::max_element(xGrid.begin(), xGrid.end());

  // The continuum transform is precomputed on a table; the discrete part is
  // evaluated directly (cosh products).
  std::function<double(double)> econt;
  ExponentialSum esum;
  KernelTable table;
  if (d.amp2) {
    RationalFn g;
    if (d.dirichlet) {
      g = rational::add_const(rational::div(rational::constant(cplx(1.0)), *d.amp2), cplx(-1.0));
    } else {
      RationalFn k2 = rational::mul(rational::monomial(), rational::monomial());
      g = rational::add_const(rational::div(k2, *d.amp2), cplx(-1.0));
    }
    esum = rational::fourier_half_line(g, cplx(0.0));
    econt = [&esum](double u) { return esum.real_at(u); };
  } else {
    std::vector<cplx> g(d.grid.size());
    for (std::size_t j = 0; j < d.grid.size(); ++j) {
      double a2 = d.absF[j] * d.absF[j];
      g[j] = d.dirichlet ? cplx(1.0 / a2 - 1.0, 0.0)
                         : cplx(d.grid[j] * d.grid[j] / a2 - 1.0, 0.0);
    }
    std::vector<double> gt;
    std::vector<cplx> vt;
    thin_grid(d.grid, g, gt, vt);
    quad::TailModel tail = quad::fit_tail_model(gt, vt);
    table = KernelTable(
        [&](double u) { return quad::fourier_line(gt, vt, u + 1e-12, tail).real(); },
        2.0 * (xmax + h) + 0.1, 2e-3);
    econt = [&table](double u) { return table(u); };
  }
  auto G = [&](double x, double y) {
    double continuum = d.dirichlet ? (econt(std::abs(x - y)) - econt(x + y))
                                   : (econt(x + y) + econt(std::abs(x - y)));
    double discrete = 0.0;
    for (std::size_t j = 0; j < d.kappa.size(); ++j) {
      double kj = d.kappa[j], gj = d.gl[j];
      discrete += d.dirichlet ? gj * gj / (kj * kj) * std::sinh(kj * x) * std::sinh(kj * y)
                              : gj * gj * std::cosh(kj * x) * std::cosh(kj * y);
    }
    return continuum + discrete;
  };

  // Edge lattice: the diagonal derivative is steepest near the origin, so the
  // first stretch is sub-refined before the regular step takes over.
  std::vector<double> edges{0.0};
  {
    double fine = h / 8.0, cut = std::min(0.25, xmax);
    double x = 0.0;
    while (x < cut - 1e-12) {
      x += fine;
      edges.push_back(x);
    }
    while (x < xmax + h - 1e-12) {
      x += h;
      edges.push_back(x);
    }
  }
  const int N = static_cast<int>(edges.size()) - 1;
  std::vector<double> nodes(N), weights(N);
  for (int j = 0; j < N; ++j) {
    nodes[j] = 0.5 * (edges[j] + edges[j + 1]);
    weights[j] = edges[j + 1] - edges[j];
  }

  // Extended precision only when the discrete cosh growth threatens the
  // conditioning of the solves.
  double growth = 0.0;
  for (double kj : d.kappa) growth = std::max(growth, kj * xmax);
  std::vector<double> xs(N), diag(N);
  std::vector<std::vector<double>> rows;
  if (growth > 8.0) {
    run_growing_solve<long double>(G, edges, nodes, weights, xs, diag, rows);
  } else {
    run_growing_solve<double>(G, edges, nodes, weights, xs, diag, rows);
  }

  std::vector<double> dv = nonuniform_derivative(xs, diag);
  std::vector<double> vOut(xGrid.size());
  for (std::size_t i = 0; i < xGrid.size(); ++i) vOut[i] = 2.0 * interp_lattice(xs, dv, xGrid[i]);

  GLOutput out;
  out.kernel.xGrid = xs;
  out.kernel.diagonal = diag;
  auto rowsPtr = std::make_shared<std::vector<std::vector<double>>>(std::move(rows));
  auto xsPtr = std::make_shared<std::vector<double>>(xs);
  auto nodesPtr = std::make_shared<std::vector<double>>(nodes);
  out.kernel.eval = [rowsPtr, xsPtr, nodesPtr](double x, double y) -> double {
    if (y > x || x <= 0.0 || y < 0.0) return 0.0;
    const auto& xv = *xsPtr;
    std::size_t m = std::upper_bound(xv.begin(), xv.end(), x) - xv.begin();
    m = std::min(m, rowsPtr->size() - 1);
    const auto& row = (*rowsPtr)[m];
    const auto& nd = *nodesPtr;
    std::size_t j = std::upper_bound(nd.begin(), nd.begin() + row.size(), y) - nd.begin();
    if (j >= row.size()) j = row.size() - 1;
    return row[j];
  };
  std::vector<double> xg = xGrid;
  out.V = forward::Potential::sampled(std::move(xg), std::move(vOut));
  out.cotAlphaOut = d.dirichlet ? 0.0 : G(0.0, 0.0);
  return out;
}

namespace {

// Exponential-sum scattering kernel: continuum residues plus discrete terms.
ExponentialSum marchenko_exp_sum(const MarchenkoData& d) {
  ExponentialSum e;
  if (d.dirichlet) {
    // (1/2pi) int [1 - S] e^{iky} dk = -transform of (S - 1)
    e = rational::fourier_half_line(*d.S, cplx(1.0));
    for (auto& t : e.terms) t.coeff = -t.coeff;
  } else {
    e = rational::fourier_half_line(*d.S, cplx(1.0));
  }
  for (std::size_t j = 0; j < d.kappa.size(); ++j)
    e.terms.push_back({cplx(d.m[j] * d.m[j], 0.0), cplx(d.kappa[j], 0.0)});
  e.compress();
  return e;
}

// Separable solve of the scattering-type equation for an exponential-sum
// kernel: K(x, y) = sum_i coef_i(x) e^{-rate_i y}, with the coefficient
// system differentiated analytically for the diagonal derivative.
struct SeparableDiag {
  std::vector<double> xs, diag, ddiag;
};

SeparableDiag separable_marchenko_diag(const ExponentialSum& M, const std::vector<double>& xs) {
  const int n = static_cast<int>(M.terms.size());
  SeparableDiag out;
  out.xs = xs;
  out.diag.resize(xs.size());
  out.ddiag.resize(xs.size());
  if (n == 0) return out;
  Eigen::MatrixXcd A(n, n), Ap(n, n);
  Eigen::VectorXcd b(n), bp(n), kv(n), kvp(n);
  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    double x = xs[ix];
    for (int i = 0; i < n; ++i) {
      cplx mi = M.terms[i].coeff, ri = M.terms[i].rate;
      for (int j = 0; j < n; ++j) {
        cplx rj = M.terms[j].rate;
        cplx base = mi * std::exp(-(ri + rj) * x) / (ri + rj);
        A(i, j) = base + ((i == j) ? cplx(1.0) : cplx(0.0));
        Ap(i, j) = -(ri + rj) * base;
      }
      b(i) = -mi * std::exp(-ri * x);
      bp(i) = ri * mi * std::exp(-ri * x);
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    kv = lu.solve(b);
    kvp = lu.solve(bp - Ap * kv);
    cplx trace(0.0), dtrace(0.0);
    for (int i = 0; i < n; ++i) {
      cplx ri = M.terms[i].rate;
      cplx e = std::exp(-ri * x);
      trace += kv(i) * e;
      dtrace += (kvp(i) - ri * kv(i)) * e;
    }
    if (std::abs(trace.imag()) > 1e-7 * (1.0 + std::abs(trace)))
      throw NumericalError("scattering kernel solve produced a non-real diagonal");
    out.diag[ix] = trace.real();
    out.ddiag[ix] = dtrace.real();
  }
  return out;
}

// Dense path for a tabulated kernel: shrinking-domain midpoint rule, growing
// the bordered inverse from the far end. Returns the diagonal trace on the
// uniform part of the lattice (x ascending).
void dense_marchenko_diag(const std::function<double(double)>& M, double xmax, double ymax,
                          std::vector<double>& xs, std::vector<double>& diag) {
  const double h = nystrom_step;
  // Uniform lattice on [0, xmax+h], geometric coarsening out to ymax.
  std::vector<double> edges;
  double x = 0.0;
  while (x < xmax + h) {
    edges.push_back(x);
    x += h;
  }
  double step = h;
  while (x < ymax) {
    edges.push_back(x);
    step *= 1.05;
    x += step;
  }
  edges.push_back(x);
  const int total = static_cast<int>(edges.size()) - 1;

  BorderedInverse<double> inv(total);
  std::vector<double> u, v, b, a;
  xs.clear();
  diag.clear();
  // Append nodes from the far end; after appending node m the system covers
  // [edges[m], ymax] and yields the solution for x = edges[m].
  std::vector<double> nodes(total), weights(total);
  for (int j = 0; j < total; ++j) {
    nodes[j] = 0.5 * (edges[j] + edges[j + 1]);
    weights[j] = edges[j + 1] - edges[j];
  }
  std::vector<int> active; // node indices in append order (descending)
  for (int m = total - 1; m >= 0; --m) {
    int sz = static_cast<int>(active.size());
    u.assign(sz, 0.0);
    v.assign(sz, 0.0);
    for (int s = 0; s < sz; ++s) {
      int i = active[s];
      u[s] = weights[m] * M(nodes[i] + nodes[m]); // column for new node
      v[s] = weights[i] * M(nodes[m] + nodes[i]); // new row over old nodes
    }
    double dd = 1.0 + weights[m] * M(2.0 * nodes[m]);
    inv.append(u, v, dd);
    active.push_back(m);

    double xm = edges[m];
    if (xm > xmax + 1e-12) continue;
    int n = static_cast<int>(active.size());
    b.assign(n, 0.0);
    for (int s = 0; s < n; ++s) b[s] = -M(xm + nodes[active[s]]);
    inv.solve(b, a);
    double trace = -M(2.0 * xm);
    for (int s = 0; s < n; ++s)
      trace -= weights[active[s]] * M(xm + nodes[active[s]]) * a[s];
    xs.push_back(xm);
    diag.push_back(trace);
  }
  std::reverse(xs.begin(), xs.end());
  std::reverse(diag.begin(), diag.end());
}

} // namespace

double marchenko_kernel(const MarchenkoData& d, double y) {
  if (d.S) {
    ExponentialSum e = marchenko_exp_sum(d);
    return e.real_at(y);
  }
  std::vector<cplx> g(d.grid.size());
  for (std::size_t j = 0; j < d.grid.size(); ++j)
    g[j] = d.dirichlet ? (cplx(1.0) - d.Svals[j]) : (d.Svals[j] - cplx(1.0));
  std::vector<double> gt;
  std::vector<cplx> vt;
  thin_grid(d.grid, g, gt, vt);
  quad::TailModel tail = quad::fit_tail_model(gt, vt);
  double val = quad::fourier_line(gt, vt, y, tail).real();
  for (std::size_t j = 0; j < d.kappa.size(); ++j)
    val += d.m[j] * d.m[j] * std::exp(-d.kappa[j] * y);
  return val;
}

MarchenkoOutput marchenko_solve(const MarchenkoData& d, const std::vector<double>& xGrid) {
  if (xGrid.empty()) throw ParseError("empty output grid");
  const double xmax = *std::max_element(xGrid.begin(), xGrid.end());
  MarchenkoOutput out;

  if (d.S) {
    ExponentialSum M = marchenko_exp_sum(d);
    // Per-x systems are independent; evaluate at the requested points.
    SeparableDiag sd = separable_marchenko_diag(M, xGrid);
    std::vector<double> vOut(xGrid.size());
    for (std::size_t i = 0; i < xGrid.size(); ++i) vOut[i] = -2.0 * sd.ddiag[i];
    out.kernel.xGrid = sd.xs;
    out.kernel.diagonal = sd.diag;
    auto Mcopy = std::make_shared<ExponentialSum>(M);
    out.kernel.eval = [Mcopy](double x, double y) -> double {
      if (y < x) return 0.0;
      // Re-solve the coefficient system at this x; cheap at desk scale.
      const auto& M = *Mcopy;
      const int n = static_cast<int>(M.terms.size());
      if (n == 0) return 0.0;
      Eigen::MatrixXcd A(n, n);
      Eigen::VectorXcd b(n);
      for (int i = 0; i < n; ++i) {
        cplx mi = M.terms[i].coeff, ri = M.terms[i].rate;
        for (int j = 0; j < n; ++j) {
          cplx rj = M.terms[j].rate;
          A(i, j) = mi * std::exp(-(ri + rj) * x) / (ri + rj) +
                    ((i == j) ? cplx(1.0) : cplx(0.0));
        }
        b(i) = -mi * std::exp(-ri * x);
      }
      Eigen::VectorXcd kv = Eigen::PartialPivLU<Eigen::MatrixXcd>(A).solve(b);
      cplx acc(0.0);
      for (int i = 0; i < n; ++i) acc += kv(i) * std::exp(-M.terms[i].rate * y);
      return acc.real();
    };
    std::vector<double> xg = xGrid;
    out.V = forward::Potential::sampled(std::move(xg), std::move(vOut));
    return out;
  }

  // Sampled path: tabulate the kernel, then the shrinking dense solve.
  double kappaMin = 1.0;
  for (double k : d.kappa) kappaMin = std::min(kappaMin, k);
  double ymax = xmax + std::max(12.0, 18.0 / std::max(kappaMin, 0.5));
  KernelTable table([&](double y) { return marchenko_kernel(d, y + 1e-12); },
                    2.0 * ymax + 0.1, 2e-3);
  std::vector<double> xs, diag;
  dense_marchenko_diag([&](double y) { return table(y); }, xmax, ymax, xs, diag);
  std::vector<double> dv = lattice_derivative(diag, nystrom_step);
  std::vector<double> vOut(xGrid.size());
  for (std::size_t i = 0; i < xGrid.size(); ++i)
    vOut[i] = -2.0 * interp_lattice(xs, dv, xGrid[i]);
  out.kernel.xGrid = xs;
  out.kernel.diagonal = diag;
  out.kernel.eval = [](double, double) { return 0.0; };
  std::vector<double> xg = xGrid;
  out.V = forward::Potential::sampled(std::move(xg), std::move(vOut));
  return out;
}

FullLineData build_full_line(const schwarz::JostFn& Falpha, const schwarz::JostFn& Fbeta,
                             bool alphaDirichlet, double cotAlpha, double cotBeta) {
  FullLineData out;
  const bool rationalPath = Falpha.rationalForm && Fbeta.rationalForm;

  if (rationalPath) {
    using namespace rational;
    RationalFn K = monomial();
    RationalFn Fa = *Falpha.rationalForm, Fb = *Fbeta.rationalForm;
    RationalFn num, den, T;
    if (alphaDirichlet) {
      num = sub(mul(add_const(K, cplx(0.0, -cotBeta)), Fa), Fb);
      den = add(mul(add_const(K, cplx(0.0, cotBeta)), Fa), Fb);
      T = div(scale(K, 2.0), den);
    } else {
      double hba = cotBeta - cotAlpha;
      num = sub(mul(add_const(K, cplx(0.0, -cotBeta)), Fa),
                mul(add_const(K, cplx(0.0, -cotAlpha)), Fb));
      den = sub(mul(add_const(K, cplx(0.0, cotBeta)), Fa),
                mul(add_const(K, cplx(0.0, cotAlpha)), Fb));
      T = div(scale(K, 2.0 * iu * hba), den);
    }
    RationalFn L = div(num, den);
    RationalFn R = scale(div(mul(reflect(L), T), reflect(T)), cplx(-1.0));
    out.L = L;
    out.T = T;
    out.R = R;

    for (cplx p : T.poles) {
      if (p.imag() <= 1e-10) continue;
      if (std::abs(p.real()) > 1e-7 * p.imag())
        throw NumericalError("transmission pole off the imaginary axis");
      out.tau.push_back(p.imag());
    }
    std::sort(out.tau.begin(), out.tau.end());
    const int N = static_cast<int>(out.tau.size());
    for (int j = 0; j < N; ++j) {
      cplx pt(0.0, out.tau[j]);
      cplx resL = residue(L, pt);
      cplx resT = residue(T, pt);
      cplx cr2 = -iu * resL;
      if (!(cr2.real() > 0.0) || std::abs(cr2.imag()) > 1e-8 * (1.0 + std::abs(cr2)))
        throw NumericalError("left-reflection residue is not consistent with a bound state");
      double cr = std::sqrt(cr2.real());
      cplx gam = resL / resT;
      if (std::abs(gam.imag()) > 1e-8 * (1.0 + std::abs(gam)))
        throw NumericalError("dependency constant is not real");
      double want = ((N - 1 - j) % 2 == 0) ? 1.0 : -1.0;
      if (gam.real() * want <= 0.0)
        throw NumericalError("dependency constant has the wrong sign pattern");
      out.cr.push_back(cr);
      out.gamma.push_back(gam.real());
      out.cl.push_back(cr / std::abs(gam.real()));
    }
  } else {
    // Sampled path: grid functions plus a sign scan for the bound states.
    out.grid = Falpha.grid;
    const std::size_t n = out.grid.size();
    out.Lvals.resize(n);
    out.Tvals.resize(n);
    out.Rvals.resize(n);
    double hba = cotBeta - cotAlpha;
    auto denAt = [&](cplx k) {
      if (alphaDirichlet) return (k + iu * cotBeta) * Falpha(k) + Fbeta(k);
      return (k + iu * cotBeta) * Falpha(k) - (k + iu * cotAlpha) * Fbeta(k);
    };
    auto numAt = [&](cplx k) {
      if (alphaDirichlet) return (k - iu * cotBeta) * Falpha(k) - Fbeta(k);
      return (k - iu * cotBeta) * Falpha(k) - (k - iu * cotAlpha) * Fbeta(k);
    };
    auto Tat = [&](cplx k) {
      return alphaDirichlet ? 2.0 * k / denAt(k) : 2.0 * iu * k * hba / denAt(k);
    };
    for (std::size_t j = 0; j < n; ++j) {
      cplx k(out.grid[j], 0.0);
      out.Lvals[j] = numAt(k) / denAt(k);
      out.Tvals[j] = Tat(k);
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t mj = n - 1 - j; // -k on the symmetric grid
      out.Rvals[j] = -out.Lvals[mj] * out.Tvals[j] / out.Tvals[mj];
    }
    // Bound states: zeros of the denominator on the positive imaginary axis.
    auto probe = [&](double kap) {
      cplx v = denAt(iu * kap);
      return alphaDirichlet ? v.imag() : v.real();
    };
    double kmax = std::abs(cotBeta) + std::abs(cotAlpha) + 3.0;
    double prevK = 1e-3, prevV = probe(prevK);
    for (int i = 1; i <= 400; ++i) {
      double kap = 1e-3 * std::pow(kmax / 1e-3, i / 400.0);
      double val = probe(kap);
      if (val * prevV < 0.0) {
        double a = prevK, bend = kap, fa = prevV;
        while (bend - a > 1e-11 * (1.0 + bend)) {
          double mid = 0.5 * (a + bend);
          double fm = probe(mid);
          if (fm * fa <= 0.0) {
            bend = mid;
          } else {
            a = mid;
            fa = fm;
          }
        }
        out.tau.push_back(0.5 * (a + bend));
      }
      prevK = kap;
      prevV = val;
    }
    const int N = static_cast<int>(out.tau.size());
    for (int j = 0; j < N; ++j) {
      double tau = out.tau[j];
      double dstep = 1e-5 * (1.0 + tau);
      cplx dplus = denAt(iu * (tau + dstep)), dminus = denAt(iu * (tau - dstep));
      cplx dprime = (dplus - dminus) / (2.0 * iu * dstep);
      cplx resL = numAt(iu * tau) / dprime;
      cplx resT = (alphaDirichlet ? 2.0 * (iu * tau) : 2.0 * iu * (iu * tau) * hba) / dprime;
      cplx cr2 = -iu * resL;
      if (!(cr2.real() > 0.0))
        throw NumericalError("left-reflection residue is not consistent with a bound state");
      double cr = std::sqrt(cr2.real());
      cplx gam = resL / resT;
      double want = ((N - 1 - j) % 2 == 0) ? 1.0 : -1.0;
      if (gam.real() * want <= 0.0)
        throw NumericalError("dependency constant has the wrong sign pattern");
      out.cr.push_back(cr);
      out.gamma.push_back(gam.real());
      out.cl.push_back(cr / std::abs(gam.real()));
    }
  }

  // Unitarity |L|^2 + |T|^2 = 1 on a probe set.
  for (int i = 1; i <= 16; ++i) {
    double k = 0.45 * i;
    double mod;
    if (out.L) {
      mod = std::norm(rational::eval(*out.L, cplx(k, 0.0))) +
            std::norm(rational::eval(*out.T, cplx(k, 0.0)));
    } else {
      auto it = std::lower_bound(out.grid.begin(), out.grid.end(), k);
      std::size_t j = it - out.grid.begin();
      mod = std::norm(out.Lvals[j]) + std::norm(out.Tvals[j]);
      k = out.grid[j];
    }
    if (std::abs(mod - 1.0) > 1e-6)
      throw NumericalError("full-line coefficients violate |L|^2+|T|^2=1: inconsistent pair");
  }
  return out;
}

namespace {

ExponentialSum omega_exp_sum(const RationalFn& coef, const std::vector<double>& tau,
                             const std::vector<double>& c) {
  ExponentialSum e = rational::fourier_half_line(coef, cplx(0.0));
  for (std::size_t j = 0; j < tau.size(); ++j)
    e.terms.push_back({cplx(c[j] * c[j], 0.0), cplx(tau[j], 0.0)});
  e.compress();
  return e;
}

std::vector<cplx> omega_grid_values(const FullLineData& fl, bool leftEquation) {
  return leftEquation ? fl.Rvals : fl.Lvals;
}

} // namespace

FaddeevOutput faddeev_marchenko_solve(const FullLineData& fl, const std::vector<double>& xGrid) {
  if (xGrid.empty()) throw ParseError("empty output grid");
  const double xmax = *std::max_element(xGrid.begin(), xGrid.end());
  const double h = nystrom_step;
  FaddeevOutput out;
  const double negSpan = 2.0;

  // The shifted form of both full-line equations matches the half-line
  // scattering equation, so the same solvers apply with the corresponding
  // kernel: the left equation recovers x >= 0, the right equation probes the
  // zero extension on x < 0 (its kernel argument stays positive there).
  if (fl.R) {
    ExponentialSum omegaL = omega_exp_sum(*fl.R, fl.tau, fl.cl);
    SeparableDiag sd = separable_marchenko_diag(omegaL, xGrid);
    std::vector<double> vOut(xGrid.size());
    for (std::size_t i = 0; i < xGrid.size(); ++i) vOut[i] = -2.0 * sd.ddiag[i];
    std::vector<double> xg = xGrid;
    out.V = forward::Potential::sampled(std::move(xg), std::move(vOut));

    ExponentialSum omegaR = omega_exp_sum(*fl.L, fl.tau, fl.cr);
    int Nn = static_cast<int>(negSpan / h);
    std::vector<double> xhat(Nn);
    for (int m = 0; m < Nn; ++m) xhat[m] = (m + 1) * h;
    SeparableDiag sn = separable_marchenko_diag(omegaR, xhat);
    for (int m = Nn - 1; m >= 0; --m) {
      out.xNegative.push_back(-xhat[m]);
      out.vNegative.push_back(-2.0 * sn.ddiag[m]);
    }
    return out;
  }

  // Sampled path.
  auto makeTable = [&](bool leftEq, double ymax) {
    std::vector<cplx> vals0 = omega_grid_values(fl, leftEq);
    std::vector<double> grid;
    std::vector<cplx> vals;
    thin_grid(fl.grid, vals0, grid, vals);
    quad::TailModel tail = quad::fit_tail_model(grid, vals);
    const auto& c = leftEq ? fl.cl : fl.cr;
    auto tau = fl.tau;
    return KernelTable(
        [&, c, tau](double y) {
          double v = quad::fourier_line(grid, vals, y + 1e-12, tail).real();
          for (std::size_t j = 0; j < tau.size(); ++j)
            v += c[j] * c[j] * std::exp(-tau[j] * y);
          return v;
        },
        2.0 * ymax + 0.1, 2e-3);
  };
  double tauMin = 1.0;
  for (double t : fl.tau) tauMin = std::min(tauMin, t);
  double ymax = xmax + std::max(12.0, 18.0 / std::max(tauMin, 0.5));
  KernelTable left = makeTable(true, ymax);
  std::vector<double> xs, diag;
  dense_marchenko_diag([&](double y) { return left(y); }, xmax, ymax, xs, diag);
  std::vector<double> dv = lattice_derivative(diag, h);
  std::vector<double> vOut(xGrid.size());
  for (std::size_t i = 0; i < xGrid.size(); ++i)
    vOut[i] = -2.0 * interp_lattice(xs, dv, xGrid[i]);
  std::vector<double> xg = xGrid;
  out.V = forward::Potential::sampled(std::move(xg), std::move(vOut));

  double ymaxNeg = negSpan + std::max(12.0, 18.0 / std::max(tauMin, 0.5));
  KernelTable right = makeTable(false, ymaxNeg);
  std::vector<double> xsN, diagN;
  dense_marchenko_diag([&](double y) { return right(y); }, negSpan, ymaxNeg, xsN, diagN);
  std::vector<double> dvN = lattice_derivative(diagN, h);
  for (std::size_t m = xsN.size(); m-- > 0;) {
    if (xsN[m] <= 1e-12) continue;
    out.xNegative.push_back(-xsN[m]);
    out.vNegative.push_back(-2.0 * dvN[m]);
  }
  return out;
}

} // namespace inversion
} // namespace invspec
