#include "invspec/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace invspec {

Polynomial::Polynomial(std::vector<cplx> coeff) : coeff_(std::move(coeff)) {
  if (coeff_.empty()) coeff_.push_back(cplx(0.0));
  trim();
}

Polynomial Polynomial::constant(cplx c) { return Polynomial(std::vector<cplx>{c}); }

Polynomial Polynomial::from_roots(const std::vector<cplx>& roots, cplx lead) {
  std::vector<cplx> asc{lead};
  for (cplx r : roots) {
    std::vector<cplx> next(asc.size() + 1, cplx(0.0));
    for (std::size_t j = 0; j < asc.size(); ++j) {
      next[j] += -r * asc[j];
      next[j + 1] += asc[j];
    }
    asc = std::move(next);
  }
  return Polynomial(asc);
}

void Polynomial::trim() {
  double scale = 0.0;
  for (cplx c : coeff_) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) {
    coeff_.assign(1, cplx(0.0));
    return;
  }
  while (coeff_.size() > 1 && std::abs(coeff_.back()) <= 1e-14 * scale) coeff_.pop_back();
}

bool Polynomial::is_zero() const {
  return coeff_.size() == 1 && std::abs(coeff_[0]) == 0.0;
}

cplx Polynomial::operator()(cplx x) const {
  cplx acc(0.0);
  for (std::size_t j = coeff_.size(); j-- > 0;) acc = acc * x + coeff_[j];
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeff_.size() == 1) return constant(cplx(0.0));
  std::vector<cplx> d(coeff_.size() - 1);
  for (std::size_t j = 1; j < coeff_.size(); ++j) d[j - 1] = double(j) * coeff_[j];
  return Polynomial(d);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<cplx> c(std::max(coeff_.size(), o.coeff_.size()), cplx(0.0));
  for (std::size_t j = 0; j < coeff_.size(); ++j) c[j] += coeff_[j];
  for (std::size_t j = 0; j < o.coeff_.size(); ++j) c[j] += o.coeff_[j];
  return Polynomial(c);
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  return *this + (o * cplx(-1.0));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  std::vector<cplx> c(coeff_.size() + o.coeff_.size() - 1, cplx(0.0));
  for (std::size_t a = 0; a < coeff_.size(); ++a)
    for (std::size_t b = 0; b < o.coeff_.size(); ++b) c[a + b] += coeff_[a] * o.coeff_[b];
  return Polynomial(c);
}

Polynomial Polynomial::operator*(cplx s) const {
  std::vector<cplx> c = coeff_;
  for (cplx& v : c) v *= s;
  return Polynomial(c);
}

std::vector<cplx> Polynomial::roots() const {
  const int n = degree();
  if (n <= 0) return {};
  if (n == 1) return {-coeff_[0] / coeff_[1]};

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) companion(j, n - 1) = -coeff_[j] / coeff_[n];
  for (int j = 1; j < n; ++j) companion(j, j - 1) = cplx(1.0);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("polynomial root solve failed to converge");

  Polynomial deriv = derivative();
  std::vector<cplx> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    cplx r = solver.eigenvalues()(j);
    // Newton polish, accepting only residual-improving steps: at a multiple
    // root both p and p' sit at roundoff level and the raw quotient can jump
    // O(1) away from an already excellent eigenvalue.
    for (int it = 0; it < 3; ++it) {
      cplx d = deriv(r);
      if (std::abs(d) < 1e-300) break;
      double res = std::abs((*this)(r));
      cplx step = (*this)(r) / d;
      if (!std::isfinite(std::abs(step)) || std::abs(step) > 0.1 * (1.0 + std::abs(r))) break;
      cplx cand = r - step;
      if (std::abs((*this)(cand)) >= res) break;
      r = cand;
    }
    out.push_back(r);
  }

  // Multiple roots come out of the eigensolver as clusters with O(eps^(1/m))
  // scatter; the scatter is nearly symmetric, so replacing a cluster by its
  // centroid restores close to full precision and keeps downstream zero/pole
  // cancellation reliable.
  double scale = 1.0;
  for (cplx r : out) scale = std::max(scale, std::abs(r));
  const double clusterTol = 1e-5 * scale;
  std::vector<int> group(out.size(), -1);
  int ngroups = 0;
  for (std::size_t a = 0; a < out.size(); ++a) {
    if (group[a] >= 0) continue;
    group[a] = ngroups;
    for (std::size_t b = a + 1; b < out.size(); ++b)
      if (group[b] < 0 && std::abs(out[a] - out[b]) < clusterTol) group[b] = ngroups;
    ++ngroups;
  }
  for (int gidx = 0; gidx < ngroups; ++gidx) {
    cplx centroid(0.0);
    int count = 0;
    for (std::size_t a = 0; a < out.size(); ++a)
      if (group[a] == gidx) {
        centroid += out[a];
        ++count;
      }
    if (count < 2) continue;
    centroid /= double(count);
    for (std::size_t a = 0; a < out.size(); ++a)
      if (group[a] == gidx) out[a] = centroid;
  }

  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

} // namespace invspec
