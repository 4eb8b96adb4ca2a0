#pragma once

#include <vector>

#include "invspec/base.hpp"

namespace invspec {

// Dense complex polynomial, coefficients in ascending powers. Degrees stay
// small here (products of a handful of linear factors), so re-rooting through
// a companion matrix is cheap and robust.
class Polynomial {
public:
  Polynomial() : coeff_{cplx(0.0)} {}
  explicit Polynomial(std::vector<cplx> coeff);
  static Polynomial constant(cplx c);
  static Polynomial from_roots(const std::vector<cplx>& roots, cplx lead = cplx(1.0));

  int degree() const { return static_cast<int>(coeff_.size()) - 1; }
  const std::vector<cplx>& coefficients() const { return coeff_; }
  cplx lead() const { return coeff_.back(); }
  bool is_zero() const;

  cplx operator()(cplx x) const;
  Polynomial derivative() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(cplx s) const;

  // All roots with multiplicity, via the eigenvalues of the companion matrix,
  // each polished by a few Newton steps.
  std::vector<cplx> roots() const;

private:
  void trim();
  std::vector<cplx> coeff_;
};

} // namespace invspec
