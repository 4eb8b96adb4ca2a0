#pragma once

#include <array>
#include <vector>

#include "invspec/base.hpp"

namespace invspec {
namespace quad {

// Sine and cosine integrals for x > 0.
struct SiCi {
  double si;
  double ci;
};
SiCi sici(double x);

// E1(-ix) = -Ci(x) + i(pi/2 - Si(x)) = int_x^inf e^{is}/s ds for x > 0.
cplx e1_neg_imag(double x);

// Integral over [a,b] of the linear interpolant of g times e^{iyt}.
cplx filon_segment(double a, double b, cplx ga, cplx gb, double y);

// Asymptotic continuation of grid data beyond the last samples:
// v(t) ~ sum_m a[m-1]/t^m on each side.
inline constexpr int tail_orders = 6;
struct TailModel {
  std::array<cplx, tail_orders> left{};
  std::array<cplx, tail_orders> right{};
};
TailModel fit_tail_model(const std::vector<double>& t, const std::vector<cplx>& v,
                         double fitFraction = 0.12);
TailModel fit_tail_model(const std::vector<double>& t, const std::vector<double>& v,
                         double fitFraction = 0.12);

// int of (tail model) * e^{ity} over t > K (side=+1) or t < -K (side=-1), y > 0.
cplx oscillatory_tail(double K, double y, const std::array<cplx, tail_orders>& a, int side);

// int of (tail model) / (t - k) over one side ray; k anywhere off the ray.
cplx cauchy_tail(double K, cplx k, const std::array<cplx, tail_orders>& a, int side);

// (1/2pi) int v(t) e^{ity} dt over the whole line: Filon-trapezoid on the grid
// plus analytic tails. y > 0.
cplx fourier_line(const std::vector<double>& t, const std::vector<cplx>& v, double y,
                  const TailModel& tail);

// int v(t)/(t - k) dt over the whole line for k off the real axis. Near-axis k
// (|Im k| small) is handled by subtracting an anchored Lorentzian carrier with
// a closed-form integral, so accuracy does not degrade as Im k -> 0.
cplx cauchy_line(const std::vector<double>& t, const std::vector<cplx>& v, cplx k,
                 const TailModel& tail);

// PV int v(t)/(t - t_i) dt at a grid node, same interpolation rule.
double hilbert_point(const std::vector<double>& t, const std::vector<double>& v, std::size_t i,
                     const TailModel& tail);

// int v(t) dt over the whole line. The leading tail order must cancel between
// the sides (odd-type data); orders >= 2 are integrated from the model.
cplx line_integral(const std::vector<double>& t, const std::vector<cplx>& v,
                   const TailModel& tail);

// Trapezoid weights for a strictly increasing grid.
std::vector<double> trapezoid_weights(const std::vector<double>& t);

// Symmetric grid of n points spanning [-kmax, kmax], graded toward 0 (sinh
// map), excluding 0 itself.
std::vector<double> graded_symmetric_grid(int n, double kmax, double grading = 8.0);

} // namespace quad
} // namespace invspec
