#pragma once

#include <complex>
#include <vector>

namespace gifga {

// Trigonometric interpolant of real periodic data on a uniform grid
// x_j = x0 + j * period / n.  Derivatives come from spectral differentiation
// of the same interpolant; the Nyquist mode is dropped for odd derivatives.
class TrigInterp {
 public:
  TrigInterp() = default;
  TrigInterp(const std::vector<double>& values, double x0, double period);

  double value(double x) const;
  double deriv1(double x) const;
  double deriv2(double x) const;

  // single-pass evaluation; null pointers are skipped
  void eval(double x, double* f, double* df, double* ddf) const;

  int size() const { return n_; }

 private:
  int n_ = 0;
  double x0_ = 0.0, period_ = 1.0;
  std::vector<std::complex<double>> c_;  // modes k = -n/2 .. n/2-1
};

}  // namespace gifga
