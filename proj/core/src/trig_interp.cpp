#include "gifga/trig_interp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gifga {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

TrigInterp::TrigInterp(const std::vector<double>& values, double x0,
                       double period)
    : n_(static_cast<int>(values.size())), x0_(x0), period_(period) {
  if (n_ < 2 || n_ % 2 != 0)
    throw std::invalid_argument("TrigInterp: need an even number of samples");
  c_.assign(n_, {0.0, 0.0});
  // plain DFT; setup-only cost, n is small (default 200)
  const int half = n_ / 2;
  for (int k = -half; k < half; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < n_; ++j)
      acc += values[j] * std::polar(1.0, -two_pi * k * j / n_);
    c_[k + half] = acc / static_cast<double>(n_);
  }
}

void TrigInterp::eval(double x, double* f, double* df, double* ddf) const {
  const int half = n_ / 2;
  const double t = two_pi * (x - x0_) / period_;
  const std::complex<double> z = std::polar(1.0, t);
  std::complex<double> zk = std::polar(1.0, -half * t);
  std::complex<double> s0{0, 0}, s1{0, 0}, s2{0, 0};
  for (int k = -half; k < half; ++k) {
    const std::complex<double> term = c_[k + half] * zk;
    const double w = two_pi * k / period_;
    s0 += term;
    if (k != -half) s1 += std::complex<double>(0.0, w) * term;  // drop Nyquist
    s2 += -w * w * term;
    zk *= z;
  }
  if (f) *f = s0.real();
  if (df) *df = s1.real();
  if (ddf) *ddf = s2.real();
}

double TrigInterp::value(double x) const {
  double f;
  eval(x, &f, nullptr, nullptr);
  return f;
}

double TrigInterp::deriv1(double x) const {
  double df;
  eval(x, nullptr, &df, nullptr);
  return df;
}

double TrigInterp::deriv2(double x) const {
  double ddf;
  eval(x, nullptr, nullptr, &ddf);
  return ddf;
}

}  // namespace gifga
