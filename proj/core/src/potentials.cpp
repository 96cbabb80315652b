#include "gifga/potentials.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gifga {

namespace {
constexpr double pi = std::numbers::pi;
}

PeriodicPotential fourier_coefficients(const std::function<double(double)>& V,
                                       int lambda) {
  if (lambda < 1) throw std::invalid_argument("fourier_coefficients: lambda < 1");
  const int n = std::max(8 * lambda, 64);
  std::vector<double> samples(n);
  for (int m = 0; m < n; ++m) {
    const double x = -pi + 2.0 * pi * m / n;
    samples[m] = V(x);
    if (!std::isfinite(samples[m]))
      throw std::runtime_error("fourier_coefficients: non-finite potential sample");
  }

  PeriodicPotential out;
  out.lambda = lambda;
  out.eval = V;
  const int kmax = 2 * lambda - 1;
  out.coeffs.assign(2 * kmax + 1, {0.0, 0.0});
  for (int k = -kmax; k <= kmax; ++k) {
    cplx acc{0.0, 0.0};
    for (int m = 0; m < n; ++m) {
      const double x = -pi + 2.0 * pi * m / n;
      acc += samples[m] * std::polar(1.0, -k * x);
    }
    out.coeffs[k + kmax] = acc / static_cast<double>(n);
  }
  // real potential: coeff(-k) = conj(coeff(k)), enforce by averaging
  for (int k = 1; k <= kmax; ++k) {
    const cplx avg = 0.5 * (out.coeffs[kmax + k] + std::conj(out.coeffs[kmax - k]));
    out.coeffs[kmax + k] = avg;
    out.coeffs[kmax - k] = std::conj(avg);
  }
  out.coeffs[kmax] = cplx{out.coeffs[kmax].real(), 0.0};
  return out;
}

PeriodicPotential make_lattice(const std::string& kind, double param, int lambda) {
  if (kind == "cosine")
    return fourier_coefficients([](double x) { return std::cos(x); }, lambda);
  if (kind == "gaussian-bump") {
    const double a = param > 0 ? param : 25.0;
    return fourier_coefficients([a](double x) { return std::exp(-a * x * x); },
                                lambda);
  }
  if (kind == "zero")
    return fourier_coefficients([](double) { return 0.0; }, lambda);
  throw std::invalid_argument("make_lattice: unknown kind '" + kind + "'");
}

ExternalPotential make_external(const std::string& kind) {
  ExternalPotential U;
  if (kind == "zero") {
    U.value = [](double) { return 0.0; };
    U.grad = [](double) { return 0.0; };
    U.hess = [](double) { return 0.0; };
    U.zero = true;
  } else if (kind == "harmonic") {
    U.value = [](double x) { return 0.5 * x * x; };
    U.grad = [](double x) { return x; };
    U.hess = [](double) { return 1.0; };
  } else if (kind == "cosine") {
    U.value = [](double x) { return std::cos(x); };
    U.grad = [](double x) { return -std::sin(x); };
    U.hess = [](double x) { return -std::cos(x); };
  } else {
    throw std::invalid_argument("make_external: unknown kind '" + kind + "'");
  }
  return U;
}

}  // namespace gifga
