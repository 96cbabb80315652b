#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace gifga {

using cplx = std::complex<double>;

// Unit cell [-pi, pi) and Brillouin zone [0, 1).
struct LatticeSpec {
  static constexpr double cell_min = -3.14159265358979323846;
  static constexpr double cell_len = 2.0 * 3.14159265358979323846;
  static constexpr double brillouin_len = 1.0;
};

// 2pi-periodic lattice potential held as truncated Fourier data.
// coeff(k) ~ (1/2pi) \int_cell V(x) e^{-ikx} dx for |k| <= 2*lambda - 1.
struct PeriodicPotential {
  int lambda = 0;
  std::vector<cplx> coeffs;            // index k + 2*lambda - 1
  std::function<double(double)> eval;  // real-space evaluator

  cplx coeff(int k) const {
    const int i = k + 2 * lambda - 1;
    if (i < 0 || i >= static_cast<int>(coeffs.size())) return {0.0, 0.0};
    return coeffs[i];
  }
  int max_mode() const { return 2 * lambda - 1; }
};

// Smooth external potential with analytic first and second derivatives.
struct ExternalPotential {
  std::function<double(double)> value, grad, hess;
  bool zero = false;  // lets the propagator skip Berry-phase bookkeeping
};

// DFT of V on a uniform cell grid of >= 8*lambda points; conjugate symmetry
// is enforced so the stored potential is exactly real-valued.
PeriodicPotential fourier_coefficients(const std::function<double(double)>& V,
                                       int lambda);

// Built-in families: lattice {"cosine", "gaussian-bump", "zero"} (param is the
// bump width alpha in exp(-alpha x^2)), external {"zero", "harmonic", "cosine"}.
PeriodicPotential make_lattice(const std::string& kind, double param, int lambda);
ExternalPotential make_external(const std::string& kind);

}  // namespace gifga
