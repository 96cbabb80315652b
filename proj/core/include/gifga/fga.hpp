#pragma once

#include <functional>
#include <vector>

#include "gifga/bloch.hpp"
#include "gifga/dynamics.hpp"

namespace gifga {

// Initial wavefunction with a declared support radius (|psi| negligible
// outside [-support, support]) at a fixed semiclassical parameter.
struct InitialData {
  std::function<cplx(double)> psi;
  double support = 0.0;
  double eps = 0.0;
};

// Complex samples on a uniform grid.
struct WaveField {
  double x0 = 0.0, dx = 0.0;
  std::vector<cplx> values;

  int size() const { return static_cast<int>(values.size()); }
  double x(int i) const { return x0 + i * dx; }
  double l2norm() const;
};

WaveField make_grid(double x0, double dx, int n);

// windowed Bloch transform values w_n(q^I, p^J)
struct FgaCoefficients {
  PhaseSpaceMesh mesh;
  int n_bands = 0;
  double eps = 0.0;
  std::vector<cplx> w;  // index ((band-1)*n_q + I)*n_p + J

  cplx& at(int band, int I, int J) {
    return w[(static_cast<std::size_t>(band - 1) * mesh.n_q + I) * mesh.n_p + J];
  }
  cplx at(int band, int I, int J) const {
    return w[(static_cast<std::size_t>(band - 1) * mesh.n_q + I) * mesh.n_p + J];
  }
};

// exp(-(x-q)^2/(2 eps) + i p (x-q)/eps)
inline cplx gaussian_eval(double q, double p, double eps, double x) {
  const double d = x - q;
  return std::polar(std::exp(-d * d / (2.0 * eps)), p * d / eps);
}

// quadrature spacing resolving the fastest retained lattice oscillation
inline double default_dy(double eps, int lambda_eff) {
  return 2.0 * std::numbers::pi * eps / (16.0 * lambda_eff);
}

// Riemann-sum transform against Gaussian-windowed band waves; the window is
// the sharp cutoff |y - q^I| <= theta from the mesh.
FgaCoefficients windowed_transform(const InitialData& data,
                                   const PhaseSpaceMesh& mesh, int n_bands,
                                   const BlochSolver& solver, double dy,
                                   int threads = 1);

// Trivial (t = 0) trajectory set: Q=q, P=p, S=0, b=sqrt(2), wilson=1.
std::vector<TrajectoryResult> initial_trajectories(const PhaseSpaceMesh& mesh,
                                                   int n_bands,
                                                   const BlochSolver& solver);

// Adjoint sum: psi(x^L) = 2*pi*(2*pi*eps)^{-3/2} sum b u G e^{iS/eps} wilson w
// over the requested band range (band_hi = 0 means all bands in coeffs).
WaveField reconstruct(const std::vector<TrajectoryResult>& trajectories,
                      const FgaCoefficients& coeffs, const WaveField& grid,
                      int band_lo = 1, int band_hi = 0, int threads = 1);

// Single-band windowed projection evaluated on an arbitrary grid.
WaveField project_band(const InitialData& data, int band,
                       const PhaseSpaceMesh& mesh, const BlochSolver& solver,
                       double dy, const WaveField& grid, int threads = 1);

// Wrap the band projection of `base` as new initial data with a pointwise
// evaluator (used for band-projected experiment initial conditions).
InitialData make_projected_initial(const InitialData& base, int band,
                                   const PhaseSpaceMesh& mesh,
                                   const BlochSolver& solver, double dy);

}  // namespace gifga
