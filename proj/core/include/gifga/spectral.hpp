#pragma once

#include <functional>
#include <vector>

#include "gifga/fga.hpp"
#include "gifga/potentials.hpp"

namespace gifga {

struct SpectralConfig {
  double x_min = 0.0, x_max = 0.0;
  int n_x = 0;     // power of two
  double dt = 0.0;
  double eps = 0.0;

  double dx() const { return (x_max - x_min) / n_x; }

  // box [-half, half] (half a multiple of pi), n_x the smallest power of two
  // with dx <= eps*pi/10
  static SpectralConfig standard(double eps, double box_halfwidth,
                                 double dt);
};

// Second-order Strang splitting for i eps psi_t = -eps^2/2 psi_xx + Vtot psi.
// Owns FFT plans and precomputed phase tables for a fixed dt.
class StrangPropagator {
 public:
  StrangPropagator(const SpectralConfig& cfg,
                   const std::function<double(double)>& Vtot);
  ~StrangPropagator();
  StrangPropagator(const StrangPropagator&) = delete;
  StrangPropagator& operator=(const StrangPropagator&) = delete;

  void step(WaveField& f) const { step_signed(f, +1); }
  void step_reverse(WaveField& f) const { step_signed(f, -1); }

 private:
  void step_signed(WaveField& f, int sign) const;
  SpectralConfig cfg_;
  std::vector<cplx> exp_v_, exp_k_;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
  mutable std::vector<cplx> buf_;
};

// total potential x -> V(x/eps mod cell) + U(x)
std::function<double(double)> total_potential(const PeriodicPotential& V,
                                              const ExternalPotential& U,
                                              double eps);

WaveField sample_initial(const InitialData& data, const SpectralConfig& cfg);

// ceil(T/dt) Strang steps; if self_convergence is non-null, a run with twice
// the step reports the L^2 distance at T (reference resolution check)
WaveField solve_reference(const InitialData& data, double T,
                          const SpectralConfig& cfg,
                          const PeriodicPotential& V,
                          const ExternalPotential& U,
                          double* self_convergence = nullptr);

double l2_error(const WaveField& f, const WaveField& g);

struct RateSummary {
  std::vector<double> pairwise;  // log2(e_i / e_{i+1})
  double lsq_slope = 0.0;        // least-squares slope of log e vs log eps
};

RateSummary convergence_order(const std::vector<double>& errors,
                              const std::vector<double>& epsilons);

}  // namespace gifga
