#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gifga/bloch.hpp"
#include "gifga/gauge.hpp"
#include "gifga/potentials.hpp"

namespace gifga {

// Phase-space sampling of the transform/reconstruction quadrature.
// q^I = q0 + I*dq covers the initial support padded by the window radius
// theta; p^J = (J + 1/2)*dp tiles the Brillouin zone exactly and stays off
// the high-symmetry points {0, 1/2, 1}.
struct PhaseSpaceMesh {
  double q0 = 0.0, dq = 0.0;
  int n_q = 0;
  double dp = 0.0;
  int n_p = 0;
  double theta = 0.0;

  double q(int I) const { return q0 + I * dq; }
  double p(int J) const { return (J + 0.5) * dp; }
  int size() const { return n_q * n_p; }

  // dq ~ sqrt(eps)/2, dp = 1/(2*round(1/sqrt(eps))), theta = theta_factor*sqrt(eps)
  static PhaseSpaceMesh standard(double eps, double support,
                                 double theta_factor = 6.0);
};

struct TrajectoryState {
  double Q = 0.0, P = 0.0, S = 0.0;
  cplx b{0.0, 0.0};
  cplx wilson{1.0, 0.0};
  double jac[2][2] = {{1.0, 0.0}, {0.0, 1.0}};  // flow Jacobian d(Q,P)/d(q,p)

  // derivatives along z with d/dz = d/dq - i d/dp at the launch point
  cplx dzQ() const { return {jac[0][0], -jac[0][1]}; }
  cplx dzP() const { return {jac[1][0], -jac[1][1]}; }
  cplx Z() const { return dzQ() + cplx{0.0, 1.0} * dzP(); }
  double det_jac() const {
    return jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
  }
};

// time derivative of the state at fixed band
struct FlowDeriv {
  double dQ = 0.0, dP = 0.0, dS = 0.0;
  cplx db{0.0, 0.0};
  double djac[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

FlowDeriv flow_rhs(const TrajectoryState& s, const BandTable& bands, int band,
                   const ExternalPotential& U);

enum class Scheme { rk4_classical, gauss2_symplectic };

struct IntegratorConfig {
  double T = 0.0;
  int K = 150;
  Scheme scheme = Scheme::rk4_classical;
};

Scheme scheme_from_name(const std::string& name);

struct TrajectoryResult {
  int band = 0, I = 0, J = 0;
  TrajectoryState state;
  // eigenvector at the final momentum: last Wilson bra and, by construction,
  // the band-wave factor used in the reconstruction (exact gauge pairing)
  Eigen::VectorXcd u_final;
  double min_overlap = 1.0;
  std::vector<double> p_history;  // filled only on request
};

struct EnsembleOptions {
  int threads = 1;
  bool record_history = false;
  double overlap_floor = default_overlap_floor;
};

// Integrate one trajectory without gauge bookkeeping (oracle/testing path).
TrajectoryState integrate_trajectory(double q, double p, int band,
                                     const BandTable& bands,
                                     const ExternalPotential& U,
                                     const IntegratorConfig& cfg);

// Full ensemble over (band, I, J): launch at mesh nodes with S=0, b=sqrt(2),
// jac=identity, accumulate the Wilson factor at every step boundary.
std::vector<TrajectoryResult> evolve_ensemble(const PhaseSpaceMesh& mesh,
                                              const BandTable& bands,
                                              const BlochSolver& solver,
                                              int n_bands,
                                              const ExternalPotential& U,
                                              const IntegratorConfig& cfg,
                                              const EnsembleOptions& opts = {});

}  // namespace gifga
