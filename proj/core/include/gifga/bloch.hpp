#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "gifga/potentials.hpp"
#include "gifga/trig_interp.hpp"

namespace gifga {

// One band eigenvector at one crystal momentum.  Fourier coefficients cover
// modes eta = -lambda .. lambda-1 and are scaled so sum |c|^2 = 1/(2*pi),
// i.e. the cell-periodic eigenfunction has unit L^2 norm over the cell.
struct BandEigenpair {
  double xi = 0.0;
  int band = 0;  // 1-based
  double energy = 0.0;
  Eigen::VectorXcd coeffs;
};

// H(xi): diagonal (eta+xi)^2/2 + coeff(0), off-diagonal coeff(eta-eta').
// Valid for any real xi; band functions of the reduced momentum follow by
// an index shift of the coefficient vector.
Eigen::MatrixXcd assemble_hamiltonian(double xi, const PeriodicPotential& V);

// cell inner product <u_a, u_b>; the 2*pi compensates the coefficient scaling
inline cplx overlap(const BandEigenpair& a, const BandEigenpair& b) {
  return 2.0 * std::numbers::pi * a.coeffs.dot(b.coeffs);
}

// u(x_scaled) = sum_eta c_eta e^{i eta x_scaled}, x_scaled = x / eps
cplx evaluate_u(const BandEigenpair& e, double x_scaled);

// Band energies on a shifted uniform momentum grid xi_j = rho + j/n_xi with
// trig interpolants supplying E, E', E''.
struct BandTable {
  int n_bands = 0;
  int n_xi = 0;
  double rho = 0.0;
  std::vector<std::vector<double>> energies;  // [band-1][j]
  std::vector<TrigInterp> interp;             // [band-1]
  std::vector<double> min_gap;                // gap between band n and n+1
  bool gap_warning = false;                   // some adjacent gap < gap_tol

  static constexpr double gap_tol = 1e-8;

  double value(int band, double xi) const { return interp[band - 1].value(xi); }
  double grad(int band, double xi) const { return interp[band - 1].deriv1(xi); }
  double hess(int band, double xi) const { return interp[band - 1].deriv2(xi); }
  void eval(int band, double xi, double* e, double* de, double* dde) const {
    interp[band - 1].eval(xi, e, de, dde);
  }
};

// Deterministic per-(momentum, band) unit phase.  Active only in gauge-check
// runs; keyed on the momentum rounded to 1e-12 so the same momentum always
// draws the same phase.
struct Rephaser {
  bool active = false;
  std::uint64_t seed = 0;
  cplx phase(double xi, int band) const;
};

class BlochSolver {
 public:
  explicit BlochSolver(PeriodicPotential V, Rephaser rephaser = {});

  int lambda() const { return V_.lambda; }
  const PeriodicPotential& potential() const { return V_; }
  const Rephaser& rephaser() const { return rephaser_; }

  BandTable solve_bands(int n_bands, int n_xi = 200, double rho = 1e-3) const;

  // on-demand eigenpair; xi is reduced mod 1 and the result is cached keyed
  // by xi rounded to 1e-12 (first computation wins, later calls see the same
  // object values bit-for-bit)
  BandEigenpair eigenpair_at(double xi, int band) const;

  // uncached diagonalization at the exact (possibly unreduced) momentum;
  // used along trajectories where momentum continuity matters
  BandEigenpair eigenpair_direct(double xi, int band) const;

  // full spectrum at xi; columns scaled to sum|c|^2 = 1/(2*pi) and rephased
  void eigensystem(double xi, Eigen::VectorXd& evals,
                   Eigen::MatrixXcd& evecs) const;

  // largest |mode index| carrying weight > 1e-8 in the first n_bands bands
  // (sampled over the zone); sets the quadrature resolution for transforms
  int effective_mode_count(int n_bands) const;

  // Raw (pre-rephasing) full solve; used by the path tracker's fallback.
  void eigensystem_raw(double xi, Eigen::VectorXd& evals,
                       Eigen::MatrixXcd& evecs) const;

 private:
  struct Cache {
    std::mutex mutex;
    std::map<std::pair<long long, int>, BandEigenpair> entries;
  };
  PeriodicPotential V_;
  Rephaser rephaser_;
  std::unique_ptr<Cache> cache_;  // keeps the solver movable
  static constexpr std::size_t cache_cap = 1 << 18;
};

// Follows one band's eigenvector along a continuous momentum path by
// shifted inverse iteration: the shift comes from the interpolated band
// energy, the start vector from the previous step.  Residuals above
// 1e-11 * |H| trigger a full diagonalization fallback, so the tracked
// vectors meet the same accuracy bar as the direct solver at a small
// fraction of the cost.
class BandPathTracker {
 public:
  BandPathTracker(const BlochSolver& solver, const BandTable& table, int band,
                  double xi0, const Eigen::VectorXcd& seed);

  // move to the next momentum on the path; returns the rephased vector
  const Eigen::VectorXcd& advance(double xi);

  const Eigen::VectorXcd& current() const { return rephased_; }
  double energy() const { return energy_; }
  long fallback_count() const { return fallbacks_; }

 private:
  const BlochSolver& solver_;
  const BandTable& table_;
  int band_;
  Eigen::VectorXcd raw_, rephased_;
  double energy_ = 0.0;
  long fallbacks_ = 0;
  Eigen::MatrixXcd h_, a_;  // scratch
};

}  // namespace gifga
