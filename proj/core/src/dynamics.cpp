#include "gifga/dynamics.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

namespace gifga {

namespace {

constexpr double singular_z_tol = 1e-8;

// flattened integration state: Q, P, S, Re b, Im b, J00, J01, J10, J11
struct Vec9 {
  double y[9];
};

Vec9 pack(const TrajectoryState& s) {
  return {{s.Q, s.P, s.S, s.b.real(), s.b.imag(), s.jac[0][0], s.jac[0][1],
           s.jac[1][0], s.jac[1][1]}};
}

void unpack(const Vec9& v, TrajectoryState& s) {
  s.Q = v.y[0];
  s.P = v.y[1];
  s.S = v.y[2];
  s.b = {v.y[3], v.y[4]};
  s.jac[0][0] = v.y[5];
  s.jac[0][1] = v.y[6];
  s.jac[1][0] = v.y[7];
  s.jac[1][1] = v.y[8];
}

Vec9 rhs(const Vec9& v, const BandTable& bands, int band,
         const ExternalPotential& U) {
  const double Q = v.y[0], P = v.y[1];
  double E, E1, E2;
  bands.eval(band, P, &E, &E1, &E2);
  const double Ug = U.grad(Q), Uh = U.hess(Q);

  const cplx b{v.y[3], v.y[4]};
  const cplx dzQ{v.y[5], -v.y[6]};
  const cplx dzP{v.y[7], -v.y[8]};
  const cplx Z = dzQ + cplx{0.0, 1.0} * dzP;
  if (std::abs(Z) < singular_z_tol)
    throw std::runtime_error("flow_rhs: |Z| below " +
                             std::to_string(singular_z_tol) +
                             " (singular amplitude) at Q=" + std::to_string(Q));
  const cplx db = 0.5 * b * (dzP * E2 - cplx{0.0, 1.0} * dzQ * Uh) / Z;

  Vec9 d;
  d.y[0] = E1;
  d.y[1] = -Ug;
  d.y[2] = P * E1 - (E + U.value(Q));
  d.y[3] = db.real();
  d.y[4] = db.imag();
  // variational flow of the Jacobian rows
  d.y[5] = E2 * v.y[7];
  d.y[6] = E2 * v.y[8];
  d.y[7] = -Uh * v.y[5];
  d.y[8] = -Uh * v.y[6];
  return d;
}

Vec9 axpy(const Vec9& a, double h, const Vec9& d) {
  Vec9 r;
  for (int i = 0; i < 9; ++i) r.y[i] = a.y[i] + h * d.y[i];
  return r;
}

Vec9 rk4_step(const Vec9& v, double h, const BandTable& bands, int band,
              const ExternalPotential& U) {
  const Vec9 k1 = rhs(v, bands, band, U);
  const Vec9 k2 = rhs(axpy(v, 0.5 * h, k1), bands, band, U);
  const Vec9 k3 = rhs(axpy(v, 0.5 * h, k2), bands, band, U);
  const Vec9 k4 = rhs(axpy(v, h, k3), bands, band, U);
  Vec9 r;
  for (int i = 0; i < 9; ++i)
    r.y[i] = v.y[i] + h / 6.0 * (k1.y[i] + 2.0 * k2.y[i] + 2.0 * k3.y[i] +
                                 k4.y[i]);
  return r;
}

// two-stage Gauss-Legendre collocation (order 4, symplectic), fixed-point
// iterated on the stage derivatives
Vec9 gauss2_step(const Vec9& v, double h, const BandTable& bands, int band,
                 const ExternalPotential& U) {
  constexpr double r3 = 1.7320508075688772;  // sqrt(3)
  const double a11 = 0.25, a12 = 0.25 - r3 / 6.0;
  const double a21 = 0.25 + r3 / 6.0, a22 = 0.25;
  Vec9 k1 = rhs(v, bands, band, U);
  Vec9 k2 = k1;
  for (int it = 0; it < 50; ++it) {
    Vec9 s1 = v, s2 = v;
    for (int i = 0; i < 9; ++i) {
      s1.y[i] += h * (a11 * k1.y[i] + a12 * k2.y[i]);
      s2.y[i] += h * (a21 * k1.y[i] + a22 * k2.y[i]);
    }
    const Vec9 n1 = rhs(s1, bands, band, U);
    const Vec9 n2 = rhs(s2, bands, band, U);
    double delta = 0.0;
    for (int i = 0; i < 9; ++i) {
      delta = std::max(delta, std::abs(n1.y[i] - k1.y[i]));
      delta = std::max(delta, std::abs(n2.y[i] - k2.y[i]));
    }
    k1 = n1;
    k2 = n2;
    if (delta < 1e-13) break;
  }
  Vec9 r;
  for (int i = 0; i < 9; ++i)
    r.y[i] = v.y[i] + 0.5 * h * (k1.y[i] + k2.y[i]);
  return r;
}

Vec9 take_step(const Vec9& v, double h, Scheme scheme, const BandTable& bands,
               int band, const ExternalPotential& U) {
  return scheme == Scheme::rk4_classical ? rk4_step(v, h, bands, band, U)
                                         : gauss2_step(v, h, bands, band, U);
}

TrajectoryState initial_state(double q, double p) {
  TrajectoryState s;
  s.Q = q;
  s.P = p;
  s.S = 0.0;
  s.b = {std::sqrt(2.0), 0.0};  // 2^{d/2}, d = 1
  s.wilson = {1.0, 0.0};
  s.jac[0][0] = 1.0;
  s.jac[0][1] = 0.0;
  s.jac[1][0] = 0.0;
  s.jac[1][1] = 1.0;
  return s;
}

}  // namespace

PhaseSpaceMesh PhaseSpaceMesh::standard(double eps, double support,
                                        double theta_factor) {
  if (eps <= 0.0) throw std::invalid_argument("PhaseSpaceMesh: eps <= 0");
  const double sq = std::sqrt(eps);
  PhaseSpaceMesh m;
  m.theta = theta_factor * sq;
  m.n_p = 2 * static_cast<int>(std::lround(1.0 / sq));
  m.dp = 1.0 / m.n_p;
  m.dq = 0.5 * sq;
  const double q_lo = -support - m.theta, q_hi = support + m.theta;
  m.n_q = static_cast<int>(std::ceil((q_hi - q_lo) / m.dq)) + 1;
  m.q0 = q_lo;
  return m;
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "rk4-classical") return Scheme::rk4_classical;
  if (name == "gauss2-symplectic") return Scheme::gauss2_symplectic;
  throw std::invalid_argument("unknown integrator scheme '" + name + "'");
}

FlowDeriv flow_rhs(const TrajectoryState& s, const BandTable& bands, int band,
                   const ExternalPotential& U) {
  const Vec9 d = rhs(pack(s), bands, band, U);
  FlowDeriv out;
  out.dQ = d.y[0];
  out.dP = d.y[1];
  out.dS = d.y[2];
  out.db = {d.y[3], d.y[4]};
  out.djac[0][0] = d.y[5];
  out.djac[0][1] = d.y[6];
  out.djac[1][0] = d.y[7];
  out.djac[1][1] = d.y[8];
  return out;
}

TrajectoryState integrate_trajectory(double q, double p, int band,
                                     const BandTable& bands,
                                     const ExternalPotential& U,
                                     const IntegratorConfig& cfg) {
  if (cfg.K < 1) throw std::invalid_argument("IntegratorConfig: K < 1");
  const double h = cfg.T / cfg.K;
  TrajectoryState s = initial_state(q, p);
  Vec9 v = pack(s);
  for (int k = 0; k < cfg.K; ++k)
    v = take_step(v, h, cfg.scheme, bands, band, U);
  unpack(v, s);
  return s;
}

std::vector<TrajectoryResult> evolve_ensemble(const PhaseSpaceMesh& mesh,
                                              const BandTable& bands,
                                              const BlochSolver& solver,
                                              int n_bands,
                                              const ExternalPotential& U,
                                              const IntegratorConfig& cfg,
                                              const EnsembleOptions& opts) {
  if (n_bands < 1 || n_bands > bands.n_bands)
    throw std::invalid_argument("evolve_ensemble: n_bands out of range");
  if (cfg.K < 1) throw std::invalid_argument("IntegratorConfig: K < 1");

  const int per_band = mesh.size();
  const int total = n_bands * per_band;
  std::vector<TrajectoryResult> out(total);
  const double h = cfg.T / cfg.K;

  auto worker = [&](int lo, int hi) {
    for (int idx = lo; idx < hi; ++idx) {
      const int band = idx / per_band + 1;
      const int rem = idx % per_band;
      const int I = rem / mesh.n_p;
      const int J = rem % mesh.n_p;
      const double q = mesh.q(I), p = mesh.p(J);

      TrajectoryResult& res = out[idx];
      res.band = band;
      res.I = I;
      res.J = J;

      TrajectoryState s = initial_state(q, p);
      Vec9 v = pack(s);
      WilsonChain chain;
      Eigen::VectorXcd prev_u;
      std::optional<BandPathTracker> tracker;
      if (!U.zero) {
        prev_u = solver.eigenpair_at(p, band).coeffs;
        tracker.emplace(solver, bands, band, p, prev_u);
      }
      if (opts.record_history) {
        res.p_history.reserve(cfg.K + 1);
        res.p_history.push_back(p);
      }

      for (int k = 0; k < cfg.K; ++k) {
        v = take_step(v, h, cfg.scheme, bands, band, U);
        if (!U.zero) {
          // momentum stays unreduced here: eigenvector coefficients are only
          // continuous along the path if the matrix sees the same momentum
          Eigen::VectorXcd cur_u = tracker->advance(v.y[1]);
          double mod;
          const cplx f = wilson_factor(prev_u, cur_u, &mod);
          if (mod < opts.overlap_floor) throw GaugeError(band, k + 1, mod);
          accumulate(chain, f);
          chain.last_overlap_modulus = mod;
          chain.min_overlap_modulus = std::min(chain.min_overlap_modulus, mod);
          prev_u = std::move(cur_u);
        }
        if (opts.record_history) res.p_history.push_back(v.y[1]);
      }

      unpack(v, s);
      s.wilson = chain.value;
      res.state = s;
      res.min_overlap = chain.min_overlap_modulus;
      res.u_final = U.zero ? solver.eigenpair_at(p, band).coeffs
                           : std::move(prev_u);
    }
  };

  const int n_threads = std::max(1, opts.threads);
  if (n_threads == 1) {
    worker(0, total);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_threads);
    const int chunk = (total + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      const int lo = t * chunk, hi = std::min(total, lo + chunk);
      if (lo < hi)
        pool.emplace_back([&, lo, hi, t] {
          try {
            worker(lo, hi);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace gifga
