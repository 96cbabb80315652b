#include "gifga/fga.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <thread>

namespace gifga {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

// out[k] += c * e^{i omega (t_origin + (k0 + k) dt)} for k = 0..n-1, by phase
// recurrence with exact restarts at absolute multiples of the chunk size.
// Anchoring restarts to the absolute index k0 + k makes every sample a pure
// function of its grid position, so partitioned evaluation is bit-identical
// to a single sweep.
void add_oscillation(cplx* out, int n, cplx c, double omega, double t_origin,
                     double dt, long k0 = 0) {
  const cplx step = std::polar(1.0, omega * dt);
  constexpr long chunk = 512;
  long k = 0;
  while (k < n) {
    const long abs0 = k0 + k;
    // recur from the chunk boundary even when entering mid-chunk, so each
    // sample sees the same multiply sequence regardless of the entry point
    const long base = (abs0 / chunk) * chunk - (abs0 < 0 && abs0 % chunk ? chunk : 0);
    const long skip = abs0 - base;
    const long run = std::min<long>(n - k, chunk - skip);
    cplx ph = c * std::polar(1.0, omega * (t_origin + base * dt));
    for (long j = 0; j < skip; ++j) ph *= step;
    for (long j = 0; j < run; ++j) {
      out[k + j] += ph;
      ph *= step;
    }
    k += run;
  }
}

void run_partitioned(int total, int threads, const std::function<void(int, int)>& fn) {
  const int n_threads = std::max(1, threads);
  if (n_threads == 1 || total <= 1) {
    fn(0, total);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_threads);
  const int chunk = (total + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const int lo = t * chunk, hi = std::min(total, lo + chunk);
    if (lo < hi)
      pool.emplace_back([&, lo, hi, t] {
        try {
          fn(lo, hi);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

double WaveField::l2norm() const {
  double acc = 0.0;
  for (const cplx& v : values) acc += std::norm(v);
  return std::sqrt(dx * acc);
}

WaveField make_grid(double x0, double dx, int n) {
  WaveField f;
  f.x0 = x0;
  f.dx = dx;
  f.values.assign(n, {0.0, 0.0});
  return f;
}

FgaCoefficients windowed_transform(const InitialData& data,
                                   const PhaseSpaceMesh& mesh, int n_bands,
                                   const BlochSolver& solver, double dy,
                                   int threads) {
  if (data.eps <= 0.0) throw std::invalid_argument("windowed_transform: eps <= 0");
  const double eps = data.eps;
  const int lam_eff = solver.effective_mode_count(n_bands);
  const double dy_max = eps * pi / (2.0 * lam_eff);
  if (dy >= dy_max)
    throw std::invalid_argument(
        "windowed_transform: dy=" + std::to_string(dy) +
        " too coarse; need dy < " + std::to_string(dy_max) +
        " to resolve modes up to " + std::to_string(lam_eff));

  const double theta = mesh.theta;
  const double y_lo = mesh.q(0) - theta;
  const double y_hi = mesh.q(mesh.n_q - 1) + theta;
  const int n_y = static_cast<int>(std::ceil((y_hi - y_lo) / dy)) + 1;

  std::vector<cplx> psi(n_y);
  for (int k = 0; k < n_y; ++k) psi[k] = data.psi(y_lo + k * dy);

  FgaCoefficients c;
  c.mesh = mesh;
  c.n_bands = n_bands;
  c.eps = eps;
  c.w.assign(static_cast<std::size_t>(n_bands) * mesh.n_q * mesh.n_p,
             {0.0, 0.0});

  const int lambda = solver.lambda();
  const int n_modes = 2 * lambda;

  run_partitioned(mesh.n_p, threads, [&](int j_lo, int j_hi) {
    std::vector<cplx> u_tab(static_cast<std::size_t>(n_bands) * n_y);
    std::vector<cplx> win;
    for (int J = j_lo; J < j_hi; ++J) {
      const double p = mesh.p(J);
      std::vector<BandEigenpair> eigs;
      eigs.reserve(n_bands);
      for (int n = 1; n <= n_bands; ++n) eigs.push_back(solver.eigenpair_at(p, n));

      // u_n(p^J, y/eps) tables by per-mode phase recurrence
      std::fill(u_tab.begin(), u_tab.end(), cplx{0.0, 0.0});
      for (int n = 0; n < n_bands; ++n)
        for (int i = 0; i < n_modes; ++i) {
          const cplx cc = eigs[n].coeffs[i];
          if (std::norm(cc) < 1e-34) continue;
          const double omega = (i - lambda) / eps;
          add_oscillation(u_tab.data() + static_cast<std::size_t>(n) * n_y, n_y,
                          cc, omega, y_lo, dy);
        }

      for (int I = 0; I < mesh.n_q; ++I) {
        const double q = mesh.q(I);
        const int k0 = std::max(0, static_cast<int>(std::ceil((q - theta - y_lo) / dy)));
        const int k1 = std::min(n_y - 1, static_cast<int>(std::floor((q + theta - y_lo) / dy)));
        if (k1 < k0) continue;
        const int m = k1 - k0 + 1;
        // conj(G) * psi * dy shared by all bands
        win.assign(m, {0.0, 0.0});
        for (int k = 0; k < m; ++k) {
          const double y = y_lo + (k0 + k) * dy;
          win[k] = std::conj(gaussian_eval(q, p, eps, y)) * psi[k0 + k] * dy;
        }
        for (int n = 0; n < n_bands; ++n) {
          const cplx* u = u_tab.data() + static_cast<std::size_t>(n) * n_y + k0;
          cplx acc{0.0, 0.0};
          for (int k = 0; k < m; ++k) acc += win[k] * std::conj(u[k]);
          c.at(n + 1, I, J) = acc;
        }
      }
    }
  });
  return c;
}

std::vector<TrajectoryResult> initial_trajectories(const PhaseSpaceMesh& mesh,
                                                   int n_bands,
                                                   const BlochSolver& solver) {
  std::vector<TrajectoryResult> out;
  out.reserve(static_cast<std::size_t>(n_bands) * mesh.size());
  for (int band = 1; band <= n_bands; ++band)
    for (int I = 0; I < mesh.n_q; ++I)
      for (int J = 0; J < mesh.n_p; ++J) {
        TrajectoryResult r;
        r.band = band;
        r.I = I;
        r.J = J;
        r.state.Q = mesh.q(I);
        r.state.P = mesh.p(J);
        r.state.S = 0.0;
        r.state.b = {std::sqrt(2.0), 0.0};
        r.state.wilson = {1.0, 0.0};
        r.u_final = solver.eigenpair_at(mesh.p(J), band).coeffs;
        out.push_back(std::move(r));
      }
  return out;
}

WaveField reconstruct(const std::vector<TrajectoryResult>& trajectories,
                      const FgaCoefficients& coeffs, const WaveField& grid,
                      int band_lo, int band_hi, int threads) {
  if (band_hi <= 0) band_hi = coeffs.n_bands;
  const double eps = coeffs.eps;
  const double theta = coeffs.mesh.theta;
  const double pref = two_pi * std::pow(two_pi * eps, -1.5);
  const double weight = coeffs.mesh.dq * coeffs.mesh.dp;

  WaveField out = make_grid(grid.x0, grid.dx, grid.size());
  const int n = out.size();
  const double x0 = out.x0, dx = out.dx;

  // threads own disjoint x-ranges and visit trajectories in index order, so
  // the accumulation order per sample is independent of the thread count
  run_partitioned(n, threads, [&](int g_lo, int g_hi) {
    std::vector<cplx> u_vals;
    for (const TrajectoryResult& tr : trajectories) {
      if (tr.band < band_lo || tr.band > band_hi) continue;
      const TrajectoryState& s = tr.state;
      const int i0 = std::max(g_lo, static_cast<int>(std::ceil((s.Q - theta - x0) / dx)));
      const int i1 = std::min(g_hi - 1, static_cast<int>(std::floor((s.Q + theta - x0) / dx)));
      if (i1 < i0) continue;
      const int m = i1 - i0 + 1;

      const cplx amp = pref * weight * s.b * s.wilson *
                       std::polar(1.0, s.S / eps) *
                       coeffs.at(tr.band, tr.I, tr.J);
      if (std::norm(amp) < 1e-60) continue;

      // band wave on the window by per-mode recurrence
      u_vals.assign(m, {0.0, 0.0});
      const int n_modes = static_cast<int>(tr.u_final.size());
      const int lambda = n_modes / 2;
      for (int i = 0; i < n_modes; ++i) {
        const cplx cc = tr.u_final[i];
        if (std::norm(cc) < 1e-34) continue;
        const double omega = (i - lambda) / eps;
        add_oscillation(u_vals.data(), m, cc, omega, x0, dx, i0);
      }

      for (int i = 0; i < m; ++i) {
        const double x = x0 + (i0 + i) * dx;
        out.values[i0 + i] +=
            amp * u_vals[i] * gaussian_eval(s.Q, s.P, eps, x);
      }
    }
  });
  return out;
}

WaveField project_band(const InitialData& data, int band,
                       const PhaseSpaceMesh& mesh, const BlochSolver& solver,
                       double dy, const WaveField& grid, int threads) {
  const FgaCoefficients c =
      windowed_transform(data, mesh, band, solver, dy, threads);
  const auto trajs = initial_trajectories(mesh, band, solver);
  return reconstruct(trajs, c, grid, band, band, threads);
}

InitialData make_projected_initial(const InitialData& base, int band,
                                   const PhaseSpaceMesh& mesh,
                                   const BlochSolver& solver, double dy) {
  auto coeffs = std::make_shared<FgaCoefficients>(
      windowed_transform(base, mesh, band, solver, dy));
  auto eigs = std::make_shared<std::vector<BandEigenpair>>();
  eigs->reserve(mesh.n_p);
  for (int J = 0; J < mesh.n_p; ++J)
    eigs->push_back(solver.eigenpair_at(mesh.p(J), band));

  const double eps = base.eps;
  const double pref =
      two_pi * std::pow(two_pi * eps, -1.5) * std::sqrt(2.0) * mesh.dq * mesh.dp;
  const double theta = mesh.theta;
  PhaseSpaceMesh m = mesh;

  InitialData out;
  out.eps = eps;
  out.support = base.support + 2.0 * theta;
  out.psi = [coeffs, eigs, m, band, eps, pref, theta](double x) -> cplx {
    cplx acc{0.0, 0.0};
    const int I_lo = std::max(
        0, static_cast<int>(std::ceil((x - theta - m.q0) / m.dq)));
    const int I_hi = std::min(
        m.n_q - 1, static_cast<int>(std::floor((x + theta - m.q0) / m.dq)));
    if (I_hi < I_lo) return acc;
    for (int J = 0; J < m.n_p; ++J) {
      const double p = m.p(J);
      cplx inner{0.0, 0.0};
      for (int I = I_lo; I <= I_hi; ++I)
        inner += coeffs->at(band, I, J) * gaussian_eval(m.q(I), p, eps, x);
      acc += inner * evaluate_u((*eigs)[J], x / eps);
    }
    return pref * acc;
  };
  return out;
}

}  // namespace gifga
