#include "gifga/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

namespace gifga {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
}

SpectralConfig SpectralConfig::standard(double eps, double box_halfwidth,
                                        double dt) {
  if (eps <= 0.0 || dt <= 0.0 || box_halfwidth <= 0.0)
    throw std::invalid_argument("SpectralConfig: bad parameters");
  SpectralConfig c;
  c.eps = eps;
  c.x_min = -box_halfwidth;
  c.x_max = box_halfwidth;
  c.dt = dt;
  const double dx_max = eps * pi / 10.0;
  int n = 2;
  while ((c.x_max - c.x_min) / n > dx_max) n *= 2;
  c.n_x = n;
  return c;
}

StrangPropagator::StrangPropagator(const SpectralConfig& cfg,
                                   const std::function<double(double)>& Vtot)
    : cfg_(cfg) {
  if (cfg.n_x < 2 || (cfg.n_x & (cfg.n_x - 1)) != 0)
    throw std::invalid_argument("StrangPropagator: n_x must be a power of two");
  if (cfg.dx() > cfg.eps * pi / 8.0)
    throw std::invalid_argument(
        "StrangPropagator: grid too coarse for the lattice oscillation");

  const int n = cfg.n_x;
  exp_v_.resize(n);
  exp_k_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = cfg.x_min + i * cfg.dx();
    exp_v_[i] = std::polar(1.0, -cfg.dt * Vtot(x) / (2.0 * cfg.eps));
    const int ki = i <= n / 2 ? i : i - n;
    const double k = two_pi * ki / (cfg.x_max - cfg.x_min);
    exp_k_[i] = std::polar(1.0, -cfg.dt * cfg.eps * k * k / 2.0);
  }
  buf_.resize(n);
  plan_fwd_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf_.data()),
                               reinterpret_cast<fftw_complex*>(buf_.data()),
                               FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf_.data()),
                               reinterpret_cast<fftw_complex*>(buf_.data()),
                               FFTW_BACKWARD, FFTW_ESTIMATE);
}

StrangPropagator::~StrangPropagator() {
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void StrangPropagator::step_signed(WaveField& f, int sign) const {
  const int n = cfg_.n_x;
  if (f.size() != n) throw std::invalid_argument("strang_step: grid mismatch");
  auto phase = [sign](const cplx& p) { return sign > 0 ? p : std::conj(p); };
  for (int i = 0; i < n; ++i) buf_[i] = f.values[i] * phase(exp_v_[i]);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  for (int i = 0; i < n; ++i) buf_[i] *= phase(exp_k_[i]);
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  const double inv = 1.0 / n;
  for (int i = 0; i < n; ++i)
    f.values[i] = buf_[i] * inv * phase(exp_v_[i]);
}

std::function<double(double)> total_potential(const PeriodicPotential& V,
                                              const ExternalPotential& U,
                                              double eps) {
  auto lattice = V.eval;
  auto ext = U.value;
  return [lattice, ext, eps](double x) {
    const double xr = std::remainder(x / eps, two_pi);  // into [-pi, pi]
    return lattice(xr) + ext(x);
  };
}

WaveField sample_initial(const InitialData& data, const SpectralConfig& cfg) {
  WaveField f = make_grid(cfg.x_min, cfg.dx(), cfg.n_x);
  for (int i = 0; i < cfg.n_x; ++i) f.values[i] = data.psi(f.x(i));
  return f;
}

WaveField solve_reference(const InitialData& data, double T,
                          const SpectralConfig& cfg,
                          const PeriodicPotential& V,
                          const ExternalPotential& U,
                          double* self_convergence) {
  const auto Vtot = total_potential(V, U, cfg.eps);
  const int steps = std::max(1, static_cast<int>(std::ceil(T / cfg.dt)));

  auto run = [&](int k) {
    SpectralConfig c = cfg;
    c.dt = T / k;
    StrangPropagator prop(c, Vtot);
    WaveField f = sample_initial(data, cfg);
    for (int s = 0; s < k; ++s) prop.step(f);
    return f;
  };

  WaveField fine = run(steps);
  if (self_convergence) {
    const WaveField coarse = run(std::max(1, steps / 2));
    *self_convergence = l2_error(fine, coarse);
  }
  return fine;
}

double l2_error(const WaveField& f, const WaveField& g) {
  if (f.size() != g.size() || std::abs(f.dx - g.dx) > 1e-14 ||
      std::abs(f.x0 - g.x0) > 1e-12)
    throw std::invalid_argument("l2_error: grid mismatch");
  double acc = 0.0;
  for (int i = 0; i < f.size(); ++i) acc += std::norm(f.values[i] - g.values[i]);
  return std::sqrt(f.dx * acc);
}

RateSummary convergence_order(const std::vector<double>& errors,
                              const std::vector<double>& epsilons) {
  const std::size_t n = errors.size();
  if (n != epsilons.size() || n < 2)
    throw std::invalid_argument("convergence_order: need >= 2 matching entries");
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i] <= 0.0)
      throw std::invalid_argument("convergence_order: non-positive error");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("convergence_order: epsilons must decrease");
  }
  RateSummary r;
  for (std::size_t i = 0; i + 1 < n; ++i)
    r.pairwise.push_back(std::log(errors[i] / errors[i + 1]) /
                         std::log(epsilons[i] / epsilons[i + 1]));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(epsilons[i]), y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  r.lsq_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return r;
}

}  // namespace gifga
