#include "gifga/bloch.hpp"

#include <cmath>
#include <stdexcept>

namespace gifga {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double reduce_mod1(double xi) {
  double r = xi - std::floor(xi);
  if (r >= 1.0) r = 0.0;  // guard against rounding at the boundary
  return r;
}
}  // namespace

Eigen::MatrixXcd assemble_hamiltonian(double xi, const PeriodicPotential& V) {
  if (V.lambda < 1) throw std::invalid_argument("assemble_hamiltonian: lambda < 1");
  const int n = 2 * V.lambda;
  Eigen::MatrixXcd H(n, n);
  for (int a = 0; a < n; ++a) {
    const int ea = a - V.lambda;
    for (int b = 0; b < n; ++b) {
      const int eb = b - V.lambda;
      H(a, b) = V.coeff(ea - eb);
    }
    const double k = ea + xi;
    H(a, a) += 0.5 * k * k;
  }
  // exact Hermiticity regardless of coefficient rounding
  for (int a = 0; a < n; ++a) {
    H(a, a) = cplx{H(a, a).real(), 0.0};
    for (int b = a + 1; b < n; ++b) {
      const cplx avg = 0.5 * (H(a, b) + std::conj(H(b, a)));
      H(a, b) = avg;
      H(b, a) = std::conj(avg);
    }
  }
  return H;
}

cplx evaluate_u(const BandEigenpair& e, double x_scaled) {
  const int n = static_cast<int>(e.coeffs.size());
  const int lambda = n / 2;
  cplx acc{0.0, 0.0};
  const cplx z = std::polar(1.0, x_scaled);
  cplx zk = std::polar(1.0, -lambda * x_scaled);
  for (int i = 0; i < n; ++i) {
    acc += e.coeffs[i] * zk;
    zk *= z;
  }
  return acc;
}

cplx Rephaser::phase(double xi, int band) const {
  if (!active) return {1.0, 0.0};
  const auto key = static_cast<std::uint64_t>(std::llround(xi * 1e12));
  std::uint64_t h = splitmix64(key ^ seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(band));
  const double t = static_cast<double>(h) / 18446744073709551616.0;  // 2^64
  return std::polar(1.0, two_pi * t);
}

BlochSolver::BlochSolver(PeriodicPotential V, Rephaser rephaser)
    : V_(std::move(V)), rephaser_(rephaser), cache_(std::make_unique<Cache>()) {}

void BlochSolver::eigensystem_raw(double xi, Eigen::VectorXd& evals,
                                  Eigen::MatrixXcd& evecs) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      assemble_hamiltonian(xi, V_));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigensystem: eigensolver failed at xi=" +
                             std::to_string(xi));
  evals = es.eigenvalues();
  evecs = es.eigenvectors() / std::sqrt(two_pi);
}

void BlochSolver::eigensystem(double xi, Eigen::VectorXd& evals,
                              Eigen::MatrixXcd& evecs) const {
  eigensystem_raw(xi, evals, evecs);
  for (int n = 0; n < evecs.cols(); ++n)
    evecs.col(n) *= rephaser_.phase(xi, n + 1);
}

BandEigenpair BlochSolver::eigenpair_direct(double xi, int band) const {
  if (band < 1 || band > 2 * lambda())
    throw std::invalid_argument("eigenpair_direct: band out of range");
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  eigensystem(xi, evals, evecs);
  BandEigenpair e;
  e.xi = xi;
  e.band = band;
  e.energy = evals[band - 1];
  e.coeffs = evecs.col(band - 1);
  return e;
}

BandEigenpair BlochSolver::eigenpair_at(double xi, int band) const {
  const double r = reduce_mod1(xi);
  const auto key = std::make_pair(std::llround(r * 1e12), band);
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->entries.find(key);
    if (it != cache_->entries.end()) return it->second;
  }
  BandEigenpair e = eigenpair_direct(r, band);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->entries.find(key);
  if (it != cache_->entries.end()) return it->second;  // first computation wins
  if (cache_->entries.size() < cache_cap) cache_->entries.emplace(key, e);
  return e;
}

BandTable BlochSolver::solve_bands(int n_bands, int n_xi, double rho) const {
  if (n_bands < 1 || n_bands > 2 * lambda())
    throw std::invalid_argument("solve_bands: n_bands out of range");
  if (n_xi < 2 || rho <= 0.0)
    throw std::invalid_argument("solve_bands: bad grid parameters");

  BandTable t;
  t.n_bands = n_bands;
  t.n_xi = n_xi;
  t.rho = rho;
  t.energies.assign(n_bands, std::vector<double>(n_xi));
  const int n_track = std::min(n_bands + 1, 2 * lambda());
  std::vector<double> gap(n_bands, std::numeric_limits<double>::infinity());

  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  for (int j = 0; j < n_xi; ++j) {
    const double xi = rho + static_cast<double>(j) / n_xi;
    eigensystem(xi, evals, evecs);
    for (int n = 0; n < n_bands; ++n) t.energies[n][j] = evals[n];
    for (int n = 0; n + 1 < n_track; ++n)
      gap[n] = std::min(gap[n], evals[n + 1] - evals[n]);
  }
  t.min_gap = gap;
  for (int n = 0; n + 1 < n_track; ++n)
    if (gap[n] < BandTable::gap_tol) t.gap_warning = true;

  t.interp.reserve(n_bands);
  for (int n = 0; n < n_bands; ++n)
    t.interp.emplace_back(t.energies[n], rho, 1.0);
  return t;
}

int BlochSolver::effective_mode_count(int n_bands) const {
  const int n = 2 * lambda();
  int max_mode = 1;
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  const double thresh = 1e-8 / std::sqrt(two_pi);
  for (int s = 0; s < 16; ++s) {
    const double xi = 1e-3 + s / 16.0;
    eigensystem(xi, evals, evecs);
    for (int b = 0; b < std::min(n_bands, n); ++b)
      for (int i = 0; i < n; ++i)
        if (std::abs(evecs(i, b)) > thresh)
          max_mode = std::max(max_mode, std::abs(i - lambda()));
  }
  return max_mode;
}

namespace {

// phase-fix: rotate so the largest-magnitude entry is real positive.  The
// same rule applied in two runs of the same path collapses any start-vector
// phase difference, which keeps tracked paths reproducible bit-for-bit up to
// rounding no matter what gauge the seed arrived in.
void canonicalize(Eigen::VectorXcd& v) {
  int idx = 0;
  double best = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double m = std::norm(v[i]);
    if (m > best) {
      best = m;
      idx = i;
    }
  }
  const double mod = std::abs(v[idx]);
  if (mod > 0.0) v *= std::conj(v[idx]) / mod;
}

}  // namespace

BandPathTracker::BandPathTracker(const BlochSolver& solver,
                                 const BandTable& table, int band, double xi0,
                                 const Eigen::VectorXcd& seed)
    : solver_(solver), table_(table), band_(band) {
  if (band < 1 || band > table.n_bands)
    throw std::invalid_argument("BandPathTracker: band out of table range");
  raw_ = seed;
  canonicalize(raw_);
  raw_ *= 1.0 / (raw_.norm() * std::sqrt(two_pi));
  energy_ = table_.value(band_, xi0);
  rephased_ = raw_ * solver_.rephaser().phase(xi0, band_);
}

const Eigen::VectorXcd& BandPathTracker::advance(double xi) {
  h_ = assemble_hamiltonian(xi, solver_.potential());
  const double sigma = table_.value(band_, xi);
  const int n = static_cast<int>(h_.rows());

  a_ = h_;
  a_.diagonal().array() -= sigma;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a_);

  Eigen::VectorXcd v = lu.solve(raw_);
  double nv = v.norm();
  bool ok = std::isfinite(nv) && nv > 0.0;
  if (ok) {
    v /= nv;
    v = lu.solve(v);
    nv = v.norm();
    ok = std::isfinite(nv) && nv > 0.0;
  }
  double rq = sigma;
  if (ok) {
    v /= nv;
    rq = (v.adjoint() * h_ * v).value().real();
    const double resid = (h_ * v - rq * v).norm();
    const double scale = h_.diagonal().cwiseAbs().maxCoeff() + 1.0;
    // must land on the tracked band (shift is interpolated, so allow a small
    // margin) with a residual as tight as the direct solver's
    ok = resid <= 1e-11 * scale && std::abs(rq - sigma) <= 1e-6;
  }
  if (!ok) {
    ++fallbacks_;
    Eigen::VectorXd evals;
    Eigen::MatrixXcd evecs;
    solver_.eigensystem_raw(xi, evals, evecs);
    v = evecs.col(band_ - 1) * std::sqrt(two_pi);  // unit norm for the steps below
    rq = evals[band_ - 1];
    if (n != static_cast<int>(v.size()))
      throw std::runtime_error("BandPathTracker: dimension mismatch");
  }
  canonicalize(v);
  raw_ = v / std::sqrt(two_pi);
  energy_ = rq;
  rephased_ = raw_ * solver_.rephaser().phase(xi, band_);
  return rephased_;
}

}  // namespace gifga
