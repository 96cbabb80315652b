#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gifga/bloch.hpp"

using namespace gifga;

namespace {
constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

// small deterministic pseudo-random stream for sample points
double prand(std::uint64_t& s) {
  s = s * 6364136223846793005ULL + 1442695040888963407ULL;
  return static_cast<double>(s >> 11) / 9007199254740992.0;
}
}  // namespace

TEST_CASE("2x2 hamiltonian for the cosine lattice") {
  const auto V = make_lattice("cosine", 0.0, 1);
  const auto H = assemble_hamiltonian(0.5, V);
  REQUIRE(H.rows() == 2);
  CHECK(H(0, 0).real() == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(H(1, 1).real() == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(H(0, 1).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(H(1, 0).real() == doctest::Approx(0.5).epsilon(1e-14));

  BlochSolver solver(V);
  const auto e1 = solver.eigenpair_direct(0.5, 1);
  const auto e2 = solver.eigenpair_direct(0.5, 2);
  CHECK(e1.energy == doctest::Approx(-0.375).epsilon(1e-13));
  CHECK(e2.energy == doctest::Approx(0.625).epsilon(1e-13));
}

TEST_CASE("free-particle bands are folded parabolas") {
  const auto V = make_lattice("zero", 0.0, 16);
  BlochSolver solver(V);
  std::uint64_t s = 7;
  for (int trial = 0; trial < 20; ++trial) {
    const double xi = prand(s);
    std::vector<double> levels;
    for (int eta = -16; eta < 16; ++eta)
      levels.push_back(0.5 * (eta + xi) * (eta + xi));
    std::sort(levels.begin(), levels.end());
    for (int band = 1; band <= 8; ++band) {
      const auto e = solver.eigenpair_direct(xi, band);
      CHECK(std::abs(e.energy - levels[band - 1]) < 1e-12);
    }
  }
}

TEST_CASE("eigenvectors: residual, normalization, orthogonality") {
  const auto V = make_lattice("gaussian-bump", 25.0, 16);
  BlochSolver solver(V);
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  for (double xi : {0.137, 0.5, 0.93, 1.7, -0.3}) {
    solver.eigensystem(xi, evals, evecs);
    const auto H = assemble_hamiltonian(xi, V);
    const double scale = H.norm();
    for (int n = 0; n < 8; ++n) {
      const Eigen::VectorXcd v = evecs.col(n);
      CHECK((H * v - evals[n] * v).norm() < 1e-10 * scale / std::sqrt(two_pi));
      CHECK(std::abs(two_pi * v.squaredNorm() - 1.0) < 1e-12);
      for (int m = n + 1; m < 8; ++m)
        CHECK(std::abs(two_pi * v.dot(evecs.col(m))) < 1e-10);
    }
  }
}

TEST_CASE("band table interpolates energies and derivatives") {
  const auto V = make_lattice("cosine", 0.0, 16);
  BlochSolver solver(V);
  const auto table = solver.solve_bands(4);
  CHECK_FALSE(table.gap_warning);

  std::uint64_t s = 11;
  for (int trial = 0; trial < 50; ++trial) {
    const double xi = prand(s);
    // the two lowest bands are well gapped, so the trig interpolant is
    // spectrally accurate; higher cosine bands have tiny zone-edge gaps and
    // correspondingly slower interpolation convergence
    for (int band = 1; band <= 2; ++band) {
      const double direct = solver.eigenpair_direct(xi, band).energy;
      CHECK(std::abs(table.value(band, xi) - direct) < 1e-8);
      // derivatives vs centered differences of the exact band energy
      const double h = 1e-5;
      const double ep = solver.eigenpair_direct(xi + h, band).energy;
      const double em = solver.eigenpair_direct(xi - h, band).energy;
      CHECK(std::abs(table.grad(band, xi) - (ep - em) / (2 * h)) < 1e-6);
      // wider stencil for the second difference: eigenvalue rounding at
      // ~1e-13 would swamp an h = 1e-5 stencil
      const double h2 = 1e-4;
      const double ep2 = solver.eigenpair_direct(xi + h2, band).energy;
      const double em2 = solver.eigenpair_direct(xi - h2, band).energy;
      CHECK(std::abs(table.hess(band, xi) -
                     (ep2 - 2 * direct + em2) / (h2 * h2)) < 1e-4);
    }
    for (int band = 3; band <= 4; ++band)
      CHECK(std::abs(table.value(band, xi) -
                     solver.eigenpair_direct(xi, band).energy) < 1e-4);
  }
}

TEST_CASE("band energies are periodic and reflection symmetric") {
  const auto V = make_lattice("gaussian-bump", 25.0, 16);
  BlochSolver solver(V);
  std::uint64_t s = 3;
  for (int trial = 0; trial < 10; ++trial) {
    const double xi = prand(s);
    for (int band = 1; band <= 6; ++band) {
      // periodicity and reflection hold only up to the basis truncation:
      // shifting the momentum by one shifts which modes fall off the edge
      const double e = solver.eigenpair_direct(xi, band).energy;
      CHECK(std::abs(solver.eigenpair_direct(xi + 1.0, band).energy - e) < 1e-6);
      // real potential: E_n(-xi) = E_n(xi), hence E_n(1 - xi) = E_n(xi)
      CHECK(std::abs(solver.eigenpair_direct(1.0 - xi, band).energy - e) < 1e-6);
    }
  }
}

TEST_CASE("cell-periodic waves: periodicity and norm") {
  const auto V = make_lattice("cosine", 0.0, 16);
  BlochSolver solver(V);
  const auto e = solver.eigenpair_at(0.273, 3);
  for (double x : {0.0, 1.1, -2.7}) {
    CHECK(std::abs(evaluate_u(e, x + two_pi) - evaluate_u(e, x)) < 1e-12);
  }
  // uniform-grid quadrature is exact for trig polynomials below Nyquist
  const int n = 128;
  double acc = 0.0;
  for (int j = 0; j < n; ++j)
    acc += std::norm(evaluate_u(e, -pi + j * two_pi / n));
  CHECK(std::abs(acc * two_pi / n - 1.0) < 1e-12);
}

TEST_CASE("cached eigenpairs are reproducible") {
  const auto V = make_lattice("cosine", 0.0, 16);
  BlochSolver solver(V);
  const auto a = solver.eigenpair_at(0.41, 2);
  const auto b = solver.eigenpair_at(0.41, 2);
  const auto c = solver.eigenpair_at(1.41, 2);  // reduced mod 1
  REQUIRE(a.coeffs.size() == b.coeffs.size());
  for (int i = 0; i < a.coeffs.size(); ++i) {
    CHECK(a.coeffs[i] == b.coeffs[i]);
    CHECK(a.coeffs[i] == c.coeffs[i]);
  }
  CHECK(a.energy == c.energy);
}

TEST_CASE("overlaps: unit diagonal, orthogonal bands, quadratic decay") {
  const auto V = make_lattice("cosine", 0.0, 16);
  BlochSolver solver(V);
  const auto a = solver.eigenpair_direct(0.31, 1);
  const auto b = solver.eigenpair_direct(0.31, 2);
  CHECK(std::abs(overlap(a, a) - cplx{1.0, 0.0}) < 1e-12);
  CHECK(std::abs(overlap(a, b)) < 1e-10);

  // 1 - |<u(xi), u(xi + delta)>| should shrink like delta^2
  auto defect = [&](double delta) {
    const auto c = solver.eigenpair_direct(0.31 + delta, 1);
    return 1.0 - std::abs(overlap(c, a));
  };
  const double d1 = defect(2e-3), d2 = defect(1e-3);
  CHECK(d1 / d2 > 2.0);
  CHECK(d1 / d2 < 8.0);
  CHECK(d2 < 1e-4);
}

TEST_CASE("rephaser draws unit phases deterministically") {
  Rephaser off;
  CHECK(off.phase(0.3, 2) == cplx{1.0, 0.0});
  Rephaser on{true, 99};
  const cplx p1 = on.phase(0.3, 2);
  CHECK(std::abs(std::abs(p1) - 1.0) < 1e-15);
  CHECK(on.phase(0.3, 2) == p1);
  CHECK(on.phase(0.3, 3) != p1);
  Rephaser other{true, 100};
  CHECK(other.phase(0.3, 2) != p1);
}

TEST_CASE("tracked band vectors match direct diagonalization") {
  const auto V = make_lattice("gaussian-bump", 25.0, 16);
  BlochSolver solver(V);
  const auto table = solver.solve_bands(6);
  for (int band : {1, 3, 6}) {
    const double xi0 = 0.21;
    BandPathTracker tracker(solver, table, band, xi0,
                            solver.eigenpair_at(xi0, band).coeffs);
    for (int k = 1; k <= 200; ++k) {
      // smooth non-monotone path crossing several zone boundaries
      const double xi = xi0 + 2.3 * std::sin(0.031 * k);
      const Eigen::VectorXcd& v = tracker.advance(xi);
      const auto ref = solver.eigenpair_direct(xi, band);
      CHECK(std::abs(std::abs(two_pi * v.dot(ref.coeffs)) - 1.0) < 1e-9);
      CHECK(std::abs(tracker.energy() - ref.energy) < 1e-9);
    }
  }
}

TEST_CASE("effective mode count is sane") {
  const auto V = make_lattice("cosine", 0.0, 16);
  BlochSolver solver(V);
  const int m = solver.effective_mode_count(8);
  CHECK(m >= 4);   // eight bands need at least modes out to ~4
  CHECK(m <= 16);  // bounded by the truncation
}
