#include "gifga/experiments.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace gifga {

namespace {

using nlohmann::json;

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::vector<double> inverse_powers(std::initializer_list<int> denoms) {
  std::vector<double> v;
  for (int d : denoms) v.push_back(1.0 / d);
  return v;
}

}  // namespace

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  if (name == "ex2") {
    c.lattice_kind = "cosine";
    c.amplitude = "gauss-cos";
    c.phase = "centered";
    c.eps_list = inverse_powers({64, 128, 256, 512});
  } else if (name == "ex3") {
    c.lattice_kind = "gaussian-bump";
    c.lattice_param = 25.0;
    c.amplitude = "gauss";
    c.phase = "constant";
    c.eps_list = inverse_powers({64, 128, 256, 512});
  } else if (name == "ex4") {
    c.lattice_kind = "cosine";
    c.amplitude = "gauss";
    c.phase = "constant";
    c.T = 0.35;
    c.eps_list = inverse_powers({8, 16, 32, 64});
  } else if (name == "ex5") {
    c.lattice_kind = "gaussian-bump";
    c.lattice_param = 20.0;
    c.amplitude = "gauss";
    c.phase = "linear";
    c.project_band = 1;
    c.T = 0.35;
    c.eps_list = inverse_powers({64, 128, 256});
  } else if (name == "ex6" || name == "ex7") {
    c.lattice_kind = "gaussian-bump";
    c.lattice_param = 25.0;
    c.external_kind = name == "ex6" ? "harmonic" : "cosine";
    c.amplitude = "gauss-cos";
    c.phase = "centered";
    c.T = 0.2;
    c.eps_list = name == "ex6" ? inverse_powers({64, 128, 256, 512})
                               : inverse_powers({128, 256, 512});
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return c;
}

namespace {

json to_json(const ExperimentConfig& c) {
  return json{
      {"name", c.name},
      {"lattice", {{"kind", c.lattice_kind}, {"params", c.lattice_param}}},
      {"external", {{"kind", c.external_kind}}},
      {"initial",
       {{"amplitude", c.amplitude},
        {"phase", c.phase},
        {"project_band", c.project_band}}},
      {"bloch",
       {{"lambda", c.lambda},
        {"n_xi", c.n_xi},
        {"rho", c.rho},
        {"n_bands", c.n_bands}}},
      {"dynamics", {{"T", c.T}, {"K", c.K}, {"scheme", c.scheme}}},
      {"mesh", {{"theta_factor", c.theta_factor}, {"support", c.support}}},
      {"spectral",
       {{"box_halfwidth", c.box_halfwidth}, {"dt", c.ref_dt}}},
      {"run",
       {{"eps_list", c.eps_list},
        {"band_counts", c.band_counts},
        {"threads", c.threads},
        {"seed", c.seed}}},
  };
}

void from_json_over(const json& j, ExperimentConfig& c) {
  auto get = [&](const char* sec, const char* key, auto& dst) {
    if (j.contains(sec) && j[sec].contains(key)) j[sec][key].get_to(dst);
  };
  if (j.contains("name")) j["name"].get_to(c.name);
  get("lattice", "kind", c.lattice_kind);
  get("lattice", "params", c.lattice_param);
  get("external", "kind", c.external_kind);
  get("initial", "amplitude", c.amplitude);
  get("initial", "phase", c.phase);
  get("initial", "project_band", c.project_band);
  get("bloch", "lambda", c.lambda);
  get("bloch", "n_xi", c.n_xi);
  get("bloch", "rho", c.rho);
  get("bloch", "n_bands", c.n_bands);
  get("dynamics", "T", c.T);
  get("dynamics", "K", c.K);
  get("dynamics", "scheme", c.scheme);
  get("mesh", "theta_factor", c.theta_factor);
  get("mesh", "support", c.support);
  get("spectral", "box_halfwidth", c.box_halfwidth);
  get("spectral", "dt", c.ref_dt);
  get("run", "eps_list", c.eps_list);
  get("run", "band_counts", c.band_counts);
  get("run", "threads", c.threads);
  get("run", "seed", c.seed);
}

}  // namespace

void apply_overrides(ExperimentConfig& cfg, const std::string& json_text) {
  from_json_over(json::parse(json_text), cfg);
}

std::string config_json(const ExperimentConfig& cfg) {
  return to_json(cfg).dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string s = to_json(cfg).dump();
  std::uint64_t h = 14695981039346656037ULL;  // FNV-1a
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

InitialData make_base_initial(const ExperimentConfig& cfg, double eps) {
  std::function<double(double)> amp;
  if (cfg.amplitude == "gauss") {
    amp = [](double x) { return std::exp(-50.0 * x * x); };
  } else if (cfg.amplitude == "gauss-cos") {
    amp = [eps](double x) {
      return std::exp(-50.0 * x * x) * std::cos((x - 0.5) / eps);
    };
  } else {
    throw std::invalid_argument("unknown amplitude '" + cfg.amplitude + "'");
  }
  std::function<double(double)> ph;
  if (cfg.phase == "constant") {
    ph = [](double x) { return 0.3 + 0.1 * std::sin(x - 0.5); };
  } else if (cfg.phase == "centered") {
    ph = [](double x) { return 0.3 * (x - 0.5) + 0.1 * std::sin(x - 0.5); };
  } else if (cfg.phase == "linear") {
    ph = [](double x) { return 0.3 * x + 0.1 * std::sin(x - 0.5); };
  } else {
    throw std::invalid_argument("unknown phase '" + cfg.phase + "'");
  }
  InitialData d;
  d.eps = eps;
  d.support = cfg.support;
  d.psi = [amp, ph, eps](double x) {
    return std::polar(amp(x), ph(x) / eps);
  };
  return d;
}

double effective_ref_dt(const ExperimentConfig& cfg, double eps) {
  // keep the splitting error roughly eps-independent
  return cfg.ref_dt * std::min(1.0, eps * 32.0);
}

std::string resolved_params_json(const ExperimentConfig& cfg, double eps) {
  const PhaseSpaceMesh mesh =
      PhaseSpaceMesh::standard(eps, cfg.support, cfg.theta_factor);
  const SpectralConfig scfg =
      SpectralConfig::standard(eps, cfg.box_halfwidth, effective_ref_dt(cfg, eps));
  json j{
      {"eps", eps},
      {"lambda", cfg.lambda},
      {"n_xi", cfg.n_xi},
      {"rho", cfg.rho},
      {"dq", mesh.dq},
      {"dp", mesh.dp},
      {"n_q", mesh.n_q},
      {"n_p", mesh.n_p},
      {"theta", mesh.theta},
      {"K", cfg.K},
      {"spectral_n_x", scfg.n_x},
      {"spectral_dt", scfg.dt},
      {"config_hash", config_hash(cfg)},
  };
  return j.dump(2);
}

namespace {

struct Pipeline {
  BlochSolver solver;
  BandTable bands;
  PhaseSpaceMesh mesh;
  InitialData data;       // datum the reference solver propagates
  InitialData transform;  // datum the coefficients are computed from
  double dy;
  int band_lo, band_hi;  // reconstruction band range
};

Pipeline make_pipeline(const ExperimentConfig& cfg, double eps,
                       const Rephaser& rephaser, bool need_bands) {
  PeriodicPotential V =
      make_lattice(cfg.lattice_kind, cfg.lattice_param, cfg.lambda);
  BlochSolver solver(std::move(V), rephaser);
  const int n_used = cfg.project_band > 0 ? cfg.project_band : cfg.n_bands;
  const double dy = default_dy(eps, solver.effective_mode_count(n_used));

  InitialData base = make_base_initial(cfg, eps);
  InitialData data = base;
  const PhaseSpaceMesh mesh =
      PhaseSpaceMesh::standard(eps, base.support, cfg.theta_factor);
  if (cfg.project_band > 0) {
    // single-band runs: coefficients come from the base datum on the base
    // mesh, and the reference solver propagates the projected datum -- which
    // is by construction the t = 0 reconstruction of those coefficients
    data = make_projected_initial(base, cfg.project_band, mesh, solver, dy);
  }

  BandTable bands;
  if (need_bands) bands = solver.solve_bands(n_used, cfg.n_xi, cfg.rho);

  const int lo = cfg.project_band > 0 ? cfg.project_band : 1;
  return Pipeline{std::move(solver), std::move(bands), mesh, std::move(data),
                  std::move(base), dy, lo, n_used};
}

}  // namespace

std::vector<DecompositionRow> run_decomposition_study(
    const ExperimentConfig& cfg, std::ostream* log) {
  std::vector<DecompositionRow> rows;
  for (double eps : cfg.eps_list) {
    Pipeline pl = make_pipeline(cfg, eps, {}, /*need_bands=*/false);
    const int n_max = cfg.band_counts.back();
    const FgaCoefficients w = windowed_transform(pl.transform, pl.mesh, n_max,
                                                 pl.solver, pl.dy, cfg.threads);
    const auto trajs = initial_trajectories(pl.mesh, n_max, pl.solver);

    // compare on the transform quadrature grid
    const double y_lo = pl.mesh.q(0) - pl.mesh.theta;
    const double y_hi = pl.mesh.q(pl.mesh.n_q - 1) + pl.mesh.theta;
    const int n_y = static_cast<int>(std::ceil((y_hi - y_lo) / pl.dy)) + 1;
    WaveField psi0 = make_grid(y_lo, pl.dy, n_y);
    for (int k = 0; k < n_y; ++k) psi0.values[k] = pl.data.psi(psi0.x(k));

    WaveField acc = make_grid(y_lo, pl.dy, n_y);
    int prev = 0;
    for (int N : cfg.band_counts) {
      const WaveField part =
          reconstruct(trajs, w, acc, prev + 1, N, cfg.threads);
      for (int k = 0; k < n_y; ++k) acc.values[k] += part.values[k];
      prev = N;
      const double err = l2_error(acc, psi0);
      rows.push_back({eps, N, err});
      if (log)
        *log << cfg.name << " decomposition eps=" << eps << " N=" << N
             << " error=" << err << "\n";
    }
  }
  return rows;
}

WaveField run_fga(const ExperimentConfig& cfg, double eps,
                  const Rephaser& rephaser) {
  Pipeline pl = make_pipeline(cfg, eps, rephaser, /*need_bands=*/true);
  const ExternalPotential U = make_external(cfg.external_kind);

  const FgaCoefficients w = windowed_transform(pl.transform, pl.mesh, pl.band_hi,
                                               pl.solver, pl.dy, cfg.threads);
  IntegratorConfig integ{cfg.T, cfg.K, scheme_from_name(cfg.scheme)};
  EnsembleOptions opts;
  opts.threads = cfg.threads;
  const auto trajs =
      evolve_ensemble(pl.mesh, pl.bands, pl.solver, pl.band_hi, U, integ, opts);

  const SpectralConfig scfg =
      SpectralConfig::standard(eps, cfg.box_halfwidth, effective_ref_dt(cfg, eps));
  const WaveField grid = make_grid(scfg.x_min, scfg.dx(), scfg.n_x);
  return reconstruct(trajs, w, grid, pl.band_lo, pl.band_hi, cfg.threads);
}

ConvergenceResult run_convergence_study(const ExperimentConfig& cfg,
                                        std::ostream* log) {
  ConvergenceResult res;
  std::vector<double> errors;
  for (double eps : cfg.eps_list) {
    double t0 = now_seconds();
    const WaveField fga = run_fga(cfg, eps);
    const double t_fga = now_seconds() - t0;

    Pipeline pl = make_pipeline(cfg, eps, {}, /*need_bands=*/false);
    const PeriodicPotential& V = pl.solver.potential();
    const ExternalPotential U = make_external(cfg.external_kind);
    const SpectralConfig scfg =
        SpectralConfig::standard(eps, cfg.box_halfwidth, effective_ref_dt(cfg, eps));
    t0 = now_seconds();
    double selfconv = 0.0;
    const WaveField ref =
        solve_reference(pl.data, cfg.T, scfg, V, U, &selfconv);
    const double t_ref = now_seconds() - t0;

    const double err = l2_error(fga, ref);
    errors.push_back(err);
    res.rows.push_back({eps, err, selfconv, t_fga, t_ref});
    if (log)
      *log << cfg.name << " eps=" << eps << " error=" << err
           << " selfconv=" << selfconv << " (fga " << t_fga << "s, ref "
           << t_ref << "s)\n";
  }
  if (errors.size() >= 2) res.rates = convergence_order(errors, cfg.eps_list);
  return res;
}

std::vector<GaugeCheckRow> run_gauge_check(const ExperimentConfig& cfg,
                                           std::ostream* log) {
  std::vector<GaugeCheckRow> rows;
  for (double eps : cfg.eps_list) {
    const WaveField plain = run_fga(cfg, eps);
    Rephaser rp;
    rp.active = true;
    rp.seed = cfg.seed;
    const WaveField twisted = run_fga(cfg, eps, rp);
    const double rel = l2_error(plain, twisted) / plain.l2norm();
    rows.push_back({eps, rel});
    if (log)
      *log << cfg.name << " gauge-check eps=" << eps
           << " rel_discrepancy=" << rel << "\n";
  }
  return rows;
}

}  // namespace gifga
