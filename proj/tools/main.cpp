// Experiment driver: band tables, initial decompositions, propagation,
// reference solves, convergence studies and the gauge-invariance check.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gifga/experiments.hpp"

namespace fs = std::filesystem;
using namespace gifga;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset_name;
  std::string out_dir = "out";
  int threads = 1;
  std::uint64_t seed = 1234;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON config file");
  cmd->add_option("--preset", a.preset_name, "named experiment (ex2..ex7)");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--threads", a.threads, "worker threads");
  cmd->add_option("--seed", a.seed, "seed for the gauge-check rephasing");
}

ExperimentConfig load_config(const CommonArgs& a) {
  ExperimentConfig cfg;
  if (!a.preset_name.empty()) cfg = preset(a.preset_name);
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) throw std::runtime_error("cannot open config " + a.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    apply_overrides(cfg, ss.str());
  }
  cfg.threads = a.threads;
  cfg.seed = a.seed;
  if (cfg.eps_list.empty())
    throw std::runtime_error("config has no eps values (use --preset or --config)");
  return cfg;
}

std::ofstream open_out(const CommonArgs& a, const std::string& file) {
  fs::create_directories(a.out_dir);
  std::ofstream out(fs::path(a.out_dir) / file);
  out << std::setprecision(12);
  return out;
}

void write_manifest(const CommonArgs& a, const ExperimentConfig& cfg,
                    double wall_seconds) {
  auto out = open_out(a, "manifest.json");
  out << "{\n\"config\": " << config_json(cfg) << ",\n\"resolved\": [";
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i)
    out << (i ? ",\n" : "\n") << resolved_params_json(cfg, cfg.eps_list[i]);
  out << "\n],\n\"wall_seconds\": " << wall_seconds << "\n}\n";
}

void dump_field(const CommonArgs& a, const std::string& file,
                const WaveField& f) {
  auto out = open_out(a, file);
  out << "x,re_psi,im_psi\n";
  for (int i = 0; i < f.size(); ++i)
    out << f.x(i) << "," << f.values[i].real() << "," << f.values[i].imag()
        << "\n";
}

int cmd_bands(const CommonArgs& a) {
  const ExperimentConfig cfg = load_config(a);
  BlochSolver solver(
      make_lattice(cfg.lattice_kind, cfg.lattice_param, cfg.lambda));
  const BandTable t = solver.solve_bands(cfg.n_bands, cfg.n_xi, cfg.rho);
  auto out = open_out(a, "bands.csv");
  out << "xi";
  for (int n = 1; n <= t.n_bands; ++n) out << ",E_" << n;
  out << "\n";
  for (int j = 0; j < t.n_xi; ++j) {
    out << t.rho + static_cast<double>(j) / t.n_xi;
    for (int n = 0; n < t.n_bands; ++n) out << "," << t.energies[n][j];
    out << "\n";
  }
  std::cout << "wrote bands.csv (" << t.n_xi << " momenta, " << t.n_bands
            << " bands)\n";
  return 0;
}

int cmd_decompose(const CommonArgs& a) {
  const ExperimentConfig cfg = load_config(a);
  const double t0 = static_cast<double>(clock()) / CLOCKS_PER_SEC;
  const auto rows = run_decomposition_study(cfg, &std::cout);
  auto out = open_out(a, "decomposition.csv");
  out << "epsilon,n_bands,l2_error\n";
  for (const auto& r : rows)
    out << r.eps << "," << r.n_bands << "," << r.error << "\n";
  write_manifest(a, cfg, static_cast<double>(clock()) / CLOCKS_PER_SEC - t0);
  return 0;
}

int cmd_convergence(const CommonArgs& a) {
  const ExperimentConfig cfg = load_config(a);
  const double t0 = static_cast<double>(clock()) / CLOCKS_PER_SEC;
  const auto res = run_convergence_study(cfg, &std::cout);
  auto out = open_out(a, "convergence.csv");
  out << "epsilon,error,pairwise_rate,self_convergence\n";
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& r = res.rows[i];
    out << r.eps << "," << r.error << ",";
    if (i > 0) out << res.rates.pairwise[i - 1];
    out << "," << r.self_convergence << "\n";
  }
  auto js = open_out(a, "summary.json");
  js << "{\"lsq_slope\": " << res.rates.lsq_slope << ", \"pairwise\": [";
  for (std::size_t i = 0; i < res.rates.pairwise.size(); ++i)
    js << (i ? ", " : "") << res.rates.pairwise[i];
  js << "]}\n";
  std::cout << "least-squares slope: " << res.rates.lsq_slope << "\n";
  write_manifest(a, cfg, static_cast<double>(clock()) / CLOCKS_PER_SEC - t0);
  return 0;
}

int cmd_propagate(const CommonArgs& a, bool dump_trajectories) {
  ExperimentConfig cfg = load_config(a);
  const double t0 = static_cast<double>(clock()) / CLOCKS_PER_SEC;
  for (double eps : cfg.eps_list) {
    const WaveField f = run_fga(cfg, eps);
    std::ostringstream name;
    name << "field_eps" << 1.0 / eps << ".csv";
    dump_field(a, name.str(), f);
    std::cout << cfg.name << " eps=" << eps << " |psi_fga| = " << f.l2norm()
              << "\n";
  }
  if (dump_trajectories) {
    // per-trajectory endpoint dump for the first eps
    const double eps = cfg.eps_list.front();
    PeriodicPotential V =
        make_lattice(cfg.lattice_kind, cfg.lattice_param, cfg.lambda);
    BlochSolver solver(std::move(V));
    const int n_used = cfg.project_band > 0 ? cfg.project_band : cfg.n_bands;
    const BandTable bands = solver.solve_bands(n_used, cfg.n_xi, cfg.rho);
    const PhaseSpaceMesh mesh =
        PhaseSpaceMesh::standard(eps, cfg.support, cfg.theta_factor);
    IntegratorConfig integ{cfg.T, cfg.K, scheme_from_name(cfg.scheme)};
    EnsembleOptions opts;
    opts.threads = cfg.threads;
    const auto trajs = evolve_ensemble(mesh, bands, solver, n_used,
                                       make_external(cfg.external_kind), integ,
                                       opts);
    auto out = open_out(a, "trajectories.csv");
    out << "band,I,J,t,Q,P,S,re_b,im_b,re_wilson,im_wilson\n";
    for (const auto& tr : trajs)
      out << tr.band << "," << tr.I << "," << tr.J << "," << cfg.T << ","
          << tr.state.Q << "," << tr.state.P << "," << tr.state.S << ","
          << tr.state.b.real() << "," << tr.state.b.imag() << ","
          << tr.state.wilson.real() << "," << tr.state.wilson.imag() << "\n";
  }
  write_manifest(a, cfg, static_cast<double>(clock()) / CLOCKS_PER_SEC - t0);
  return 0;
}

int cmd_reference(const CommonArgs& a) {
  const ExperimentConfig cfg = load_config(a);
  for (double eps : cfg.eps_list) {
    PeriodicPotential V =
        make_lattice(cfg.lattice_kind, cfg.lattice_param, cfg.lambda);
    const ExternalPotential U = make_external(cfg.external_kind);
    const SpectralConfig scfg = SpectralConfig::standard(
        eps, cfg.box_halfwidth, effective_ref_dt(cfg, eps));
    InitialData data = make_base_initial(cfg, eps);
    if (cfg.project_band > 0) {
      BlochSolver solver(V);
      const PhaseSpaceMesh mesh =
          PhaseSpaceMesh::standard(eps, cfg.support, cfg.theta_factor);
      const double dy =
          default_dy(eps, solver.effective_mode_count(cfg.project_band));
      data = make_projected_initial(data, cfg.project_band, mesh, solver, dy);
    }
    double selfconv = 0.0;
    const WaveField ref = solve_reference(data, cfg.T, scfg, V, U, &selfconv);
    std::ostringstream name;
    name << "reference_eps" << 1.0 / eps << ".csv";
    dump_field(a, name.str(), ref);
    std::cout << cfg.name << " eps=" << eps << " |psi_ref| = " << ref.l2norm()
              << " selfconv=" << selfconv << "\n";
  }
  return 0;
}

int cmd_gauge_check(const CommonArgs& a) {
  const ExperimentConfig cfg = load_config(a);
  const auto rows = run_gauge_check(cfg, &std::cout);
  auto out = open_out(a, "gauge_check.csv");
  out << "epsilon,rel_discrepancy\n";
  bool ok = true;
  for (const auto& r : rows) {
    out << r.eps << "," << r.rel_discrepancy << "\n";
    ok = ok && r.rel_discrepancy <= 1e-12;
  }
  std::cout << (ok ? "gauge-check passed" : "gauge-check FAILED") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gauge-invariant frozen Gaussian propagation for lattice "
               "Schrodinger equations"};
  app.require_subcommand(1);

  CommonArgs args;
  bool dump_traj = false;
  auto* bands = app.add_subcommand("bands", "band structure table");
  auto* decompose = app.add_subcommand("decompose", "initial decomposition study");
  auto* propagate = app.add_subcommand("propagate", "FGA field at final time");
  propagate->add_flag("--dump-trajectories", dump_traj,
                      "write per-trajectory endpoint data");
  auto* reference = app.add_subcommand("reference", "spectral reference solve");
  auto* convergence = app.add_subcommand("convergence", "FGA vs reference errors");
  auto* gauge = app.add_subcommand("gauge-check", "gauge-invariance property check");
  for (auto* cmd : {bands, decompose, propagate, reference, convergence, gauge})
    add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    std::cout << std::setprecision(10);
    if (bands->parsed()) return cmd_bands(args);
    if (decompose->parsed()) return cmd_decompose(args);
    if (propagate->parsed()) return cmd_propagate(args, dump_traj);
    if (reference->parsed()) return cmd_reference(args);
    if (convergence->parsed()) return cmd_convergence(args);
    if (gauge->parsed()) return cmd_gauge_check(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
