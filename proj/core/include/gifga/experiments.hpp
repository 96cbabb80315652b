#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gifga/bloch.hpp"
#include "gifga/dynamics.hpp"
#include "gifga/fga.hpp"
#include "gifga/potentials.hpp"
#include "gifga/spectral.hpp"

namespace gifga {

// Full description of one experiment; presets ex2..ex7 fill in the values
// of the built-in studies, any field can be overridden via JSON config.
struct ExperimentConfig {
  std::string name = "custom";

  std::string lattice_kind = "cosine";
  double lattice_param = 25.0;  // bump width alpha for "gaussian-bump"
  std::string external_kind = "zero";

  // initial datum A(x) e^{iS(x)/eps}
  std::string amplitude = "gauss";  // "gauss": e^{-50x^2}; "gauss-cos" adds cos((x-0.5)/eps)
  std::string phase = "constant";   // "constant" | "centered" | "linear"
  int project_band = 0;             // >0: run on the band-projected datum

  std::vector<double> eps_list;
  std::vector<int> band_counts{1, 2, 4, 8};  // cuts for decomposition tables
  int n_bands = 8;

  double T = 0.0;
  int K = 150;
  std::string scheme = "rk4-classical";

  int lambda = 16;
  int n_xi = 200;
  double rho = 1e-3;

  double theta_factor = 6.0;
  double support = 0.85;

  double box_halfwidth = 8.0 * 3.14159265358979323846;
  double ref_dt = 1.0 / 4096.0;  // scaled down further for small eps

  int threads = 1;
  std::uint64_t seed = 1234;
};

ExperimentConfig preset(const std::string& name);

// merge a JSON document (dotted sections, e.g. {"bloch": {"lambda": 24}})
// over an existing config
void apply_overrides(ExperimentConfig& cfg, const std::string& json_text);

std::string config_json(const ExperimentConfig& cfg);   // canonical dump
std::uint64_t config_hash(const ExperimentConfig& cfg);

// resolved per-eps discretization parameters (manifest content)
std::string resolved_params_json(const ExperimentConfig& cfg, double eps);

InitialData make_base_initial(const ExperimentConfig& cfg, double eps);

// effective reference time step (shrinks with eps to keep the splitting
// error well below the method error)
double effective_ref_dt(const ExperimentConfig& cfg, double eps);

struct DecompositionRow {
  double eps;
  int n_bands;
  double error;
};
std::vector<DecompositionRow> run_decomposition_study(
    const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct ConvergenceRow {
  double eps;
  double error;
  double self_convergence;  // reference resolution estimate
  double fga_seconds, ref_seconds;
};
struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  RateSummary rates;
};
ConvergenceResult run_convergence_study(const ExperimentConfig& cfg,
                                        std::ostream* log = nullptr);

// FGA field at time T on the reference grid for one eps (no reference solve)
WaveField run_fga(const ExperimentConfig& cfg, double eps,
                  const Rephaser& rephaser = {});

struct GaugeCheckRow {
  double eps;
  double rel_discrepancy;  // plain vs rephased run, relative L^2
};
std::vector<GaugeCheckRow> run_gauge_check(const ExperimentConfig& cfg,
                                           std::ostream* log = nullptr);

}  // namespace gifga
