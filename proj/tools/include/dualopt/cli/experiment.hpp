#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dualopt/certify.hpp"
#include "dualopt/dualnet.hpp"
#include "dualopt/graph.hpp"
#include "dualopt/problems.hpp"

namespace dualopt::cli {

/// Flat JSON experiment description. Unknown keys are rejected.
struct ExperimentConfig {
  // problem
  std::string problem = "quadratic";  // quadratic | ridge | entropy | logistic
  std::size_t n = 2;
  std::size_t l = 10;
  double c = 0.1;
  double scale_min = 1.0;
  double scale_max = 1.0;
  std::string scale_pattern = "uniform";  // uniform | alternating
  std::optional<double> entropy_mu;
  std::optional<double> entropy_spread;
  std::uint64_t problem_seed = 1;
  std::optional<std::filesystem::path> dataset;

  // graph
  std::string graph = "cycle";  // a GraphFamily name or "custom"
  std::size_t m = 4;
  std::optional<double> edge_prob;
  // erdos_renyi only: p = min(1, edge_prob_scale * log(m) / m), overrides edge_prob
  std::optional<double> edge_prob_scale;
  std::uint64_t graph_seed = 1;
  std::vector<Edge> edges;  // graph == "custom"

  // algorithm
  Variant algorithm = Variant::kCase1;
  double epsilon = 1e-3;
  std::optional<double> epsilon_tilde;
  std::optional<double> R;
  std::optional<double> R_x;
  std::optional<std::size_t> N;
  std::optional<std::size_t> T;
  std::optional<double> mu;
  std::optional<double> L;
  std::optional<double> M;

  std::vector<std::size_t> m_list;

  std::string trace_file = "trace.csv";
  std::string summary_file = "summary.json";
  std::string sweep_file = "sweep.csv";
};

/// Relative dataset paths resolve against base_dir.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

CommunicationGraph build_communication_graph(const ExperimentConfig& cfg, std::size_t m);
SeparableObjective build_problem(const ExperimentConfig& cfg, std::size_t m);

struct RunOutcome {
  SpectralSummary spectrum;
  ReferenceSolution reference;
  RunTrace trace;
  SolutionCertificate certificate;
  BoundComparison comparison;
};

RunOutcome run_experiment(const ExperimentConfig& cfg, std::size_t m);
inline RunOutcome run_experiment(const ExperimentConfig& cfg) { return run_experiment(cfg, cfg.m); }

inline constexpr const char* kTraceHeader =
    "iteration,comm_rounds,oracle_calls_max,primal_gap,consensus_residual,dual_gap_witness";

void write_trace_csv(const RunTrace& trace, std::ostream& out);
std::string summary_json(const ExperimentConfig& cfg, const RunOutcome& outcome);
std::string format_spectrum(const SpectralSummary& s);

struct SweepRow {
  std::size_t m = 0;
  double chi = 0.0;
  std::size_t rounds_to_certificate = 0;
};

/// One run per entry of cfg.m_list (at least three), ordered by m. Throws if
/// any member run ends without a satisfied certificate.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

/// Subcommand bodies. Return the process exit status.
int cmd_spectrum(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                 std::ostream& console);
int cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
            std::ostream& console);
int cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
              std::ostream& console);

}  // namespace dualopt::cli
