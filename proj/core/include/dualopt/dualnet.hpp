#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dualopt/graph.hpp"
#include "dualopt/problems.hpp"
#include "dualopt/simnet.hpp"

namespace dualopt {

enum class Variant {
  kCase1,
  kCase2,
  kCase3,
  kCase4,
  kNofriendScSmooth,
  kNofriendSmooth,
  kAugmentedSc,
  kAugmentedSmooth,
};

inline constexpr Variant kAllVariants[] = {
    Variant::kCase1,           Variant::kCase2,          Variant::kCase3,
    Variant::kCase4,           Variant::kNofriendScSmooth, Variant::kNofriendSmooth,
    Variant::kAugmentedSc,     Variant::kAugmentedSmooth,
};

Variant parse_variant(std::string_view name);
std::string_view to_string(Variant v);
bool has_inner_loop(Variant v);

/// Per-agent dual iterate blocks (z_i is block i of sqrt(W) y_k).
struct DualAgentState {
  Eigen::VectorXd z;
  Eigen::VectorXd z_tilde;
  Eigen::VectorXd w;
  Eigen::VectorXd w_tilde;
};

struct AlgoConfig {
  Variant variant = Variant::kCase1;
  double epsilon = 1e-3;
  std::optional<double> epsilon_tilde;  // defaults to epsilon / R
  std::optional<double> R;
  std::optional<double> R_x;
  std::optional<double> R_w;
  std::optional<std::size_t> N;
  std::optional<std::size_t> T;
  std::optional<double> mu;
  std::optional<double> L;
  std::optional<double> M;
  /// Reference optimum; rows report F(x) - f_star when present.
  std::optional<double> f_star;
  /// Per-agent x*_i(0); computed with local_minimizer when absent.
  std::optional<std::vector<Eigen::VectorXd>> local_minimizers;
  bool record_candidates = false;
};

struct DerivedDualConstants {
  double L_phi = 0.0;
  double mu_phi = 0.0;
  std::optional<double> L_phi_hat;
  std::optional<double> mu_phi_hat;
  std::optional<double> R_w;
};

struct BoundInputs {
  double mu = 0.0;
  double L = kInf;
  double M = kInf;
  double mu_sum = 0.0;
  SpectralSummary spectrum;
  std::size_t m = 0;
  double epsilon = 0.0;
  std::optional<double> R;
  std::optional<double> R_x;
  std::optional<double> R_w;
};

struct IterationBound {
  std::size_t N = 1;
  std::optional<std::size_t> T;
};

/// Ceilings of the iteration-complexity bounds for each variant, floored at 1. Throws
/// std::invalid_argument when a constant the variant needs is missing or not
/// positive and finite.
IterationBound iteration_bound(Variant v, const BoundInputs& in);

DerivedDualConstants derive_dual_constants(Variant v, const BoundInputs& in);

struct TraceRow {
  std::size_t k = 0;
  std::size_t comm_rounds = 0;
  std::vector<std::size_t> oracle_calls;
  Eigen::VectorXd candidate;  // empty unless record_candidates
  double objective = 0.0;
  double primal_gap = 0.0;  // NaN without f_star
  double consensus_residual = 0.0;
  double dual_gap_witness = 0.0;
  std::size_t oracle_calls_max() const;
};

struct RunTrace {
  Variant variant = Variant::kCase1;
  double epsilon = 0.0;
  double epsilon_tilde = 0.0;
  std::size_t N = 0;
  std::optional<std::size_t> T;
  std::vector<TraceRow> rows;
  Eigen::VectorXd final_candidate;
  std::size_t total_rounds = 0;
  std::vector<std::size_t> oracle_calls;
  std::size_t violation_count = 0;
};

/// Read-only view of one outer iteration, for instrumentation.
struct IterationView {
  std::size_t k;
  const std::vector<Eigen::VectorXd>& z_tilde;
  const std::vector<Eigen::VectorXd>& responses;
  const std::vector<Eigen::VectorXd>& z_next;
};

struct RunHooks {
  std::function<void(const IterationView&)> on_iteration;
};

RunTrace run_case1(const SeparableObjective& problem, const CommunicationGraph& graph,
                   const AlgoConfig& config, const RunHooks& hooks = {});
RunTrace run_case2(const SeparableObjective& problem, const CommunicationGraph& graph,
                   const AlgoConfig& config, const RunHooks& hooks = {});
RunTrace run_case3(const SeparableObjective& problem, const CommunicationGraph& graph,
                   const AlgoConfig& config, const RunHooks& hooks = {});
RunTrace run_case4(const SeparableObjective& problem, const CommunicationGraph& graph,
                   const AlgoConfig& config, const RunHooks& hooks = {});
RunTrace run_nofriend_sc_smooth(const SeparableObjective& problem, const CommunicationGraph& graph,
                                const AlgoConfig& config, const RunHooks& hooks = {});
RunTrace run_nofriend_smooth(const SeparableObjective& problem, const CommunicationGraph& graph,
                             const AlgoConfig& config, const RunHooks& hooks = {});
RunTrace run_augmented_sc(const SeparableObjective& problem, const CommunicationGraph& graph,
                          const AlgoConfig& config, const RunHooks& hooks = {});
RunTrace run_augmented_smooth(const SeparableObjective& problem, const CommunicationGraph& graph,
                              const AlgoConfig& config, const RunHooks& hooks = {});

/// Dispatches on config.variant.
RunTrace run_variant(const SeparableObjective& problem, const CommunicationGraph& graph,
                     const AlgoConfig& config, const RunHooks& hooks = {});

/// Same as run_variant but against a caller-owned simulator, so tests can
/// inspect its counters. The simulator is reset first.
RunTrace run_variant(const SeparableObjective& problem, const CommunicationGraph& graph,
                     const AlgoConfig& config, NetworkSim& sim, const RunHooks& hooks = {});

}  // namespace dualopt
