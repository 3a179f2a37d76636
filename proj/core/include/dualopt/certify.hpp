#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dualopt/dualnet.hpp"
#include "dualopt/graph.hpp"
#include "dualopt/problems.hpp"

namespace dualopt {

struct ReferenceSolution {
  Eigen::VectorXd x_star;  // consensus optimum, dim n
  double f_star = 0.0;
  Eigen::VectorXd y_star;  // minimal-norm dual solution, dim m*n
  double R = 0.0;
  double R_x = 0.0;
  double R_w = 0.0;
  std::vector<Eigen::VectorXd> local_minimizers;  // x*_i(0)
  /// ||grad F(x*)||, tangent components on simplex domains.
  double gradient_norm = 0.0;
  /// ||sum_i grad f_i(x*)|| (tangent on the simplex).
  double optimality_residual = 0.0;
};

/// Default reference tolerance 1e-12 * (1 + |F(x0)|) at x0 = 0 (or the
/// simplex barycenter).
double default_reference_tolerance(const SeparableObjective& problem);

/// Closed form for all-quadratic (pseudo-inverse on singular sums) and
/// all-entropy problems; otherwise centralized FGM on sum_i f_i to the given
/// gradient tolerance. Throws NumericalError if that solve stalls.
ReferenceSolution reference_solve(const SeparableObjective& problem, const CommunicationGraph& graph,
                                  std::optional<double> tol = std::nullopt);

struct SolutionCertificate {
  double primal_gap = 0.0;  // signed F(x) - F*
  double consensus_residual = 0.0;
  double epsilon = 0.0;
  double epsilon_tilde = 0.0;
  bool satisfied = false;
};

/// Evaluates F at the candidate, so it takes the problem alongside the reference.
SolutionCertificate certificate(const SeparableObjective& problem, const Eigen::VectorXd& candidate,
                                const ReferenceSolution& ref, const Laplacian& w, double epsilon,
                                double epsilon_tilde);

/// epsilon_tilde = epsilon / R; requires R > 0.
SolutionCertificate certificate(const SeparableObjective& problem, const Eigen::VectorXd& candidate,
                                const ReferenceSolution& ref, const Laplacian& w, double epsilon);

struct BoundComparison {
  std::optional<std::size_t> first_certified;  // trace row index
  std::optional<std::size_t> rounds_to_certificate;
  std::size_t bound_N = 0;
  bool violation = false;  // certificate unmet at bound_N
  double ratio = 0.0;      // (first_certified + 1) / bound_N, NaN if never certified
};

/// Uses the trace's epsilon, epsilon_tilde and per-row primal_gap (so the
/// trace must have been produced with f_star set).
BoundComparison compare_to_bound(const RunTrace& trace, std::size_t bound_N);

/// Fills AlgoConfig radii and f_star from a reference solution.
void apply_reference(AlgoConfig& config, const ReferenceSolution& ref);

/// M for the bounds: the problem's own M when finite, otherwise ||grad F(x*)||.
double effective_M(const SeparableObjective& problem, const ReferenceSolution& ref);

}  // namespace dualopt
