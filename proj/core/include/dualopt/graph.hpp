#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dualopt {

using AgentId = std::size_t;
using Edge = std::pair<AgentId, AgentId>;

enum class GraphFamily { kCycle, kPath, kStar, kComplete, kErdosRenyi };

GraphFamily parse_graph_family(std::string_view name);
std::string_view to_string(GraphFamily family);

/// Connected, undirected, simple communication graph on nodes 0..m-1.
///
/// Edges are stored normalized (i < j) and sorted. Construction fails with
/// std::invalid_argument on self-loops, duplicate pairs, out-of-range ids or
/// a disconnected edge set.
class Topology {
 public:
  Topology(std::size_t node_count, std::vector<Edge> edges);

  std::size_t node_count() const { return node_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<AgentId>& neighbors(AgentId i) const { return adjacency_.at(i); }
  std::size_t degree(AgentId i) const { return adjacency_.at(i).size(); }
  bool adjacent(AgentId i, AgentId j) const;

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<AgentId>> adjacency_;
};

bool is_connected(std::size_t node_count, const std::vector<Edge>& edges);

/// Builds a graph of the named family. Erdos-Renyi graphs are resampled with
/// seed, seed+1, ... until connected; edge_prob is required for that family
/// and ignored otherwise.
Topology build_graph(GraphFamily kind, std::size_t m,
                     std::optional<double> edge_prob = std::nullopt,
                     std::uint64_t seed = 0);

/// Dense graph Laplacian: degrees on the diagonal, -1 per edge.
class Laplacian {
 public:
  /// Validates symmetry and zero row sums. Connectivity is not checked here;
  /// spectral_summary() rejects matrices with a multi-dimensional kernel.
  static Laplacian from_matrix(Eigen::MatrixXd w);

  const Eigen::MatrixXd& matrix() const { return w_; }
  std::size_t size() const { return static_cast<std::size_t>(w_.rows()); }

  /// (W ⊗ I_n) x for a stacked vector of size()*n entries, blockwise.
  Eigen::VectorXd apply(const Eigen::VectorXd& x, std::size_t n) const;

  /// x^T (W ⊗ I_n) x as sum_{i<j} -W_ij ||x_i - x_j||^2, which stays
  /// accurate near consensus where the direct form cancels.
  double quadratic_form(const Eigen::VectorXd& x, std::size_t n) const;

 private:
  struct Weight {
    Eigen::Index i;
    Eigen::Index j;
    double w;
  };
  explicit Laplacian(Eigen::MatrixXd w);
  Eigen::MatrixXd w_;
  std::vector<Weight> off_diagonal_;
};

Laplacian laplacian(const Topology& t);

struct SpectralSummary {
  double lambda_max = 0.0;
  double lambda_min_plus = 0.0;
  double chi = 0.0;
};

/// Eigenvalues below kZeroEigenTolerance * lambda_max count as zero.
inline constexpr double kZeroEigenTolerance = 1e-9;

SpectralSummary spectral_summary(const Laplacian& w);

/// Symmetric PSD square root via the spectral decomposition.
Eigen::MatrixXd sqrt_laplacian(const Laplacian& w);

/// Moore-Penrose pseudo-inverse of sqrt_laplacian(w).
Eigen::MatrixXd sqrt_laplacian_pinv(const Laplacian& w);

/// sqrt(x^T (W ⊗ I_n) x) = ||sqrt(W) x||_2. Throws std::invalid_argument
/// unless x has size()*n entries.
double consensus_residual(const Eigen::VectorXd& x, const Laplacian& w, std::size_t n);

/// Same quantity from the edge list: sum over edges of ||x_i - x_j||^2.
double consensus_residual(const Eigen::VectorXd& x, const Topology& t, std::size_t n);

/// Topology together with its Laplacian and spectrum, computed once.
struct CommunicationGraph {
  explicit CommunicationGraph(Topology topo);

  Topology topology;
  Laplacian laplacian;
  SpectralSummary spectrum;

  std::size_t agent_count() const { return topology.node_count(); }
};

}  // namespace dualopt
