#include "dualopt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace dualopt {

GraphFamily parse_graph_family(std::string_view name) {
  if (name == "cycle") return GraphFamily::kCycle;
  if (name == "path") return GraphFamily::kPath;
  if (name == "star") return GraphFamily::kStar;
  if (name == "complete") return GraphFamily::kComplete;
  if (name == "erdos_renyi") return GraphFamily::kErdosRenyi;
  throw std::invalid_argument(fmt::format("unknown graph family '{}'", name));
}

std::string_view to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::kCycle: return "cycle";
    case GraphFamily::kPath: return "path";
    case GraphFamily::kStar: return "star";
    case GraphFamily::kComplete: return "complete";
    case GraphFamily::kErdosRenyi: return "erdos_renyi";
  }
  return "unknown";
}

bool is_connected(std::size_t node_count, const std::vector<Edge>& edges) {
  if (node_count == 0) return false;
  std::vector<std::vector<AgentId>> adj(node_count);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(node_count, 0);
  std::vector<AgentId> stack{0};
  seen[0] = 1;
  std::size_t visited = 1;
  while (!stack.empty()) {
    AgentId v = stack.back();
    stack.pop_back();
    for (AgentId u : adj[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++visited;
        stack.push_back(u);
      }
    }
  }
  return visited == node_count;
}

Topology::Topology(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count), adjacency_(node_count) {
  if (node_count == 0) throw std::invalid_argument("topology needs at least one node");
  for (auto& e : edges) {
    if (e.first >= node_count || e.second >= node_count) {
      throw std::invalid_argument(
          fmt::format("edge ({},{}) out of range for {} nodes", e.first, e.second, node_count));
    }
    if (e.first == e.second) {
      throw std::invalid_argument(fmt::format("self-loop at node {}", e.first));
    }
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end()) {
    throw std::invalid_argument(fmt::format("duplicate edge ({},{})", dup->first, dup->second));
  }
  if (!is_connected(node_count, edges)) {
    throw std::invalid_argument("graph is disconnected");
  }
  edges_ = std::move(edges);
  for (const auto& [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

bool Topology::adjacent(AgentId i, AgentId j) const {
  if (i >= node_count_ || j >= node_count_) return false;
  const auto& nb = adjacency_[i];
  return std::binary_search(nb.begin(), nb.end(), j);
}

namespace {

std::vector<Edge> erdos_renyi_edges(std::size_t m, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (AgentId i = 0; i < m; ++i) {
    for (AgentId j = i + 1; j < m; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

}  // namespace

Topology build_graph(GraphFamily kind, std::size_t m, std::optional<double> edge_prob,
                     std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument(fmt::format("graph needs m >= 2, got {}", m));
  std::vector<Edge> edges;
  switch (kind) {
    case GraphFamily::kCycle:
      for (AgentId i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
      if (m > 2) edges.emplace_back(0, m - 1);
      break;
    case GraphFamily::kPath:
      for (AgentId i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
      break;
    case GraphFamily::kStar:
      for (AgentId i = 1; i < m; ++i) edges.emplace_back(0, i);
      break;
    case GraphFamily::kComplete:
      for (AgentId i = 0; i < m; ++i)
        for (AgentId j = i + 1; j < m; ++j) edges.emplace_back(i, j);
      break;
    case GraphFamily::kErdosRenyi: {
      if (!edge_prob) throw std::invalid_argument("erdos_renyi requires edge_prob");
      const double p = *edge_prob;
      if (!(p > 0.0 && p <= 1.0)) {
        throw std::invalid_argument(fmt::format("edge_prob must lie in (0,1], got {}", p));
      }
      // Bounded so a tiny p on a large graph fails loudly instead of spinning.
      constexpr int kMaxAttempts = 100000;
      for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        edges = erdos_renyi_edges(m, p, seed + static_cast<std::uint64_t>(attempt));
        if (is_connected(m, edges)) return Topology(m, std::move(edges));
      }
      throw std::runtime_error(
          fmt::format("no connected Erdos-Renyi sample after {} attempts", kMaxAttempts));
    }
  }
  return Topology(m, std::move(edges));
}

Laplacian Laplacian::from_matrix(Eigen::MatrixXd w) {
  if (w.rows() != w.cols() || w.rows() == 0) {
    throw std::invalid_argument("Laplacian must be a non-empty square matrix");
  }
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("Laplacian must be symmetric");
  }
  if (w.rowwise().sum().cwiseAbs().maxCoeff() > 1e-12 * scale * static_cast<double>(w.rows())) {
    throw std::invalid_argument("Laplacian rows must sum to zero");
  }
  return Laplacian(std::move(w));
}

Laplacian::Laplacian(Eigen::MatrixXd w) : w_(std::move(w)) {
  for (Eigen::Index j = 0; j < w_.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      if (w_(i, j) != 0.0) off_diagonal_.push_back({i, j, -w_(i, j)});
}

double Laplacian::quadratic_form(const Eigen::VectorXd& x, std::size_t n) const {
  const auto nn = static_cast<Eigen::Index>(n);
  if (x.size() != w_.rows() * nn) {
    throw std::invalid_argument(
        fmt::format("stacked vector has {} entries, expected {}", x.size(), w_.rows() * nn));
  }
  double s = 0.0;
  for (const auto& e : off_diagonal_) {
    s += e.w * (x.segment(e.i * nn, nn) - x.segment(e.j * nn, nn)).squaredNorm();
  }
  return s;
}

Eigen::VectorXd Laplacian::apply(const Eigen::VectorXd& x, std::size_t n) const {
  const auto m = static_cast<Eigen::Index>(size());
  const auto nn = static_cast<Eigen::Index>(n);
  if (x.size() != m * nn) {
    throw std::invalid_argument(
        fmt::format("stacked vector has {} entries, expected {}", x.size(), m * nn));
  }
  Eigen::VectorXd out(x.size());
  Eigen::Map<const Eigen::MatrixXd> xm(x.data(), nn, m);
  Eigen::Map<Eigen::MatrixXd> om(out.data(), nn, m);
  om.noalias() = xm * w_;
  return out;
}

Laplacian laplacian(const Topology& t) {
  const auto m = static_cast<Eigen::Index>(t.node_count());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
  for (const auto& [a, b] : t.edges()) {
    const auto i = static_cast<Eigen::Index>(a);
    const auto j = static_cast<Eigen::Index>(b);
    w(i, j) = -1.0;
    w(j, i) = -1.0;
    w(i, i) += 1.0;
    w(j, j) += 1.0;
  }
  return Laplacian::from_matrix(std::move(w));
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(const Laplacian& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return es;
}

}  // namespace

SpectralSummary spectral_summary(const Laplacian& w) {
  const auto es = eig(w);
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  const double lmax = ev(ev.size() - 1);
  if (!(lmax > 0.0)) throw std::invalid_argument("Laplacian has no positive eigenvalue");
  const double cut = kZeroEigenTolerance * lmax;
  Eigen::Index zeros = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev(k) < cut) ++zeros;
  if (zeros > 1) {
    throw std::invalid_argument(
        fmt::format("Laplacian has {} zero eigenvalues; graph is disconnected", zeros));
  }
  SpectralSummary s;
  s.lambda_max = lmax;
  s.lambda_min_plus = ev(zeros);
  s.chi = s.lambda_max / s.lambda_min_plus;
  return s;
}

Eigen::MatrixXd sqrt_laplacian(const Laplacian& w) {
  const auto es = eig(w);
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd sqrt_laplacian_pinv(const Laplacian& w) {
  const auto es = eig(w);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cut = kZeroEigenTolerance * ev(ev.size() - 1);
  Eigen::VectorXd d(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) d(k) = ev(k) < cut ? 0.0 : 1.0 / std::sqrt(ev(k));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

double consensus_residual(const Eigen::VectorXd& x, const Laplacian& w, std::size_t n) {
  return std::sqrt(std::max(0.0, w.quadratic_form(x, n)));
}

double consensus_residual(const Eigen::VectorXd& x, const Topology& t, std::size_t n) {
  const auto nn = static_cast<Eigen::Index>(n);
  if (x.size() != static_cast<Eigen::Index>(t.node_count()) * nn) {
    throw std::invalid_argument("stacked vector dimension does not match topology");
  }
  double s = 0.0;
  for (const auto& [a, b] : t.edges()) {
    s += (x.segment(static_cast<Eigen::Index>(a) * nn, nn) -
          x.segment(static_cast<Eigen::Index>(b) * nn, nn))
             .squaredNorm();
  }
  return std::sqrt(s);
}

CommunicationGraph::CommunicationGraph(Topology topo)
    : topology(std::move(topo)), laplacian(dualopt::laplacian(topology)),
      spectrum(spectral_summary(laplacian)) {}

}  // namespace dualopt
