#include "dualopt/instances.hpp"

#include <random>
#include <stdexcept>

namespace dualopt {

namespace {

Eigen::MatrixXd uniform_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                               double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = d(rng);
  return a;
}

Eigen::MatrixXd normal_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = d(rng);
  return a;
}

void require_sizes(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw std::invalid_argument("instance needs m > 0 and n > 0");
}

}  // namespace

SeparableObjective make_quadratic_instance(std::size_t m, std::size_t n, double scale_min,
                                           double scale_max, std::uint64_t seed,
                                           ScalePattern pattern) {
  require_sizes(m, n);
  if (!(scale_min > 0.0) || scale_max < scale_min) {
    throw std::invalid_argument("quadratic instance: need 0 < scale_min <= scale_max");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(scale_min, scale_max);
  std::vector<AgentPtr> agents;
  for (std::size_t i = 0; i < m; ++i) {
    double s = scale_min;
    if (pattern == ScalePattern::kAlternating) {
      s = i % 2 == 0 ? scale_min : scale_max;
    } else if (scale_min != scale_max) {
      s = scale(rng);
    }
    agents.push_back(make_quadratic(uniform_matrix(rng, static_cast<Eigen::Index>(n), 1, -1, 1), s));
  }
  return SeparableObjective(std::move(agents));
}

SeparableObjective make_ridge_instance(std::size_t m, std::size_t n, std::size_t l, double c,
                                       std::uint64_t seed) {
  require_sizes(m, n);
  if (l == 0) throw std::invalid_argument("ridge instance needs l > 0");
  std::mt19937_64 rng(seed);
  const auto nn = static_cast<Eigen::Index>(n);
  const auto ll = static_cast<Eigen::Index>(l);
  const Eigen::VectorXd x_true = normal_matrix(rng, nn, 1);
  std::vector<AgentPtr> agents;
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::MatrixXd H = normal_matrix(rng, ll, nn);
    Eigen::VectorXd b = H * x_true + 0.1 * Eigen::VectorXd(normal_matrix(rng, ll, 1));
    agents.push_back(make_ridge(H, b, m, l, c));
  }
  return SeparableObjective(std::move(agents));
}

SeparableObjective make_entropy_instance(std::size_t m, std::size_t n, std::uint64_t seed,
                                         std::optional<double> spread) {
  require_sizes(m, n);
  if (spread && !(*spread > 0.0 && *spread < 1.0)) {
    throw std::invalid_argument("entropy instance: spread must lie in (0,1)");
  }
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> g(1.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<AgentPtr> agents;
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::VectorXd q(static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < q.size(); ++j) q(j) = spread ? 1.0 + *spread * u(rng) : g(rng) + 1e-3;
    agents.push_back(make_entropy(q / q.sum()));
  }
  return SeparableObjective(std::move(agents));
}

SeparableObjective make_logistic_instance(std::size_t m, std::size_t n, std::size_t l, double c,
                                          std::uint64_t seed) {
  require_sizes(m, n);
  if (l == 0) throw std::invalid_argument("logistic instance needs l > 0");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(0.1);
  const auto nn = static_cast<Eigen::Index>(n);
  const auto ll = static_cast<Eigen::Index>(l);
  const Eigen::VectorXd x_true = uniform_matrix(rng, nn, 1, -1, 1);
  std::vector<AgentPtr> agents;
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::MatrixXd A = uniform_matrix(rng, ll, nn, -1, 1);
    Eigen::VectorXd y(ll);
    for (Eigen::Index j = 0; j < ll; ++j) {
      const double s = A.row(j).dot(x_true) >= 0.0 ? 1.0 : -1.0;
      y(j) = flip(rng) ? -s : s;
    }
    agents.push_back(make_logistic(A, y, m, l, c));
  }
  return SeparableObjective(std::move(agents));
}

SeparableObjective make_logistic_instance(const std::vector<DataShard>& shards, double c) {
  std::vector<AgentPtr> agents;
  for (const auto& sh : shards) {
    agents.push_back(make_logistic(sh.A, sh.y, shards.size(),
                                   static_cast<std::size_t>(sh.A.rows()), c));
  }
  return SeparableObjective(std::move(agents));
}

}  // namespace dualopt
