#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "dualopt/errors.hpp"
#include "dualopt/instances.hpp"
#include "dualopt/problems.hpp"
#include "oracles.hpp"

namespace dualopt {
namespace {

using testing::central_difference;

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(r, c);
  for (auto& x : a.reshaped()) x = g(rng);
  return a;
}

TEST(Quadratic, ConjugateExamples) {
  EXPECT_EQ(make_quadratic(vec({0.0}), 1.0)->conjugate_argmax(vec({0.0})), vec({0.0}));
  EXPECT_TRUE(make_quadratic(vec({1, 2}), 1.0)->conjugate_argmax(vec({0, 0})).isApprox(vec({1, 2})));
  EXPECT_NEAR(make_quadratic(vec({0.0}), 2.0)->conjugate_argmax(vec({4.0}))(0), 2.0, 1e-15);
  const AgentPtr f = make_quadratic(vec({1, -1}), 3.0);
  EXPECT_DOUBLE_EQ(f->mu(), 3.0);
  EXPECT_DOUBLE_EQ(f->L(), 3.0);
  EXPECT_NEAR(f->value(vec({1, -1})), 0.0, 1e-15);
  EXPECT_THROW(make_quadratic(vec({0.0}), 0.0), std::invalid_argument);
}

TEST(Quadratic, SingularMatrixHasMinimumNormMinimizer) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(2, 2);
  Q(0, 0) = 2.0;
  const AgentPtr f = make_quadratic(Q, vec({2.0, 0.0}));
  EXPECT_FALSE(f->has_conjugate());
  EXPECT_DOUBLE_EQ(f->mu(), 0.0);
  EXPECT_THROW(f->conjugate_argmax(vec({0, 0})), SingularSystemError);
  EXPECT_TRUE(local_minimizer(*f).isApprox(vec({1.0, 0.0})));
}

TEST(Ridge, ToyInstance) {
  Eigen::MatrixXd H(1, 1);
  H << 1.0;
  const AgentPtr f = make_ridge(H, vec({2.0}), 1, 1, 1.0);
  EXPECT_NEAR(f->conjugate_argmax(vec({0.0}))(0), 1.0, 1e-14);
  EXPECT_NEAR(f->gradient(vec({1.0}))(0), 0.0, 1e-14);
  EXPECT_NEAR(f->value(vec({1.0})), 1.0, 1e-14);
  EXPECT_NEAR(local_minimizer(*f)(0), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(f->mu(), 2.0);
  EXPECT_DOUBLE_EQ(f->L(), 2.0);
}

TEST(Ridge, ConjugateInvertsGradientOnRandomInstance) {
  std::mt19937_64 rng(3);
  const AgentPtr f = make_ridge(random_matrix(rng, 3, 2), random_vector(rng, 3), 4, 3, 0.5);
  for (int t = 0; t < 10; ++t) {
    const Eigen::VectorXd z = random_vector(rng, 2);
    EXPECT_LT((f->gradient(f->conjugate_argmax(z)) - z).norm(), 1e-8);
  }
}

TEST(Ridge, LargeRegularizerPullsToZero) {
  std::mt19937_64 rng(4);
  const AgentPtr f = make_ridge(random_matrix(rng, 3, 2), random_vector(rng, 3), 1, 3, 1e9);
  EXPECT_LT(f->conjugate_argmax(Eigen::VectorXd::Zero(2)).norm(), 1e-8);
}

TEST(Ridge, RankDeficientWithoutRegularizerIsSingular) {
  std::mt19937_64 rng(5);
  const AgentPtr f = make_ridge(random_matrix(rng, 2, 4), random_vector(rng, 2), 1, 2, 0.0);
  EXPECT_FALSE(f->has_conjugate());
  EXPECT_THROW(f->conjugate_argmax(Eigen::VectorXd::Zero(4)), SingularSystemError);
}

TEST(Entropy, SoftmaxExamples) {
  const AgentPtr u = make_entropy(Eigen::VectorXd::Constant(4, 0.25));
  EXPECT_TRUE(u->conjugate_argmax(Eigen::VectorXd::Zero(4)).isApprox(Eigen::VectorXd::Constant(4, 0.25)));

  const AgentPtr f = make_entropy(vec({0.5, 0.5}));
  const Eigen::VectorXd z = vec({std::log(3.0), 0.0});
  const Eigen::VectorXd x = f->conjugate_argmax(z);
  EXPECT_NEAR(x(0), 0.75, 1e-15);
  EXPECT_NEAR(x(1), 0.25, 1e-15);
  EXPECT_NEAR(z.dot(x) - f->value(x), testing::simplex_grid_max(*f, z, 20000), 1e-4);

  const Eigen::VectorXd shifted = f->conjugate_argmax(z.array() + 123.0);
  EXPECT_LT((shifted - x).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Entropy, SoftmaxSurvivesLargeInputs) {
  const AgentPtr f = make_entropy(vec({0.2, 0.3, 0.5}));
  const Eigen::VectorXd x = f->conjugate_argmax(vec({1000.0, 999.0, -1000.0}));
  EXPECT_TRUE(x.allFinite());
  EXPECT_NEAR(x.sum(), 1.0, 1e-15);
  EXPECT_EQ(x(2), 0.0);
}

TEST(Entropy, RejectsInvalidDistribution) {
  EXPECT_THROW(make_entropy(vec({0.5, 0.6})), std::invalid_argument);
  EXPECT_THROW(make_entropy(vec({1.0, 0.0})), std::invalid_argument);
  EXPECT_THROW(make_entropy(vec({0.5, 0.5}), 0.0), std::invalid_argument);
}

TEST(Entropy, LocalMinimizerIsQ) {
  const Eigen::VectorXd q = vec({0.1, 0.6, 0.3});
  EXPECT_LT((local_minimizer(*make_entropy(q)) - q).norm(), 1e-15);
  EXPECT_NEAR(make_entropy(q)->value(q), 0.0, 1e-15);
}

TEST(Entropy, RegularizedConjugateSatisfiesKkt) {
  std::mt19937_64 rng(9);
  const Eigen::VectorXd q = vec({0.1, 0.2, 0.3, 0.4});
  const auto f = std::dynamic_pointer_cast<const EntropyObjective>(make_entropy(q));
  const Eigen::VectorXd center = vec({0.25, 0.25, 0.25, 0.25});
  for (double c : {1e-6, 0.1, 1.0, 50.0, 1e4}) {
    for (int t = 0; t < 5; ++t) {
      const Eigen::VectorXd z = random_vector(rng, 4, 3.0);
      const Eigen::VectorXd x = f->regularized_conjugate_argmax(z, c, center);
      EXPECT_NEAR(x.sum(), 1.0, 1e-12);
      EXPECT_GT(x.minCoeff(), 0.0);
      // z_j - log(x_j/q_j) - 1 - c (x_j - center_j) is the same for every j
      const Eigen::ArrayXd nu =
          z.array() - (x.array() / q.array()).log() - 1.0 - c * (x - center).array();
      EXPECT_LT(nu.maxCoeff() - nu.minCoeff(), 1e-8 * (1.0 + c)) << "c " << c;
    }
  }
}

TEST(Logistic, ValueAndGradientAtZero) {
  std::mt19937_64 rng(2);
  const std::size_t m = 3, l = 5;
  const Eigen::MatrixXd A = random_matrix(rng, l, 2);
  const Eigen::VectorXd y = vec({1, -1, 1, 1, -1});
  const AgentPtr f = make_logistic(A, y, m, l, 0.3);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  EXPECT_NEAR(f->value(zero), std::log(2.0) / (2.0 * m), 1e-15);
  const Eigen::VectorXd expected = -(A.transpose() * (y / 2.0)) / (2.0 * m * l);
  EXPECT_LT((f->gradient(zero) - expected).norm(), 1e-15);
  const Eigen::VectorXd fd =
      central_difference([&](const Eigen::VectorXd& x) { return f->value(x); }, zero, 1e-6);
  EXPECT_LT((f->gradient(zero) - fd).norm(), 1e-9);
  EXPECT_FALSE(f->has_conjugate());
  EXPECT_THROW(f->conjugate_argmax(zero), MissingOracleError);
  EXPECT_DOUBLE_EQ(f->mu(), 0.1);
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  const SeparableObjective p = make_logistic_instance(3, 4, 20, 0.2, 77);
  for (std::size_t i = 0; i < p.agent_count(); ++i) {
    const AgentObjective& f = p.agent(i);
    const Eigen::VectorXd x = random_vector(rng, 4, 2.0);
    const Eigen::VectorXd fd =
        central_difference([&](const Eigen::VectorXd& v) { return f.value(v); }, x, 1e-5);
    EXPECT_LT((f.gradient(x) - fd).norm(), 1e-5 * (1e-3 + f.gradient(x).norm()));
  }
}

TEST(Logistic, ExtremeMarginsStayFinite) {
  Eigen::MatrixXd A(2, 1);
  A << 1.0, -1.0;
  const AgentPtr f = make_logistic(A, vec({1.0, 1.0}), 1, 2, 0.0);
  for (double x : {-1e4, 1e4}) {
    EXPECT_TRUE(std::isfinite(f->value(vec({x}))));
    EXPECT_TRUE(f->gradient(vec({x})).allFinite());
  }
  EXPECT_THROW(local_minimizer(*f), std::invalid_argument);
}

TEST(Regularize, Examples) {
  const AgentPtr base = make_quadratic(vec({0.0, 0.0}), 1.0);
  const auto r = regularize(base, 1.0, Eigen::VectorXd::Zero(2));
  EXPECT_TRUE(r->conjugate_argmax(vec({2.0, -4.0})).isApprox(vec({1.0, -2.0})));
  EXPECT_DOUBLE_EQ(r->mu(), 2.0);
  EXPECT_DOUBLE_EQ(r->L(), 2.0);
  const Eigen::VectorXd center = vec({0.3, 0.7});
  const auto r2 = regularize(base, 5.0, center);
  EXPECT_DOUBLE_EQ(r2->value(center), base->value(center));
  EXPECT_THROW(regularize(base, 0.0, center), std::invalid_argument);
}

TEST(Regularize, LogisticHasNoConjugateButHasMinimizer) {
  const SeparableObjective p = make_logistic_instance(2, 3, 10, 0.0, 4);
  const auto r = regularize(p.agent_ptr(0), 0.5, Eigen::VectorXd::Zero(3));
  EXPECT_FALSE(r->has_conjugate());
  const Eigen::VectorXd x = local_minimizer(*r, 1e-11);
  EXPECT_LE(r->gradient(x).norm(), 1e-11);
}

TEST(LocalMinimizer, Quadratic) {
  EXPECT_TRUE(local_minimizer(*make_quadratic(vec({1, 2}), 1.0)).isApprox(vec({1, 2})));
}

TEST(LocalMinimizer, LogisticByFgm) {
  const SeparableObjective p = make_logistic_instance(2, 3, 10, 0.5, 4);
  const Eigen::VectorXd x = local_minimizer(p.agent(1), 1e-10);
  EXPECT_LE(p.agent(1).gradient(x).norm(), 1e-10);
}

TEST(Separable, ConstantsFromAgents) {
  const SeparableObjective p({make_quadratic(vec({0.0}), 1.0), make_quadratic(vec({1.0}), 3.0),
                              make_quadratic(vec({2.0}), 2.0)});
  EXPECT_DOUBLE_EQ(p.mu(), 1.0);
  EXPECT_DOUBLE_EQ(p.L(), 3.0);
  EXPECT_DOUBLE_EQ(p.mu_sum(), 6.0);
  EXPECT_TRUE(p.dual_friendly());
  EXPECT_TRUE(std::isinf(p.M()));
  EXPECT_NEAR(p.value(vec({0, 1, 2})), 0.0, 1e-15);
  EXPECT_THROW(SeparableObjective({make_quadratic(vec({0.0}), 1.0),
                                   make_quadratic(vec({0.0, 1.0}), 1.0)}),
               std::invalid_argument);
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

TEST(Dataset, BalancedShards) {
  std::string ten;
  for (int r = 0; r < 10; ++r) ten += std::to_string(r) + ",0.5," + (r % 2 ? "1" : "-1") + "\n";
  const auto shards = load_csv_dataset(write_temp("ten.csv", ten), 3);
  ASSERT_EQ(shards.size(), 3u);
  EXPECT_EQ(shards[0].A.rows(), 4);
  EXPECT_EQ(shards[1].A.rows(), 3);
  EXPECT_EQ(shards[2].A.rows(), 3);
  EXPECT_EQ(shards[0].A.cols(), 2);
  EXPECT_EQ(shards[1].A(0, 0), 4.0);
  EXPECT_EQ(shards[2].y(2), 1.0);

  const auto four = load_csv_dataset(write_temp("four.csv", "1,1\n2,-1\n3,1\n4,-1\n"), 4);
  for (const auto& s : four) EXPECT_EQ(s.A.rows(), 1);
}

TEST(Dataset, Errors) {
  EXPECT_THROW(load_csv_dataset(write_temp("two.csv", "1,1\n2,-1\n"), 3), std::invalid_argument);
  EXPECT_THROW(load_csv_dataset(write_temp("label.csv", "1,1\n2,0\n"), 1), std::invalid_argument);
  EXPECT_THROW(load_csv_dataset(::testing::TempDir() + "missing/none.csv", 1), std::runtime_error);
  EXPECT_THROW(load_csv_dataset(write_temp("text.csv", "a,1\n"), 1), std::runtime_error);
}

std::vector<AgentPtr> smooth_agents(std::mt19937_64& rng) {
  std::vector<AgentPtr> out;
  for (int t = 0; t < 4; ++t) {
    const Eigen::Index n = 1 + t;
    const Eigen::MatrixXd G = random_matrix(rng, n, n);
    out.push_back(make_quadratic(G * G.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n),
                                 random_vector(rng, n), 0.3));
    out.push_back(make_ridge(random_matrix(rng, n + 2, n), random_vector(rng, n + 2), 3, n + 2, 0.2));
    out.push_back(make_ridge(random_matrix(rng, 2, n + 2), random_vector(rng, 2), 3, 2, 0.2));
    out.push_back(make_logistic(random_matrix(rng, 6, n), vec({1, -1, 1, -1, 1, 1}), 2, 6, 0.4));
    out.push_back(regularize(out.back(), 0.7, random_vector(rng, n)));
    out.push_back(regularize(out[out.size() - 4], 0.3, random_vector(rng, n)));
  }
  return out;
}

TEST(ProblemsProperties, ConjugateFirstOrderConditions) {
  std::mt19937_64 rng(100);
  for (const AgentPtr& f : smooth_agents(rng)) {
    if (!f->has_conjugate()) continue;
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd z = random_vector(rng, static_cast<Eigen::Index>(f->dim()), 2.0);
      const Eigen::VectorXd x = f->conjugate_argmax(z);
      ASSERT_LT((f->gradient(x) - z).norm(), 1e-8) << f->kind();
    }
  }
}

TEST(ProblemsProperties, SimplexConjugateMatchesGridSearch) {
  std::mt19937_64 rng(101);
  for (std::size_t n : {2u, 3u}) {
    for (int inst = 0; inst < 4; ++inst) {
      const SeparableObjective p = make_entropy_instance(1, n, 500 + inst);
      const AgentObjective& f = p.agent(0);
      for (int t = 0; t < 100; ++t) {
        const Eigen::VectorXd z = random_vector(rng, static_cast<Eigen::Index>(n));
        const Eigen::VectorXd x = f.conjugate_argmax(z);
        ASSERT_GE(x.minCoeff(), 0.0);
        ASSERT_NEAR(x.sum(), 1.0, 1e-12);
        const double best = testing::simplex_grid_max(f, z, n == 2 ? 4000 : 400);
        ASSERT_GE(z.dot(x) - f.value(x), best - 1e-12);
        ASSERT_LE(z.dot(x) - f.value(x), best + (n == 2 ? 1e-4 : 1e-3));
      }
    }
  }
}

TEST(ProblemsProperties, ConstantsConsistency) {
  std::mt19937_64 rng(102);
  for (const AgentPtr& f : smooth_agents(rng)) {
    const auto n = static_cast<Eigen::Index>(f->dim());
    for (int t = 0; t < 50; ++t) {
      const Eigen::VectorXd x = random_vector(rng, n, 3.0);
      const Eigen::VectorXd y = random_vector(rng, n, 3.0);
      const double d2 = (x - y).squaredNorm();
      const double slack = 1e-10 * (1.0 + std::abs(f->value(y)));
      ASSERT_GE(f->value(y), f->value(x) + f->gradient(x).dot(y - x) + 0.5 * f->mu() * d2 - slack)
          << f->kind();
      ASSERT_LE((f->gradient(x) - f->gradient(y)).norm(), f->L() * std::sqrt(d2) * (1 + 1e-10))
          << f->kind();
    }
  }
}

TEST(ProblemsProperties, GradientFiniteDifferences) {
  std::mt19937_64 rng(103);
  for (const AgentPtr& f : smooth_agents(rng)) {
    const Eigen::VectorXd x = random_vector(rng, static_cast<Eigen::Index>(f->dim()));
    const Eigen::VectorXd fd =
        central_difference([&](const Eigen::VectorXd& v) { return f->value(v); }, x, 1e-5);
    ASSERT_LT((f->gradient(x) - fd).norm(), 1e-5 * (1.0 + f->gradient(x).norm())) << f->kind();
  }
}

TEST(ProblemsProperties, RegularizeAddsExactly) {
  std::mt19937_64 rng(104);
  for (const AgentPtr& base : smooth_agents(rng)) {
    const auto n = static_cast<Eigen::Index>(base->dim());
    const Eigen::VectorXd center = random_vector(rng, n);
    const double c = 0.1 + std::uniform_real_distribution<double>(0, 5)(rng);
    const auto r = regularize(base, c, center);
    EXPECT_DOUBLE_EQ(r->mu(), base->mu() + c);
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd x = random_vector(rng, n, 2.0);
      const double expected = base->value(x) + 0.5 * c * (x - center).squaredNorm();
      ASSERT_NEAR(r->value(x), expected, 1e-12 * std::abs(expected));
    }
  }
}

}  // namespace
}  // namespace dualopt
