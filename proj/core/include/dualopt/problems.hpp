#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dualopt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Domain { kEuclidean, kSimplex };

/// One agent's local objective f_i together with its constants.
///
/// conjugate_argmax(z) = argmax_x <z,x> - f_i(x) over the domain. Objectives
/// without a cheap conjugate report has_conjugate() == false and throw
/// MissingOracleError when asked.
class AgentObjective {
 public:
  virtual ~AgentObjective() = default;

  virtual std::size_t dim() const = 0;
  virtual double mu() const = 0;
  virtual double L() const = 0;
  virtual double M() const { return kInf; }
  virtual Domain domain() const { return Domain::kEuclidean; }
  virtual std::string_view kind() const = 0;

  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;

  /// Gradient projected onto the tangent space of the domain (the plain
  /// gradient on R^n, the gradient minus its mean on the simplex).
  virtual Eigen::VectorXd tangent_gradient(const Eigen::VectorXd& x) const;

  virtual bool has_conjugate() const { return false; }
  virtual Eigen::VectorXd conjugate_argmax(const Eigen::VectorXd& z) const;

  /// argmax_x <z,x> - f_i(x) - (c/2)||x - center||^2.
  virtual bool has_regularized_conjugate() const { return false; }
  virtual Eigen::VectorXd regularized_conjugate_argmax(const Eigen::VectorXd& z, double c,
                                                       const Eigen::VectorXd& center) const;

  /// A minimizer available without iteration (e.g. the minimum-norm
  /// minimizer of a singular quadratic), if any.
  virtual std::optional<Eigen::VectorXd> closed_form_minimizer() const { return std::nullopt; }
};

using AgentPtr = std::shared_ptr<const AgentObjective>;

/// f(x) = 1/2 x^T Q x - p^T x + r with Q symmetric PSD.
class QuadraticObjective : public AgentObjective {
 public:
  QuadraticObjective(Eigen::MatrixXd Q, Eigen::VectorXd p, double r, std::string kind = "quadratic");

  std::size_t dim() const override { return static_cast<std::size_t>(p_.size()); }
  double mu() const override { return mu_; }
  double L() const override { return L_; }
  std::string_view kind() const override { return kind_; }

  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;

  bool has_conjugate() const override { return mu_ > 0.0; }
  Eigen::VectorXd conjugate_argmax(const Eigen::VectorXd& z) const override;
  bool has_regularized_conjugate() const override { return true; }
  Eigen::VectorXd regularized_conjugate_argmax(const Eigen::VectorXd& z, double c,
                                               const Eigen::VectorXd& center) const override;
  std::optional<Eigen::VectorXd> closed_form_minimizer() const override;

  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::VectorXd& p() const { return p_; }
  double r() const { return r_; }

 private:
  // (Q + shift I)^+ v through the cached eigendecomposition.
  Eigen::VectorXd shifted_solve(const Eigen::VectorXd& v, double shift) const;

  Eigen::MatrixXd Q_;
  Eigen::VectorXd p_;
  double r_;
  std::string kind_;
  Eigen::MatrixXd V_;
  Eigen::VectorXd evals_;
  double mu_ = 0.0;
  double L_ = 0.0;
};

/// f(x) = sum_j x_j log(x_j / q_j) on the unit simplex.
class EntropyObjective : public AgentObjective {
 public:
  explicit EntropyObjective(Eigen::VectorXd q, double mu = 1.0);

  std::size_t dim() const override { return static_cast<std::size_t>(q_.size()); }
  double mu() const override { return mu_; }
  double L() const override { return kInf; }
  Domain domain() const override { return Domain::kSimplex; }
  std::string_view kind() const override { return "entropy"; }

  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;

  bool has_conjugate() const override { return true; }
  Eigen::VectorXd conjugate_argmax(const Eigen::VectorXd& z) const override;
  bool has_regularized_conjugate() const override { return true; }
  Eigen::VectorXd regularized_conjugate_argmax(const Eigen::VectorXd& z, double c,
                                               const Eigen::VectorXd& center) const override;

  const Eigen::VectorXd& q() const { return q_; }

 private:
  Eigen::VectorXd q_;
  Eigen::VectorXd log_q_;
  double mu_;
};

/// f(x) = 1/(2ml) sum_j log(1 + exp(-y_j a_j^T x)) + c/(2m) ||x||^2.
class LogisticObjective : public AgentObjective {
 public:
  LogisticObjective(Eigen::MatrixXd A, Eigen::VectorXd y, std::size_t m, std::size_t l, double c);

  std::size_t dim() const override { return static_cast<std::size_t>(A_.cols()); }
  double mu() const override { return c_ / m_; }
  double L() const override { return L_; }
  std::string_view kind() const override { return "logistic"; }

  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd y_;
  double m_;
  double l_;
  double c_;
  double L_;
};

/// base(x) + (c/2)||x - center||^2.
class RegularizedObjective : public AgentObjective {
 public:
  RegularizedObjective(AgentPtr base, double c, Eigen::VectorXd center);

  std::size_t dim() const override { return base_->dim(); }
  double mu() const override { return base_->mu() + c_; }
  double L() const override { return base_->L() + c_; }
  double M() const override { return base_->M(); }
  Domain domain() const override { return base_->domain(); }
  std::string_view kind() const override { return "regularized"; }

  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd tangent_gradient(const Eigen::VectorXd& x) const override;

  bool has_conjugate() const override { return base_->has_regularized_conjugate(); }
  Eigen::VectorXd conjugate_argmax(const Eigen::VectorXd& z) const override;

  const AgentObjective& base() const { return *base_; }
  double modulus() const { return c_; }
  const Eigen::VectorXd& center() const { return center_; }

 private:
  AgentPtr base_;
  double c_;
  Eigen::VectorXd center_;
};

AgentPtr make_quadratic(const Eigen::VectorXd& c, double scale);
AgentPtr make_quadratic(Eigen::MatrixXd Q, Eigen::VectorXd p, double r = 0.0);
AgentPtr make_ridge(const Eigen::MatrixXd& H, const Eigen::VectorXd& b, std::size_t m,
                    std::size_t l, double c);
AgentPtr make_entropy(const Eigen::VectorXd& q, double mu = 1.0);
AgentPtr make_logistic(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, std::size_t m,
                       std::size_t l, double c);
std::shared_ptr<const RegularizedObjective> regularize(AgentPtr base, double c,
                                                       const Eigen::VectorXd& center);

/// Closed form when available, otherwise FGM to ||grad|| <= tol (or simplex
/// KKT residual <= tol). Throws std::invalid_argument for agents that are
/// neither strongly convex nor closed-form solvable.
Eigen::VectorXd local_minimizer(const AgentObjective& agent, double tol = 1e-10);

/// F(x) = sum_i f_i(x_i) over a stacked vector of m blocks of size n.
class SeparableObjective {
 public:
  explicit SeparableObjective(std::vector<AgentPtr> agents);

  std::size_t agent_count() const { return agents_.size(); }
  std::size_t dim() const { return n_; }
  const AgentObjective& agent(std::size_t i) const { return *agents_.at(i); }
  const AgentPtr& agent_ptr(std::size_t i) const { return agents_.at(i); }
  const std::vector<AgentPtr>& agents() const { return agents_; }

  double mu() const { return mu_; }
  double L() const { return L_; }
  double M() const { return M_; }
  double mu_sum() const { return mu_sum_; }
  bool dual_friendly() const;
  bool uniform_kind(std::string_view kind) const;

  double value(const Eigen::VectorXd& stacked) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& stacked) const;
  Eigen::VectorXd tangent_gradient(const Eigen::VectorXd& stacked) const;

  /// The same point repeated for every agent.
  Eigen::VectorXd stack(const Eigen::VectorXd& x) const;

 private:
  std::vector<AgentPtr> agents_;
  std::size_t n_ = 0;
  double mu_ = 0.0;
  double L_ = 0.0;
  double M_ = 0.0;
  double mu_sum_ = 0.0;
};

struct DataShard {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
};

/// Reads comma-separated rows (features, then a +-1 label) and splits them
/// into m contiguous shards; the first rows % m shards get one extra row.
std::vector<DataShard> load_csv_dataset(const std::string& path, std::size_t m);

}  // namespace dualopt
