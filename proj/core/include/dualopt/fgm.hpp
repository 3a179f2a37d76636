#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dualopt {

/// Root in (0,1) of a^2 + a - (1 + q) = 0. Throws unless 0 <= q < 1.
double initial_alpha(double q);

struct AlphaStep {
  double alpha_next;
  double beta;
};

/// alpha_next solves a^2 = (1 - a) alpha_k^2 + q a on (0,1);
/// beta = alpha_k (1 - alpha_k) / (alpha_k^2 + alpha_next).
AlphaStep alpha_step(double alpha_k, double q);

struct FgmParams {
  double q = 0.0;
  double step = 1.0;
  double alpha0 = 0.0;

  static FgmParams from(double q, double step) { return {q, step, initial_alpha(q)}; }
};

/// Stateful alpha/beta sequence shared by every accelerated loop in the library.
class MomentumSchedule {
 public:
  explicit MomentumSchedule(double q) : q_(q), alpha_(initial_alpha(q)) {}
  MomentumSchedule(double q, double alpha0) : q_(q), alpha_(alpha0) {}

  double alpha() const { return alpha_; }
  double q() const { return q_; }

  /// Advances alpha_k -> alpha_{k+1} and returns beta_k.
  double advance() {
    const AlphaStep s = alpha_step(alpha_, q_);
    alpha_ = s.alpha_next;
    return s.beta;
  }

 private:
  double q_;
  double alpha_;
};

struct FgmState {
  Eigen::VectorXd x;
  Eigen::VectorXd y_tilde;
  double alpha = 0.0;
  std::size_t k = 0;
};

struct FgmStop {
  std::size_t max_iters = 1000;
  std::optional<double> grad_tol;
};

struct FgmResult {
  Eigen::VectorXd x;
  std::vector<Eigen::VectorXd> trajectory;  // x_0 .. x_K when recording
  std::size_t iterations = 0;
  bool converged = false;
  double last_grad_norm = 0.0;
};

using GradientOracle = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// One step from `state`; mutates it in place and returns ||grad(y_tilde_k)||.
double fgm_step(FgmState& state, const GradientOracle& grad, const FgmParams& params);

/// Constant Step Scheme II from x0. When grad_tol triggers, the returned x is
/// the extrapolated point whose gradient met the tolerance.
FgmResult fgm_minimize(const GradientOracle& grad, const FgmParams& params,
                       const Eigen::VectorXd& x0, const FgmStop& stop = {},
                       bool record_trajectory = false);

}  // namespace dualopt
