#include "dualopt/fgm.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "dualopt/errors.hpp"

namespace dualopt {

double initial_alpha(double q) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw std::invalid_argument(fmt::format("q must lie in [0,1), got {}", q));
  }
  return (-1.0 + std::sqrt(5.0 + 4.0 * q)) / 2.0;
}

AlphaStep alpha_step(double alpha_k, double q) {
  // a^2 + b a - c = 0 with b = alpha_k^2 - q, c = alpha_k^2; pick the
  // cancellation-free form of the positive root.
  const double c = alpha_k * alpha_k;
  const double b = c - q;
  const double disc = std::sqrt(b * b + 4.0 * c);
  const double next = b > 0.0 ? 2.0 * c / (b + disc) : (-b + disc) / 2.0;
  return {next, alpha_k * (1.0 - alpha_k) / (c + next)};
}

namespace {

void check_finite(const Eigen::VectorXd& g, std::size_t k) {
  if (!g.allFinite()) {
    throw NumericalError(fmt::format("non-finite gradient at FGM iteration {}", k));
  }
}

}  // namespace

double fgm_step(FgmState& state, const GradientOracle& grad, const FgmParams& params) {
  const Eigen::VectorXd g = grad(state.y_tilde);
  check_finite(g, state.k);
  Eigen::VectorXd x_next = state.y_tilde - params.step * g;
  const AlphaStep s = alpha_step(state.alpha, params.q);
  state.y_tilde = x_next + s.beta * (x_next - state.x);
  state.x = std::move(x_next);
  state.alpha = s.alpha_next;
  ++state.k;
  return g.norm();
}

FgmResult fgm_minimize(const GradientOracle& grad, const FgmParams& params,
                       const Eigen::VectorXd& x0, const FgmStop& stop, bool record_trajectory) {
  if (!(params.step > 0.0)) throw std::invalid_argument("FGM step must be positive");
  FgmState st{x0, x0, params.alpha0, 0};
  FgmResult res;
  if (record_trajectory) res.trajectory.push_back(x0);
  while (st.k < stop.max_iters) {
    const Eigen::VectorXd g = grad(st.y_tilde);
    check_finite(g, st.k);
    res.last_grad_norm = g.norm();
    if (stop.grad_tol && res.last_grad_norm <= *stop.grad_tol) {
      res.x = st.y_tilde;
      res.iterations = st.k;
      res.converged = true;
      return res;
    }
    Eigen::VectorXd x_next = st.y_tilde - params.step * g;
    const AlphaStep s = alpha_step(st.alpha, params.q);
    st.y_tilde = x_next + s.beta * (x_next - st.x);
    st.x = std::move(x_next);
    st.alpha = s.alpha_next;
    ++st.k;
    if (record_trajectory) res.trajectory.push_back(st.x);
  }
  res.x = st.x;
  res.iterations = st.k;
  res.converged = !stop.grad_tol.has_value();
  return res;
}

}  // namespace dualopt
