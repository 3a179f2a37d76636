#include "dualopt/certify.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "dualopt/errors.hpp"
#include "dualopt/fgm.hpp"

namespace dualopt {

namespace {

Eigen::VectorXd starting_point(const SeparableObjective& p) {
  const auto n = static_cast<Eigen::Index>(p.dim());
  if (p.agent(0).domain() == Domain::kSimplex) {
    return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  }
  return Eigen::VectorXd::Zero(n);
}

std::optional<Eigen::VectorXd> quadratic_optimum(const SeparableObjective& p) {
  const auto n = static_cast<Eigen::Index>(p.dim());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (const auto& a : p.agents()) {
    const auto* q = dynamic_cast<const QuadraticObjective*>(a.get());
    if (q == nullptr) return std::nullopt;
    Q += q->Q();
    b += q->p();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cut = 1e-12 * ev.maxCoeff();
  Eigen::VectorXd w = es.eigenvectors().transpose() * b;
  for (Eigen::Index k = 0; k < n; ++k) w(k) = ev(k) > cut ? w(k) / ev(k) : 0.0;
  return es.eigenvectors() * w;
}

std::optional<Eigen::VectorXd> entropy_optimum(const SeparableObjective& p) {
  const auto n = static_cast<Eigen::Index>(p.dim());
  Eigen::ArrayXd s = Eigen::ArrayXd::Zero(n);
  for (const auto& a : p.agents()) {
    const auto* e = dynamic_cast<const EntropyObjective*>(a.get());
    if (e == nullptr) return std::nullopt;
    s += e->q().array().log();
  }
  s /= static_cast<double>(p.agent_count());
  s -= s.maxCoeff();
  s = s.exp();
  return (s / s.sum()).matrix();
}

Eigen::VectorXd iterative_optimum(const SeparableObjective& p, double tol) {
  double L_sum = 0.0;
  for (const auto& a : p.agents()) {
    if (a->domain() != Domain::kEuclidean) {
      throw std::invalid_argument("reference_solve: mixed simplex problems are not supported");
    }
    L_sum += a->L();
  }
  if (!std::isfinite(L_sum)) throw std::invalid_argument("reference_solve: needs finite L_i");
  if (!(p.mu_sum() > 0.0)) {
    throw std::invalid_argument("reference_solve: sum of f_i must be strongly convex");
  }
  auto grad = [&p](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (const auto& a : p.agents()) g += a->gradient(x);
    return g;
  };
  const FgmParams params = FgmParams::from(std::min(p.mu_sum() / L_sum, 1.0 - 1e-12), 1.0 / L_sum);
  const FgmResult res = fgm_minimize(grad, params, starting_point(p), FgmStop{10'000'000, tol});
  if (!res.converged) {
    throw NumericalError(fmt::format(
        "reference_solve: gradient norm {} did not reach {}", res.last_grad_norm, tol));
  }
  return res.x;
}

}  // namespace

double default_reference_tolerance(const SeparableObjective& problem) {
  return 1e-12 * (1.0 + std::abs(problem.value(problem.stack(starting_point(problem)))));
}

ReferenceSolution reference_solve(const SeparableObjective& problem,
                                  const CommunicationGraph& graph, std::optional<double> tol) {
  if (graph.agent_count() != problem.agent_count()) {
    throw std::invalid_argument("reference_solve: graph and problem sizes differ");
  }
  const double t = tol.value_or(default_reference_tolerance(problem));
  ReferenceSolution ref;
  if (auto x = quadratic_optimum(problem)) {
    ref.x_star = *x;
  } else if (auto e = entropy_optimum(problem)) {
    ref.x_star = *e;
  } else {
    ref.x_star = iterative_optimum(problem, t);
  }

  const std::size_t m = problem.agent_count();
  const auto n = static_cast<Eigen::Index>(problem.dim());
  const auto mm = static_cast<Eigen::Index>(m);
  const Eigen::VectorXd xs = problem.stack(ref.x_star);
  ref.f_star = problem.value(xs);

  Eigen::VectorXd g = problem.tangent_gradient(xs);
  ref.gradient_norm = g.norm();
  Eigen::Map<const Eigen::MatrixXd> G(g.data(), n, mm);
  ref.optimality_residual = G.rowwise().sum().norm();

  const Eigen::MatrixXd S_pinv = sqrt_laplacian_pinv(graph.laplacian);
  ref.y_star.resize(g.size());
  Eigen::Map<Eigen::MatrixXd> Y(ref.y_star.data(), n, mm);
  Y.noalias() = G * S_pinv;
  ref.R = ref.y_star.norm();

  ref.local_minimizers.reserve(m);
  double rx2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    ref.local_minimizers.push_back(local_minimizer(problem.agent(i), 1e-10));
    rx2 += (ref.x_star - ref.local_minimizers.back()).squaredNorm();
  }
  ref.R_x = std::sqrt(rx2);
  ref.R_w = ref.R_x + xs.norm();
  return ref;
}

SolutionCertificate certificate(const SeparableObjective& problem, const Eigen::VectorXd& candidate,
                                const ReferenceSolution& ref, const Laplacian& w, double epsilon,
                                double epsilon_tilde) {
  const auto expected = static_cast<Eigen::Index>(problem.agent_count() * problem.dim());
  if (candidate.size() != expected) {
    throw std::invalid_argument(
        fmt::format("candidate has {} entries, expected {}", candidate.size(), expected));
  }
  SolutionCertificate c;
  c.primal_gap = problem.value(candidate) - ref.f_star;
  c.consensus_residual = consensus_residual(candidate, w, problem.dim());
  c.epsilon = epsilon;
  c.epsilon_tilde = epsilon_tilde;
  c.satisfied = c.primal_gap <= epsilon && c.consensus_residual <= epsilon_tilde;
  return c;
}

SolutionCertificate certificate(const SeparableObjective& problem, const Eigen::VectorXd& candidate,
                                const ReferenceSolution& ref, const Laplacian& w, double epsilon) {
  if (!(ref.R > 0.0)) {
    throw std::invalid_argument("R = 0: pass epsilon_tilde explicitly");
  }
  return certificate(problem, candidate, ref, w, epsilon, epsilon / ref.R);
}

BoundComparison compare_to_bound(const RunTrace& trace, std::size_t bound_N) {
  BoundComparison out;
  out.bound_N = bound_N;
  auto ok = [&](const TraceRow& r) {
    return r.primal_gap <= trace.epsilon && r.consensus_residual <= trace.epsilon_tilde;
  };
  for (std::size_t k = 0; k < trace.rows.size(); ++k) {
    if (ok(trace.rows[k])) {
      out.first_certified = k;
      out.rounds_to_certificate = trace.rows[k].comm_rounds;
      break;
    }
  }
  if (trace.rows.empty() || bound_N == 0) {
    out.violation = true;
  } else {
    const std::size_t at = std::min(bound_N, trace.rows.size()) - 1;
    out.violation = !ok(trace.rows[at]);
  }
  out.ratio = out.first_certified
                  ? static_cast<double>(*out.first_certified + 1) / static_cast<double>(bound_N)
                  : std::numeric_limits<double>::quiet_NaN();
  return out;
}

void apply_reference(AlgoConfig& config, const ReferenceSolution& ref) {
  if (!config.R) config.R = ref.R;
  if (!config.R_x) config.R_x = ref.R_x;
  if (!config.R_w) config.R_w = ref.R_w;
  if (!config.f_star) config.f_star = ref.f_star;
  if (!config.local_minimizers) config.local_minimizers = ref.local_minimizers;
}

double effective_M(const SeparableObjective& problem, const ReferenceSolution& ref) {
  return std::isfinite(problem.M()) ? problem.M() : ref.gradient_norm;
}

}  // namespace dualopt
