#include "dualopt/dualnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "dualopt/errors.hpp"
#include "dualopt/fgm.hpp"

namespace dualopt {

std::size_t TraceRow::oracle_calls_max() const {
  return oracle_calls.empty() ? 0 : *std::max_element(oracle_calls.begin(), oracle_calls.end());
}

namespace {

using Blocks = std::vector<Eigen::VectorXd>;
using Responder = std::function<void(const Blocks& z_tilde, Blocks& out, NetworkSim& sim)>;

struct Scheme {
  double q = 0.0;
  double step = 0.0;
  double dual_reg = 0.0;  // adds dual_reg * z_tilde_i to the neighbor sum
  Responder respond;
};

// Constants after applying config overrides.
struct Resolved {
  std::string_view name;
  double mu;
  double L;
  double M;
  double mu_sum;
  const SpectralSummary& spec;
  std::size_t m;
  std::size_t n;
  double eps;
};

Resolved resolve(const SeparableObjective& p, const CommunicationGraph& g, const AlgoConfig& c) {
  if (!(c.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (g.agent_count() != p.agent_count()) {
    throw std::invalid_argument(fmt::format("graph has {} nodes but the problem has {} agents",
                                            g.agent_count(), p.agent_count()));
  }
  return Resolved{to_string(c.variant),
                  c.mu.value_or(p.mu()),
                  c.L.value_or(p.L()),
                  c.M.value_or(p.M()),
                  p.mu_sum(),
                  g.spectrum,
                  p.agent_count(),
                  p.dim(),
                  c.epsilon};
}

BoundInputs bound_inputs(const Resolved& r, const AlgoConfig& c) {
  BoundInputs in;
  in.mu = r.mu;
  in.L = r.L;
  in.M = r.M;
  in.mu_sum = r.mu_sum;
  in.spectrum = r.spec;
  in.m = r.m;
  in.epsilon = r.eps;
  in.R = c.R;
  in.R_x = c.R_x;
  in.R_w = c.R_w;
  return in;
}

IterationBound resolve_bound(const Resolved& r, const AlgoConfig& c) {
  const bool needs_T = has_inner_loop(c.variant);
  IterationBound b;
  if (!c.N || (needs_T && !c.T)) b = iteration_bound(c.variant, bound_inputs(r, c));
  if (c.N) b.N = *c.N;
  if (needs_T && c.T) b.T = *c.T;
  if (!needs_T) b.T.reset();
  if (b.N == 0) throw std::invalid_argument("N must be at least 1");
  return b;
}

double positive(std::string_view name, std::string_view what, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(fmt::format("{} needs a positive finite {} (got {})", name, what, v));
  }
  return v;
}

double required(std::string_view name, std::string_view what, const std::optional<double>& v) {
  if (!v) throw std::invalid_argument(fmt::format("{} needs {}", name, what));
  return positive(name, what, *v);
}

void require_conjugates(const SeparableObjective& p, std::string_view name) {
  for (std::size_t i = 0; i < p.agent_count(); ++i) {
    if (!p.agent(i).has_conjugate()) {
      throw MissingOracleError(fmt::format("{} needs conjugate oracles; agent {} ({}) has none",
                                           name, i, p.agent(i).kind()));
    }
  }
}

void require_regularized_conjugates(const SeparableObjective& p, std::string_view name) {
  for (std::size_t i = 0; i < p.agent_count(); ++i) {
    if (!p.agent(i).has_regularized_conjugate()) {
      throw MissingOracleError(fmt::format(
          "{} needs regularized conjugate oracles; agent {} ({}) has none (use nofriend_smooth)",
          name, i, p.agent(i).kind()));
    }
  }
}

void require_euclidean(const SeparableObjective& p, std::string_view name) {
  for (std::size_t i = 0; i < p.agent_count(); ++i) {
    if (p.agent(i).domain() != Domain::kEuclidean) {
      throw std::invalid_argument(
          fmt::format("{} runs gradient steps on R^n; agent {} has a simplex domain", name, i));
    }
  }
}

Blocks local_minimizers(const SeparableObjective& p, const AlgoConfig& c) {
  if (c.local_minimizers) {
    if (c.local_minimizers->size() != p.agent_count()) {
      throw std::invalid_argument("local_minimizers must have one entry per agent");
    }
    return *c.local_minimizers;
  }
  Blocks out;
  out.reserve(p.agent_count());
  for (const auto& a : p.agents()) out.push_back(local_minimizer(*a, 1e-10));
  return out;
}

double epsilon_tilde(const AlgoConfig& c) {
  if (c.epsilon_tilde) return *c.epsilon_tilde;
  if (c.R && *c.R > 0.0) return c.epsilon / *c.R;
  return std::numeric_limits<double>::quiet_NaN();
}

// mu = L on a graph with chi = 1 gives q = 1 exactly; the limit is plain
// gradient steps (beta = 0), which the schedule reaches from just below.
double momentum_q(double q) { return std::min(q, 1.0 - 1e-12); }

std::vector<double> inner_betas(double q_tilde, std::size_t T) {
  MomentumSchedule s(momentum_q(q_tilde));
  std::vector<double> b(T);
  for (auto& x : b) x = s.advance();
  return b;
}

RunTrace outer_loop(const SeparableObjective& p, const CommunicationGraph& g, const AlgoConfig& c,
                    const IterationBound& bound, const Scheme& s, NetworkSim& sim,
                    const RunHooks& hooks) {
  const std::size_t m = p.agent_count();
  const auto n = static_cast<Eigen::Index>(p.dim());
  sim.reset();

  Blocks z(m, Eigen::VectorXd::Zero(n));
  Blocks zt = z;
  Blocks z_next = z;
  Blocks x(m);
  MomentumSchedule sched(momentum_q(s.q));

  RunTrace trace;
  trace.variant = c.variant;
  trace.epsilon = c.epsilon;
  trace.epsilon_tilde = epsilon_tilde(c);
  trace.N = bound.N;
  trace.T = bound.T;
  trace.rows.reserve(std::min<std::size_t>(bound.N, 1u << 16));
  const double f_star = c.f_star.value_or(std::numeric_limits<double>::quiet_NaN());
  Eigen::VectorXd stacked(static_cast<Eigen::Index>(m) * n);

  for (std::size_t k = 0; k < bound.N; ++k) {
    s.respond(zt, x, sim);
    const std::vector<Inbox> inbox = sim.exchange(x);
    double witness = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      Eigen::VectorXd grad = sim.weighted_neighbor_sum(i, x[i], inbox[i]);
      if (s.dual_reg != 0.0) grad += s.dual_reg * zt[i];
      z_next[i] = zt[i] - s.step * grad;
      witness += zt[i].dot(x[i]);
      stacked.segment(static_cast<Eigen::Index>(i) * n, n) = x[i];
    }

    TraceRow row;
    row.k = k;
    row.comm_rounds = sim.round_count();
    row.oracle_calls = sim.oracle_call_counts();
    row.objective = p.value(stacked);
    row.primal_gap = row.objective - f_star;
    row.consensus_residual = consensus_residual(stacked, g.laplacian, p.dim());
    row.dual_gap_witness = witness;
    if (c.record_candidates) row.candidate = stacked;
    trace.rows.push_back(std::move(row));

    if (hooks.on_iteration) hooks.on_iteration(IterationView{k, zt, x, z_next});

    const double beta = sched.advance();
    for (std::size_t i = 0; i < m; ++i) {
      zt[i] = z_next[i] + beta * (z_next[i] - z[i]);
      std::swap(z[i], z_next[i]);
    }
  }

  trace.final_candidate = stacked;
  trace.total_rounds = sim.round_count();
  trace.oracle_calls = sim.oracle_call_counts();
  trace.violation_count = sim.violation_count();
  return trace;
}

// Purely local FGM on w -> f_i(w) + (rho/2)||w - center_i||^2 - <z_i, w>,
// started from zero; no communication.
Responder local_inner_loop(const SeparableObjective& p, std::size_t T, double step,
                           std::vector<double> betas, double rho, Blocks centers) {
  return [&p, T, step, betas = std::move(betas), rho, centers = std::move(centers)](
             const Blocks& zt, Blocks& out, NetworkSim& sim) {
    const auto n = static_cast<Eigen::Index>(p.dim());
    for (std::size_t i = 0; i < p.agent_count(); ++i) {
      const AgentObjective& f = p.agent(i);
      Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
      Eigen::VectorXd wt = w;
      Eigen::VectorXd w_new(n);
      for (std::size_t t = 0; t < T; ++t) {
        Eigen::VectorXd g = f.gradient(wt) - zt[i];
        if (rho != 0.0) g += rho * (wt - centers[i]);
        w_new = wt - step * g;
        wt = w_new + betas[t] * (w_new - w);
        std::swap(w, w_new);
      }
      sim.record_oracle_call(i, OracleKind::kGradient, T);
      out[i] = std::move(w);
    }
  };
}

// FGM on the augmented inner problem; every inner step exchanges w_tilde.
Responder augmented_inner_loop(const SeparableObjective& p, std::size_t T, double step,
                               std::vector<double> betas, double alpha, double rho,
                               Blocks centers) {
  return [&p, T, step, betas = std::move(betas), alpha, rho, centers = std::move(centers)](
             const Blocks& zt, Blocks& out, NetworkSim& sim) {
    const std::size_t m = p.agent_count();
    const auto n = static_cast<Eigen::Index>(p.dim());
    Blocks w(m, Eigen::VectorXd::Zero(n));
    Blocks wt = w;
    Eigen::VectorXd w_new(n);
    for (std::size_t t = 0; t < T; ++t) {
      const std::vector<Inbox> inbox = sim.exchange(wt);
      Blocks next_wt(m);
      for (std::size_t i = 0; i < m; ++i) {
        Eigen::VectorXd g = p.agent(i).gradient(wt[i]) - zt[i] +
                            alpha * sim.weighted_neighbor_sum(i, wt[i], inbox[i]);
        if (rho != 0.0) g += rho * (wt[i] - centers[i]);
        sim.record_oracle_call(i, OracleKind::kGradient);
        w_new = wt[i] - step * g;
        next_wt[i] = w_new + betas[t] * (w_new - w[i]);
        w[i] = w_new;
      }
      wt = std::move(next_wt);
    }
    for (std::size_t i = 0; i < m; ++i) out[i] = std::move(w[i]);
  };
}

}  // namespace

RunTrace run_variant(const SeparableObjective& p, const CommunicationGraph& g,
                     const AlgoConfig& c, NetworkSim& sim, const RunHooks& hooks) {
  const Resolved r = resolve(p, g, c);
  const std::string_view name = r.name;
  const double lmax = g.spectrum.lambda_max;
  const double lmin = g.spectrum.lambda_min_plus;
  const double ratio = lmin / lmax;
  if (sim.agent_count() != r.m) throw std::invalid_argument("simulator topology mismatch");
  Scheme s;

  switch (c.variant) {
    case Variant::kCase1:
    case Variant::kCase2: {
      require_conjugates(p, name);
      const double mu = positive(name, "mu", r.mu);
      if (c.variant == Variant::kCase1) {
        const double L = positive(name, "L", r.L);
        s.q = mu / L * ratio;
        s.step = mu / lmax;
      } else {
        const double R = required(name, "R", c.R);
        const double reg = r.eps / (4.0 * R * R);
        s.q = reg / (lmax / mu + reg);
        s.step = 1.0 / (lmax / mu + reg);
        s.dual_reg = reg;
      }
      s.respond = [&p](const Blocks& zt, Blocks& out, NetworkSim& net) {
        for (std::size_t i = 0; i < p.agent_count(); ++i) {
          out[i] = p.agent(i).conjugate_argmax(zt[i]);
          net.record_oracle_call(i, OracleKind::kConjugate);
        }
      };
      return outer_loop(p, g, c, resolve_bound(r, c), s, sim, hooks);
    }

    case Variant::kCase3:
    case Variant::kCase4: {
      require_regularized_conjugates(p, name);
      const double Rx = required(name, "R_x", c.R_x);
      const double rho = r.eps / (Rx * Rx);
      if (c.variant == Variant::kCase3) {
        const double L = positive(name, "L", r.L);
        s.q = rho / (L + rho) * ratio;
        s.step = rho / lmax;
      } else {
        const double R = required(name, "R", c.R);
        const double reg = r.eps / (4.0 * R * R);
        s.q = reg / (lmax / rho + reg);
        s.step = 1.0 / (lmax / rho + reg);
        s.dual_reg = reg;
      }
      s.respond = [&p, rho, centers = local_minimizers(p, c)](const Blocks& zt, Blocks& out,
                                                             NetworkSim& net) {
        for (std::size_t i = 0; i < p.agent_count(); ++i) {
          out[i] = p.agent(i).regularized_conjugate_argmax(zt[i], rho, centers[i]);
          net.record_oracle_call(i, OracleKind::kConjugate);
        }
      };
      return outer_loop(p, g, c, resolve_bound(r, c), s, sim, hooks);
    }

    case Variant::kNofriendScSmooth:
    case Variant::kNofriendSmooth: {
      require_euclidean(p, name);
      const double L = positive(name, "L", r.L);
      double q_tilde = 0.0, inner_step = 0.0, rho = 0.0;
      Blocks centers;
      if (c.variant == Variant::kNofriendScSmooth) {
        const double mu = positive(name, "mu", r.mu);
        q_tilde = mu / L;
        inner_step = 1.0 / L;
        s.step = mu / lmax;
      } else {
        const double Rx = required(name, "R_x", c.R_x);
        rho = r.eps / (Rx * Rx);
        q_tilde = rho / (L + rho);
        inner_step = 1.0 / (L + rho);
        s.step = rho / lmax;
        centers = local_minimizers(p, c);
      }
      s.q = q_tilde * ratio;
      const IterationBound b = resolve_bound(r, c);
      const std::size_t T = *b.T;
      s.respond = local_inner_loop(p, T, inner_step, inner_betas(q_tilde, T), rho,
                                   std::move(centers));
      return outer_loop(p, g, c, b, s, sim, hooks);
    }

    case Variant::kAugmentedSc:
    case Variant::kAugmentedSmooth: {
      require_euclidean(p, name);
      const double L = positive(name, "L", r.L);
      double mu_alpha = 0.0, L_alpha = 0.0, rho = 0.0;
      Blocks centers;
      if (c.variant == Variant::kAugmentedSc) {
        mu_alpha = positive(name, "mu_sum", r.mu_sum);
        L_alpha = L + mu_alpha / lmin * lmax;
      } else {
        const double Rx = required(name, "R_x", c.R_x);
        rho = r.eps / (Rx * Rx);
        mu_alpha = static_cast<double>(r.m) * rho;
        L_alpha = L + mu_alpha / lmin * lmax + mu_alpha;
        centers = local_minimizers(p, c);
      }
      const double alpha = mu_alpha / lmin;
      const double q_tilde = mu_alpha / L_alpha;
      s.q = q_tilde * ratio;
      s.step = mu_alpha / lmax;
      const IterationBound b = resolve_bound(r, c);
      const std::size_t T = *b.T;
      s.respond = augmented_inner_loop(p, T, 1.0 / L_alpha, inner_betas(q_tilde, T), alpha, rho,
                                       std::move(centers));
      return outer_loop(p, g, c, b, s, sim, hooks);
    }
  }
  throw std::invalid_argument("unknown variant");
}

RunTrace run_variant(const SeparableObjective& p, const CommunicationGraph& g,
                     const AlgoConfig& c, const RunHooks& hooks) {
  NetworkSim sim(g.topology);
  return run_variant(p, g, c, sim, hooks);
}

namespace {

RunTrace run_as(Variant v, const SeparableObjective& p, const CommunicationGraph& g,
                const AlgoConfig& c, const RunHooks& hooks) {
  AlgoConfig cfg = c;
  cfg.variant = v;
  return run_variant(p, g, cfg, hooks);
}

}  // namespace

RunTrace run_case1(const SeparableObjective& p, const CommunicationGraph& g, const AlgoConfig& c,
                   const RunHooks& h) {
  return run_as(Variant::kCase1, p, g, c, h);
}
RunTrace run_case2(const SeparableObjective& p, const CommunicationGraph& g, const AlgoConfig& c,
                   const RunHooks& h) {
  return run_as(Variant::kCase2, p, g, c, h);
}
RunTrace run_case3(const SeparableObjective& p, const CommunicationGraph& g, const AlgoConfig& c,
                   const RunHooks& h) {
  return run_as(Variant::kCase3, p, g, c, h);
}
RunTrace run_case4(const SeparableObjective& p, const CommunicationGraph& g, const AlgoConfig& c,
                   const RunHooks& h) {
  return run_as(Variant::kCase4, p, g, c, h);
}
RunTrace run_nofriend_sc_smooth(const SeparableObjective& p, const CommunicationGraph& g,
                                const AlgoConfig& c, const RunHooks& h) {
  return run_as(Variant::kNofriendScSmooth, p, g, c, h);
}
RunTrace run_nofriend_smooth(const SeparableObjective& p, const CommunicationGraph& g,
                             const AlgoConfig& c, const RunHooks& h) {
  return run_as(Variant::kNofriendSmooth, p, g, c, h);
}
RunTrace run_augmented_sc(const SeparableObjective& p, const CommunicationGraph& g,
                          const AlgoConfig& c, const RunHooks& h) {
  return run_as(Variant::kAugmentedSc, p, g, c, h);
}
RunTrace run_augmented_smooth(const SeparableObjective& p, const CommunicationGraph& g,
                              const AlgoConfig& c, const RunHooks& h) {
  return run_as(Variant::kAugmentedSmooth, p, g, c, h);
}

}  // namespace dualopt
