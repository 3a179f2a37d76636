// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <regex>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "dualopt/certify.hpp"
#include "dualopt/dualnet.hpp"
#include "dualopt/instances.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

namespace {

using namespace dualopt;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::VectorXd stacked(const std::vector<Eigen::VectorXd>& blocks) {
  const Eigen::Index n = blocks.front().size();
  Eigen::VectorXd out(n * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out.segment(static_cast<Eigen::Index>(i) * n, n) = blocks[i];
  }
  return out;
}

// 1: dual gap of case1 below L_phi R^2 exp(-k sqrt(mu_phi / L_phi)) for k <= 200.
// mu / L = 0.01 keeps the bound above double rounding of phi out to k = 200.
Outcome geometric_dual_rate() {
  const auto t0 = Clock::now();
  const SeparableObjective p = make_quadratic_instance(4, 2, 0.02, 2.0, 1, ScalePattern::kAlternating);
  const CommunicationGraph g(build_graph(GraphFamily::kCycle, 4));
  const ReferenceSolution ref = reference_solve(p, g);
  const testing::QuadraticDual d = testing::quadratic_dual(p, g.laplacian.matrix());
  const double L_phi = g.spectrum.lambda_max / p.mu();
  const double mu_phi = g.spectrum.lambda_min_plus / p.L();
  const double R2 = ref.R * ref.R;
  const double phi_star = -ref.f_star;

  std::vector<double> gaps{d.phi_z(Eigen::VectorXd::Zero(8)) - phi_star};
  AlgoConfig c;
  c.N = 200;
  run_case1(p, g, c, {[&](const IterationView& v) { gaps.push_back(d.phi_z(stacked(v.z_next)) - phi_star); }});
  double worst_ratio = 0.0;
  std::size_t violations = 0;
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    const double bound = L_phi * R2 * std::exp(-double(k) * std::sqrt(mu_phi / L_phi));
    if (gaps[k] > bound) ++violations;
    worst_ratio = std::max(worst_ratio, gaps[k] / bound);
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && gaps.size() == 201 && secs < 1.0,
          fmt::format("k=0..{} violations={} max gap/bound={:.3g} runtime={:.3f}s (limit 1s)",
                      gaps.size() - 1, violations, worst_ratio, secs)};
}

// 2: each variant certifies at its own bound on its matching instance.
Outcome certificate_at_bound() {
  const auto t0 = Clock::now();
  std::vector<std::string> failures;
  std::string worst;
  double worst_slack = -kInf;
  for (Variant v : kAllVariants) {
    const testing::Scenario s = testing::matching_scenario(v);
    const ReferenceSolution ref = reference_solve(s.problem, s.graph);
    for (double eps : {1e-3, 1e-5}) {
      const RunTrace t = run_variant(s.problem, s.graph, testing::configure(v, eps, s.problem, ref));
      const SolutionCertificate cert =
          certificate(s.problem, t.final_candidate, ref, s.graph.laplacian, eps);
      const double slack = std::max(cert.primal_gap / eps, cert.consensus_residual / cert.epsilon_tilde);
      if (slack > worst_slack) {
        worst_slack = slack;
        worst = fmt::format("{}@{:g}", to_string(v), eps);
      }
      if (!cert.satisfied) {
        failures.push_back(fmt::format("{}@{:g}(gap {:.2e}, res {:.2e}, N={})", to_string(v), eps,
                                       cert.primal_gap, cert.consensus_residual, t.N));
      }
    }
  }
  const double secs = seconds_since(t0);
  std::string detail = fmt::format("16 runs, {} uncertified, tightest {} at {:.3f} of tolerance, runtime={:.1f}s (limit 60s)",
                                   failures.size(), worst, worst_slack, secs);
  for (const auto& f : failures) detail += " " + f;
  return {failures.empty() && secs < 60.0, detail};
}

// 3: distributed z-trajectories equal sqrt(W) times the centralized y-trajectory.
Outcome change_of_variables() {
  const std::array<std::pair<GraphFamily, std::size_t>, 4> graphs{{{GraphFamily::kPath, 2},
                                                                   {GraphFamily::kCycle, 4},
                                                                   {GraphFamily::kComplete, 3},
                                                                   {GraphFamily::kStar, 4}}};
  double worst = 0.0;
  for (const auto& [fam, m] : graphs) {
    const CommunicationGraph g(build_graph(fam, m));
    const SeparableObjective p = make_quadratic_instance(m, 2, 0.5, 3.0, 100 + m);
    const ReferenceSolution ref = reference_solve(p, g);
    const testing::QuadraticDual d = testing::quadratic_dual(p, g.laplacian.matrix());
    const double lmax = g.spectrum.lambda_max, lmin = g.spectrum.lambda_min_plus;
    for (Variant v : {Variant::kCase1, Variant::kCase2}) {
      AlgoConfig c;
      c.variant = v;
      c.N = 50;
      c.epsilon = 1e-2;
      c.R = ref.R;
      std::vector<Eigen::VectorXd> z;
      run_variant(p, g, c, {[&](const IterationView& it) { z.push_back(stacked(it.z_next)); }});
      double q = p.mu() / p.L() * lmin / lmax, step = p.mu() / lmax, reg = 0.0;
      if (v == Variant::kCase2) {
        reg = c.epsilon / (4.0 * ref.R * ref.R);
        q = reg / (lmax / p.mu() + reg);
        step = 1.0 / (lmax / p.mu() + reg);
      }
      const auto oracle = testing::centralized_dual_fgm(d, q, step, reg, 50);
      for (std::size_t k = 0; k < 50; ++k) {
        const Eigen::VectorXd expected = d.A * oracle.y[k];
        worst = std::max(worst, (z[k] - expected).norm() / std::max(expected.norm(), 1e-300));
      }
    }
  }
  return {worst <= 1e-10,
          fmt::format("P2,C4,K3,S4 x case1,case2, 50 iterations: max relative error={:.3e} (tol 1e-10)", worst)};
}

std::size_t rounds_to_certificate(const SeparableObjective& p, const CommunicationGraph& g, double eps) {
  const ReferenceSolution ref = reference_solve(p, g);
  const RunTrace t = run_case1(p, g, testing::configure(Variant::kCase1, eps, p, ref));
  const BoundComparison b = compare_to_bound(t, t.N);
  if (!b.rounds_to_certificate) throw std::runtime_error("case1 never certified in scaling run");
  return *b.rounds_to_certificate;
}

// 4: log-log slope of rounds vs m: cycles near 1, sparse random graphs <= 0.5.
Outcome scaling() {
  const auto t0 = Clock::now();
  const std::vector<double> sizes{8, 16, 32, 64};
  const double eps = 1e-4;
  std::vector<double> cycle, er;
  for (double md : sizes) {
    const auto m = static_cast<std::size_t>(md);
    const SeparableObjective p =
        make_quadratic_instance(m, 2, 1.0, 4.0, 1, ScalePattern::kAlternating);
    cycle.push_back(double(rounds_to_certificate(p, CommunicationGraph(build_graph(GraphFamily::kCycle, m)), eps)));
    const double prob = std::min(1.0, 2.0 * std::log(md) / md);
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      sum += double(rounds_to_certificate(
          p, CommunicationGraph(build_graph(GraphFamily::kErdosRenyi, m, prob, seed)), eps));
    }
    er.push_back(sum / 8.0);
  }
  const double sc = testing::loglog_slope(sizes, cycle);
  const double se = testing::loglog_slope(sizes, er);
  const double secs = seconds_since(t0);
  return {sc >= 0.7 && sc <= 1.3 && se <= 0.5 && secs < 300.0,
          fmt::format("cycle rounds {} slope={:.3f} (want [0.7,1.3]); ER mean rounds {} slope={:.3f} "
                      "(want <=0.5); runtime={:.1f}s (limit 300s)",
                      fmt::join(cycle, "/"), sc, fmt::join(er, "/"), se, secs)};
}

// Psi(z, w) = sum_i <z_i, w_i> - f_i(w_i)
double psi(const SeparableObjective& p, const std::vector<Eigen::VectorXd>& z,
           const std::vector<Eigen::VectorXd>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.agent_count(); ++i) s += z[i].dot(w[i]) - p.agent(i).value(w[i]);
  return s;
}

// 5: the truncated inner loop stays within xi of the exact Psi maximum.
Outcome inexact_oracle() {
  const double eps = 1e-4;
  const SeparableObjective p = make_quadratic_instance(4, 2, 1.0, 4.0, 1);
  const CommunicationGraph g(build_graph(GraphFamily::kCycle, 4));
  const ReferenceSolution ref = reference_solve(p, g);
  const double L_phi = g.spectrum.lambda_max / p.mu();
  const double mu_phi = g.spectrum.lambda_min_plus / p.L();
  const double xi = eps * eps / (6.0 * ref.R * ref.R) * std::sqrt(mu_phi / L_phi);
  double worst = -kInf;
  const RunHooks hooks{[&](const IterationView& v) {
    std::vector<Eigen::VectorXd> exact;
    for (std::size_t i = 0; i < p.agent_count(); ++i) {
      exact.push_back(p.agent(i).conjugate_argmax(v.z_tilde[i]));
    }
    worst = std::max(worst, psi(p, v.z_tilde, exact) - psi(p, v.z_tilde, v.responses));
  }};
  const RunTrace t =
      run_nofriend_sc_smooth(p, g, testing::configure(Variant::kNofriendScSmooth, eps, p, ref), hooks);
  return {worst <= xi, fmt::format("N={} T={}: max Psi-gap={:.3e} <= xi={:.3e}", t.N, *t.T,
                                   worst, xi)};
}

// 6: augmented_sc certifies with fewer rounds than case1 on a badly conditioned pair.
Outcome augmented_improvement() {
  const auto t0 = Clock::now();
  const double eps = 1e-6;
  Eigen::MatrixXd Q1(2, 2);
  Q1 << 1e-6, 0.0, 0.0, 1.0;
  const SeparableObjective p({make_quadratic(Q1, Eigen::Vector2d(1e-6, 0.0)),
                              make_quadratic(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(0.0, 1.0))});
  const CommunicationGraph g(build_graph(GraphFamily::kPath, 2));
  const ReferenceSolution ref = reference_solve(p, g);
  const RunTrace a = run_case1(p, g, testing::configure(Variant::kCase1, eps, p, ref));
  const RunTrace b = run_augmented_sc(p, g, testing::configure(Variant::kAugmentedSc, eps, p, ref));
  const bool ca = certificate(p, a.final_candidate, ref, g.laplacian, eps).satisfied;
  const bool cb = certificate(p, b.final_candidate, ref, g.laplacian, eps).satisfied;
  const auto fa = compare_to_bound(a, a.N).rounds_to_certificate;
  const auto fb = compare_to_bound(b, b.N).rounds_to_certificate;
  const double secs = seconds_since(t0);
  return {cb && b.total_rounds < a.total_rounds && secs < 30.0,
          fmt::format("case1 N={} rounds={} certified={} (first at {}); augmented_sc N={} T={} "
                      "rounds={} certified={} (first at {}); runtime={:.2f}s (limit 30s)",
                      a.N, a.total_rounds, ca, fa ? std::to_string(*fa) : "-", b.N, *b.T,
                      b.total_rounds, cb, fb ? std::to_string(*fb) : "-", secs)};
}

// 7: every property suite in the unit-test binary passes.
Outcome property_suites() {
  const std::string cmd =
      fmt::format("\"{}\" --gtest_filter='*Properties*' --gtest_brief=1 2>&1", DUALOPT_UNIT_TEST_BINARY);
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {false, "cannot launch " DUALOPT_UNIT_TEST_BINARY};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) out += buf.data();
  const int status = pclose(pipe);
  std::smatch mm;
  std::size_t passed = 0;
  if (std::regex_search(out, mm, std::regex(R"(\[  PASSED  \] (\d+) test)"))) passed = std::stoul(mm[1]);
  std::size_t suites = 0;
  std::smatch ms;
  if (std::regex_search(out, ms, std::regex(R"(from (\d+) test suite)"))) suites = std::stoul(ms[1]);
  const bool ok = status == 0 && passed > 0;
  std::string detail = fmt::format("{} property tests from {} suites passed, exit status {}",
                                   passed, suites, status);
  if (!ok) detail += "\n" + out;
  return {ok, detail};
}

// 8: KL barycenter on a 20-cycle stays in the simplex and certifies.
Outcome kl_barycenter() {
  const auto t0 = Clock::now();
  const double eps = 1e-3;
  const SeparableObjective p = make_entropy_instance(20, 5, 1);
  const CommunicationGraph g(build_graph(GraphFamily::kCycle, 20));
  const ReferenceSolution ref = reference_solve(p, g);
  double worst_sum = 0.0, worst_neg = 0.0;
  const RunHooks hooks{[&](const IterationView& v) {
    for (const auto& x : v.responses) {
      worst_sum = std::max(worst_sum, std::abs(x.sum() - 1.0));
      worst_neg = std::max(worst_neg, -x.minCoeff());
    }
  }};
  const RunTrace t = run_case2(p, g, testing::configure(Variant::kCase2, eps, p, ref), hooks);
  const SolutionCertificate cert = certificate(p, t.final_candidate, ref, g.laplacian, eps);
  const double secs = seconds_since(t0);
  return {cert.satisfied && worst_sum <= 1e-12 && worst_neg <= 1e-12 && secs < 30.0,
          fmt::format("N={} gap={:.3e} residual={:.3e} (eps~={:.3e}) max|sum-1|={:.1e} "
                      "max negativity={:.1e} runtime={:.2f}s (limit 30s)",
                      t.N, cert.primal_gap, cert.consensus_residual, cert.epsilon_tilde, worst_sum,
                      worst_neg, secs)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1 geometric dual rate", geometric_dual_rate},
      {"AC2 certificate at bound", certificate_at_bound},
      {"AC3 change of variables", change_of_variables},
      {"AC4 scaling with m", scaling},
      {"AC5 inexact oracle", inexact_oracle},
      {"AC6 augmented improvement", augmented_improvement},
      {"AC7 property suites", property_suites},
      {"AC8 KL barycenter", kl_barycenter},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    if (!o.pass) ++failed;
    fmt::print("{} {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
