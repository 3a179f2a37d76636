#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "dualopt/dualnet.hpp"

namespace dualopt {

Variant parse_variant(std::string_view name) {
  for (Variant v : kAllVariants)
    if (to_string(v) == name) return v;
  throw std::invalid_argument(fmt::format("unknown algorithm '{}'", name));
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kCase1: return "case1";
    case Variant::kCase2: return "case2";
    case Variant::kCase3: return "case3";
    case Variant::kCase4: return "case4";
    case Variant::kNofriendScSmooth: return "nofriend_sc_smooth";
    case Variant::kNofriendSmooth: return "nofriend_smooth";
    case Variant::kAugmentedSc: return "augmented_sc";
    case Variant::kAugmentedSmooth: return "augmented_smooth";
  }
  return "unknown";
}

bool has_inner_loop(Variant v) {
  return v == Variant::kNofriendScSmooth || v == Variant::kNofriendSmooth ||
         v == Variant::kAugmentedSc || v == Variant::kAugmentedSmooth;
}

namespace {

double need(std::string_view variant, std::string_view name, std::optional<double> v) {
  if (!v || !(*v > 0.0) || !std::isfinite(*v)) {
    throw std::invalid_argument(
        fmt::format("{} needs a positive finite {}", variant, name));
  }
  return *v;
}

std::size_t to_count(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("iteration bound is not finite");
  const double c = std::ceil(x);
  if (c > static_cast<double>(std::numeric_limits<std::size_t>::max() / 2)) {
    throw std::invalid_argument("iteration bound overflows");
  }
  return c < 1.0 ? 1 : static_cast<std::size_t>(c);
}

}  // namespace

IterationBound iteration_bound(Variant v, const BoundInputs& in) {
  const std::string_view name = to_string(v);
  const double lmax = need(name, "lambda_max", in.spectrum.lambda_max);
  const double chi = need(name, "chi", in.spectrum.chi);
  const double eps = need(name, "epsilon", in.epsilon);
  const double sqrt2 = std::sqrt(2.0);
  IterationBound b;
  switch (v) {
    case Variant::kCase1: {
      const double mu = need(name, "mu", in.mu), L = need(name, "L", in.L);
      const double R = need(name, "R", in.R);
      b.N = to_count(2.0 * std::sqrt(L / mu * chi) *
                     std::log(2.0 * sqrt2 * lmax * R * R / (mu * eps)));
      break;
    }
    case Variant::kCase2: {
      const double mu = need(name, "mu", in.mu), M = need(name, "M", in.M);
      const double a = 4.0 * chi * M * M / (mu * eps) + 1.0;
      b.N = to_count(2.0 * std::sqrt(a) * std::log(a));
      break;
    }
    case Variant::kCase3: {
      const double L = need(name, "L", in.L), R = need(name, "R", in.R);
      const double Rx = need(name, "R_x", in.R_x);
      b.N = to_count(2.0 * std::sqrt((2.0 * L * Rx * Rx / eps + 1.0) * chi) *
                     std::log(8.0 * sqrt2 * lmax * R * R * Rx * Rx / (eps * eps)));
      break;
    }
    case Variant::kCase4: {
      const double M = need(name, "M", in.M), Rx = need(name, "R_x", in.R_x);
      const double a = 16.0 * chi * M * M * Rx * Rx / (eps * eps) + 1.0;
      b.N = to_count(2.0 * std::sqrt(a) * std::log(a));
      break;
    }
    case Variant::kNofriendScSmooth: {
      const double mu = need(name, "mu", in.mu), L = need(name, "L", in.L);
      const double R = need(name, "R", in.R), Rw = need(name, "R_w", in.R_w);
      const double kappa = L / mu;
      b.N = to_count(8.0 * std::sqrt(kappa * chi) *
                     std::log(2.0 * sqrt2 * lmax * R * R / (mu * eps)));
      b.T = to_count(std::sqrt(kappa) *
                     std::log(6.0 * L * R * R * Rw * Rw / (eps * eps) * std::sqrt(kappa * chi)));
      break;
    }
    case Variant::kNofriendSmooth: {
      const double L = need(name, "L", in.L), R = need(name, "R", in.R);
      const double Rx = need(name, "R_x", in.R_x), Rw = need(name, "R_w", in.R_w);
      const double a = 2.0 * L * Rx * Rx / eps + 1.0;
      b.N = to_count(8.0 * std::sqrt(a * chi) *
                     std::log(8.0 * sqrt2 * lmax * Rx * Rx * R * R / (eps * eps)));
      b.T = to_count(std::sqrt(a) * std::log(2.0 * std::sqrt(6.0) * R * R * Rw * Rw / eps *
                                             (L / eps + 1.0 / (2.0 * Rx * Rx)) *
                                             std::sqrt(a * chi)));
      break;
    }
    case Variant::kAugmentedSc: {
      const double L = need(name, "L", in.L), mu_bar = need(name, "mu_sum", in.mu_sum);
      const double R = need(name, "R", in.R), Rw = need(name, "R_w", in.R_w);
      const double a = L / mu_bar + chi;
      const double L_alpha = L + mu_bar * chi;
      b.N = to_count(8.0 * std::sqrt(a * chi) *
                     std::log(2.0 * sqrt2 * lmax * R * R / (mu_bar * eps)));
      b.T = to_count(std::sqrt(a) *
                     std::log(6.0 * L_alpha * R * R * Rw * Rw / (eps * eps) * std::sqrt(a * chi)));
      break;
    }
    case Variant::kAugmentedSmooth: {
      const double L = need(name, "L", in.L), R = need(name, "R", in.R);
      const double Rx = need(name, "R_x", in.R_x), Rw = need(name, "R_w", in.R_w);
      if (in.m == 0) throw std::invalid_argument("augmented_smooth needs the agent count m");
      const double m = static_cast<double>(in.m);
      const double mu_hat = m * eps / (Rx * Rx);
      const double alpha = mu_hat / in.spectrum.lambda_min_plus;
      const double a = 2.0 * Rx * Rx * L / (m * eps) + chi + 1.0;
      const double c1 = 8.0 * sqrt2 * lmax * Rx * Rx * R * R / (m * eps * eps);
      const double c2 = 24.0 * (L + alpha * lmax + mu_hat) * R * R * Rw * Rw / (eps * eps) *
                        std::sqrt(a * chi);
      b.N = to_count(8.0 * std::sqrt(a * chi) * std::log(c1));
      b.T = to_count(std::sqrt(a) * std::log(c2));
      break;
    }
  }
  return b;
}

DerivedDualConstants derive_dual_constants(Variant v, const BoundInputs& in) {
  const SpectralSummary& s = in.spectrum;
  DerivedDualConstants d;
  d.L_phi = in.mu > 0.0 ? s.lambda_max / in.mu : kInf;
  d.mu_phi = std::isfinite(in.L) ? s.lambda_min_plus / in.L : 0.0;
  d.R_w = in.R_w;
  const double eps = in.epsilon;
  switch (v) {
    case Variant::kCase2:
      if (in.R && *in.R > 0.0) {
        const double dual_reg = eps / (4.0 * *in.R * *in.R);
        d.L_phi_hat = d.L_phi + dual_reg;
        d.mu_phi_hat = dual_reg;
      }
      break;
    case Variant::kCase3:
    case Variant::kNofriendSmooth:
      if (in.R_x && *in.R_x > 0.0) {
        const double rho = eps / (*in.R_x * *in.R_x);
        d.L_phi_hat = s.lambda_max / rho;
        d.mu_phi_hat = s.lambda_min_plus / (in.L + rho);
      }
      break;
    case Variant::kCase4:
      if (in.R_x && *in.R_x > 0.0 && in.R && *in.R > 0.0) {
        const double rho = eps / (*in.R_x * *in.R_x);
        const double dual_reg = eps / (4.0 * *in.R * *in.R);
        d.L_phi_hat = s.lambda_max / rho + dual_reg;
        d.mu_phi_hat = dual_reg;
      }
      break;
    case Variant::kAugmentedSc:
      if (in.mu_sum > 0.0) {
        const double alpha = in.mu_sum / s.lambda_min_plus;
        d.L_phi_hat = s.lambda_max / in.mu_sum;
        d.mu_phi_hat = s.lambda_min_plus / (in.L + alpha * s.lambda_max);
      }
      break;
    case Variant::kAugmentedSmooth:
      if (in.R_x && *in.R_x > 0.0 && in.m > 0) {
        const double mu_hat = static_cast<double>(in.m) * eps / (*in.R_x * *in.R_x);
        const double alpha = mu_hat / s.lambda_min_plus;
        d.L_phi_hat = s.lambda_max / mu_hat;
        d.mu_phi_hat = s.lambda_min_plus / (in.L + alpha * s.lambda_max + mu_hat);
      }
      break;
    default:
      break;
  }
  return d;
}

}  // namespace dualopt
