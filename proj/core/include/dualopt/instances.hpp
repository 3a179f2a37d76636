#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dualopt/problems.hpp"

namespace dualopt {

enum class ScalePattern { kUniform, kAlternating };

/// f_i = (s_i/2)||x - c_i||^2 with c_i uniform in [-1,1]^n and s_i uniform in
/// [scale_min, scale_max], or alternating scale_min, scale_max, ... so the
/// conditioning does not depend on m.
SeparableObjective make_quadratic_instance(std::size_t m, std::size_t n, double scale_min,
                                           double scale_max, std::uint64_t seed,
                                           ScalePattern pattern = ScalePattern::kUniform);

/// Ridge agents with l rows each: H ~ N(0,1), b = H x_true + 0.1 noise.
/// Passing c = 0 with n > l gives the rank-deficient ("wide") case.
SeparableObjective make_ridge_instance(std::size_t m, std::size_t n, std::size_t l, double c,
                                       std::uint64_t seed);

/// KL agents with q_i drawn from a flat Dirichlet, or, when spread is given,
/// q_i proportional to 1 + spread * u_i with u_i uniform in [-1,1]^n
/// (spread < 1; small spreads keep the agents close to uniform).
SeparableObjective make_entropy_instance(std::size_t m, std::size_t n, std::uint64_t seed,
                                         std::optional<double> spread = std::nullopt);

/// Logistic agents with l rows each: A uniform in [-1,1], y = sign(A x_true)
/// with 10% of labels flipped.
SeparableObjective make_logistic_instance(std::size_t m, std::size_t n, std::size_t l,
                                          double c, std::uint64_t seed);

SeparableObjective make_logistic_instance(const std::vector<DataShard>& shards, double c);

}  // namespace dualopt
