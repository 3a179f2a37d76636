#pragma once

// Matching synthetic instance per algorithm family, shared by the property
// suite and the acceptance binary.

#include <string>

#include "dualopt/certify.hpp"
#include "dualopt/dualnet.hpp"
#include "dualopt/instances.hpp"

namespace dualopt::testing {

struct Scenario {
  std::string label;
  SeparableObjective problem;
  CommunicationGraph graph;
};

inline Scenario matching_scenario(Variant v) {
  CommunicationGraph c4(build_graph(GraphFamily::kCycle, 4));
  switch (v) {
    case Variant::kCase1:
      return {"quadratic C4 n=2 scale 1..4", make_quadratic_instance(4, 2, 1.0, 4.0, 1), c4};
    case Variant::kCase3:
      return {"wide ridge C4 n=4 l=2 c=0", make_ridge_instance(4, 4, 2, 0.0, 1), c4};
    case Variant::kCase2:
    case Variant::kCase4:
      return {"entropy C4 n=3 spread 0.2", make_entropy_instance(4, 3, 1, 0.2), c4};
    default:
      return {"logistic C4 n=2 l=20 c=1", make_logistic_instance(4, 2, 20, 1.0, 1), c4};
  }
}

inline AlgoConfig configure(Variant v, double epsilon, const SeparableObjective& problem,
                            const ReferenceSolution& ref) {
  AlgoConfig c;
  c.variant = v;
  c.epsilon = epsilon;
  c.M = effective_M(problem, ref);
  apply_reference(c, ref);
  return c;
}

}  // namespace dualopt::testing
