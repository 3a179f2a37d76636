#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dualopt/graph.hpp"

namespace dualopt {

enum class OracleKind { kGradient, kConjugate };

class NetworkSim;

/// Messages delivered to one agent in one round, keyed by sender.
///
/// Payload references point into the simulator's round buffer and stay valid
/// until the next exchange() on that simulator.
class Inbox {
 public:
  AgentId owner() const { return owner_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(AgentId j) const;
  std::vector<AgentId> senders() const;

  /// Payload from neighbor j. Reading from a non-neighbor is counted as a
  /// locality violation on the owning simulator and throws std::out_of_range.
  const Eigen::VectorXd& from(AgentId j) const;

  /// Builds an inbox over caller-owned payloads (for tests and tools); no
  /// violation accounting.
  static Inbox from_map(AgentId owner, const std::map<AgentId, Eigen::VectorXd>& payloads);

 private:
  friend class NetworkSim;
  AgentId owner_ = 0;
  std::vector<std::pair<AgentId, const Eigen::VectorXd*>> entries_;  // sorted by sender
  NetworkSim* sim_ = nullptr;
};

/// Synchronous round-based message passing over a fixed topology.
class NetworkSim {
 public:
  explicit NetworkSim(Topology topology);
  NetworkSim(const NetworkSim&) = delete;
  NetworkSim& operator=(const NetworkSim&) = delete;

  const Topology& topology() const { return topology_; }
  std::size_t agent_count() const { return topology_.node_count(); }

  /// One round: agent i publishes payloads[i] and receives its neighbors'
  /// payloads. Throws std::invalid_argument on a wrong payload count or
  /// non-finite entries (the round is then not counted).
  std::vector<Inbox> exchange(std::span<const Eigen::VectorXd> payloads);

  /// deg(i) own - sum_{j in N(i)} received_j: block i of (W ⊗ I) payloads.
  Eigen::VectorXd weighted_neighbor_sum(AgentId i, const Eigen::VectorXd& own,
                                        const Inbox& received) const;

  void record_oracle_call(AgentId i, OracleKind kind, std::size_t count = 1);

  std::size_t round_count() const { return rounds_; }
  std::size_t violation_count() const { return violations_; }
  const std::vector<std::size_t>& oracle_call_counts() const { return oracle_calls_; }
  std::size_t oracle_calls(AgentId i, OracleKind kind) const;
  std::size_t max_oracle_calls() const;

  void reset();

 private:
  friend class Inbox;
  Topology topology_;
  std::vector<Eigen::VectorXd> buffer_;
  std::size_t rounds_ = 0;
  std::size_t violations_ = 0;
  std::vector<std::size_t> oracle_calls_;
  std::vector<std::size_t> gradient_calls_;
  std::vector<std::size_t> conjugate_calls_;
};

}  // namespace dualopt
