#include "dualopt/simnet.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace dualopt {

namespace {

auto find_entry(const std::vector<std::pair<AgentId, const Eigen::VectorXd*>>& entries,
                AgentId j) {
  return std::lower_bound(entries.begin(), entries.end(), j,
                          [](const auto& e, AgentId key) { return e.first < key; });
}

}  // namespace

bool Inbox::contains(AgentId j) const {
  auto it = find_entry(entries_, j);
  return it != entries_.end() && it->first == j;
}

std::vector<AgentId> Inbox::senders() const {
  std::vector<AgentId> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

const Eigen::VectorXd& Inbox::from(AgentId j) const {
  auto it = find_entry(entries_, j);
  if (it == entries_.end() || it->first != j) {
    if (sim_ != nullptr) ++sim_->violations_;
    throw std::out_of_range(fmt::format("agent {} has no message from agent {}", owner_, j));
  }
  return *it->second;
}

Inbox Inbox::from_map(AgentId owner, const std::map<AgentId, Eigen::VectorXd>& payloads) {
  Inbox box;
  box.owner_ = owner;
  for (const auto& [j, v] : payloads) box.entries_.emplace_back(j, &v);
  return box;
}

NetworkSim::NetworkSim(Topology topology)
    : topology_(std::move(topology)),
      buffer_(topology_.node_count()),
      oracle_calls_(topology_.node_count(), 0),
      gradient_calls_(topology_.node_count(), 0),
      conjugate_calls_(topology_.node_count(), 0) {}

std::vector<Inbox> NetworkSim::exchange(std::span<const Eigen::VectorXd> payloads) {
  const std::size_t m = agent_count();
  if (payloads.size() != m) {
    throw std::invalid_argument(
        fmt::format("exchange needs {} payloads, got {}", m, payloads.size()));
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!payloads[i].allFinite()) {
      throw std::invalid_argument(fmt::format("agent {} published a non-finite payload", i));
    }
  }
  for (std::size_t i = 0; i < m; ++i) buffer_[i] = payloads[i];
  std::vector<Inbox> boxes(m);
  for (std::size_t i = 0; i < m; ++i) {
    Inbox& box = boxes[i];
    box.owner_ = i;
    box.sim_ = this;
    const auto& nb = topology_.neighbors(i);
    box.entries_.reserve(nb.size());
    for (AgentId j : nb) box.entries_.emplace_back(j, &buffer_[j]);
  }
  ++rounds_;
  return boxes;
}

Eigen::VectorXd NetworkSim::weighted_neighbor_sum(AgentId i, const Eigen::VectorXd& own,
                                                  const Inbox& received) const {
  const auto& nb = topology_.neighbors(i);
  Eigen::VectorXd out = static_cast<double>(nb.size()) * own;
  for (AgentId j : nb) {
    if (!received.contains(j)) {
      throw std::invalid_argument(
          fmt::format("agent {} is missing the payload of neighbor {}", i, j));
    }
    out -= received.from(j);
  }
  return out;
}

void NetworkSim::record_oracle_call(AgentId i, OracleKind kind, std::size_t count) {
  oracle_calls_.at(i) += count;
  (kind == OracleKind::kGradient ? gradient_calls_ : conjugate_calls_).at(i) += count;
}

std::size_t NetworkSim::oracle_calls(AgentId i, OracleKind kind) const {
  return (kind == OracleKind::kGradient ? gradient_calls_ : conjugate_calls_).at(i);
}

std::size_t NetworkSim::max_oracle_calls() const {
  return oracle_calls_.empty() ? 0 : *std::max_element(oracle_calls_.begin(), oracle_calls_.end());
}

void NetworkSim::reset() {
  rounds_ = 0;
  violations_ = 0;
  std::fill(oracle_calls_.begin(), oracle_calls_.end(), 0);
  std::fill(gradient_calls_.begin(), gradient_calls_.end(), 0);
  std::fill(conjugate_calls_.begin(), conjugate_calls_.end(), 0);
}

}  // namespace dualopt
