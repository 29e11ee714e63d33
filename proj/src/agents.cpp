#include "dmarket/agents.hpp"

#include <stdexcept>

namespace dmarket {

void Registry::add(std::unique_ptr<Agent> agent) {
  if (!agent) throw std::invalid_argument("registry: null agent");
  const std::string& name = agent->name();
  if (name.empty()) throw std::invalid_argument("registry: empty agent name");
  if (index_.count(name) != 0) {
    throw std::invalid_argument("registry: duplicate agent name: " + name);
  }
  index_[name] = slots_.size();
  slots_.push_back(Slot{std::move(agent), {}});
}

bool Registry::has(const std::string& name) const {
  return index_.count(name) != 0;
}

void Registry::send(const AclMessage& message) {
  if (message.receivers.empty()) {
    throw std::runtime_error("registry: message has no receivers");
  }
  // Resolve every receiver before delivering to any, so a bad address
  // cannot leave the message half delivered.
  std::vector<std::size_t> targets;
  targets.reserve(message.receivers.size());
  for (const auto& receiver : message.receivers) {
    auto it = index_.find(receiver);
    if (it == index_.end()) {
      throw std::runtime_error("registry: unknown agent: " + receiver);
    }
    targets.push_back(it->second);
  }
  log_.append(message);
  for (std::size_t target : targets) {
    slots_[target].inbox.push_back(message);
  }
}

bool Registry::step() {
  bool delivered = false;
  for (auto& slot : slots_) {
    if (slot.inbox.empty()) continue;
    AclMessage message = std::move(slot.inbox.front());
    slot.inbox.pop_front();
    delivered = true;
    slot.agent->receive(message, *this);
  }
  return delivered;
}

void Registry::runUntilIdle(std::size_t maxPasses) {
  for (std::size_t pass = 0; pass < maxPasses; ++pass) {
    if (!step()) return;
  }
  throw std::runtime_error("registry: no quiescence after " +
                           std::to_string(maxPasses) + " passes");
}

}  // namespace dmarket
