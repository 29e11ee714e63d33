#pragma once

#include <deque>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dmarket/acl.hpp"

namespace dmarket {

class Registry;

class Agent {
 public:
  virtual ~Agent() = default;
  virtual const std::string& name() const = 0;
  virtual void receive(const AclMessage& message, Registry& registry) = 0;
};

/// Single-threaded actor registry. Messages are logged when dispatched and
/// delivered round-robin, one message per agent per pass, in registration
/// order. Agent names are unique; sending to an unknown name throws.
class Registry {
 public:
  void add(std::unique_ptr<Agent> agent);
  bool has(const std::string& name) const;

  /// Dispatch: log the message and enqueue it with every receiver.
  void send(const AclMessage& message);

  /// One delivery pass. Returns false when every inbox was empty.
  bool step();

  /// Runs delivery passes until all inboxes drain. Throws
  /// std::runtime_error if maxPasses passes do not reach quiescence.
  void runUntilIdle(std::size_t maxPasses);

  MessageLog& log() { return log_; }
  const MessageLog& log() const { return log_; }

 private:
  struct Slot {
    std::unique_ptr<Agent> agent;
    std::deque<AclMessage> inbox;
  };
  std::vector<Slot> slots_;             // registration order
  std::map<std::string, std::size_t> index_;
  MessageLog log_;
};

}  // namespace dmarket
