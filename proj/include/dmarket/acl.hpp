#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace dmarket {

enum class Performative {
  Request,
  Inform,
  Cfp,
  Propose,
  AcceptProposal,
  RejectProposal,
};

std::string toString(Performative p);

struct AclMessage {
  Performative performative = Performative::Inform;
  std::string sender;
  std::vector<std::string> receivers;
  std::string conversationId;
  std::string content;
};

struct LoggedMessage {
  std::uint64_t step = 0;
  AclMessage message;
};

/// Append-only record of every dispatched message, in dispatch order.
class MessageLog {
 public:
  void append(const AclMessage& message);
  const std::vector<LoggedMessage>& entries() const { return entries_; }

  /// One JSON object per line, fixed key order, deterministic bytes.
  void writeJsonl(std::ostream& out) const;
  std::string toJsonl() const;

 private:
  std::vector<LoggedMessage> entries_;
  std::uint64_t nextStep_ = 0;
};

}  // namespace dmarket
