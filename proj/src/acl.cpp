#include "dmarket/acl.hpp"

#include <sstream>

#include <json.hpp>

namespace dmarket {

std::string toString(Performative p) {
  switch (p) {
    case Performative::Request: return "REQUEST";
    case Performative::Inform: return "INFORM";
    case Performative::Cfp: return "CFP";
    case Performative::Propose: return "PROPOSE";
    case Performative::AcceptProposal: return "ACCEPT-PROPOSAL";
    case Performative::RejectProposal: return "REJECT-PROPOSAL";
  }
  return "?";
}

void MessageLog::append(const AclMessage& message) {
  entries_.push_back(LoggedMessage{nextStep_++, message});
}

void MessageLog::writeJsonl(std::ostream& out) const {
  for (const auto& entry : entries_) {
    nlohmann::ordered_json record;
    record["step"] = entry.step;
    record["performative"] = toString(entry.message.performative);
    record["sender"] = entry.message.sender;
    record["receivers"] = entry.message.receivers;
    record["conversation_id"] = entry.message.conversationId;
    record["content"] = entry.message.content;
    out << record.dump() << "\n";
  }
}

std::string MessageLog::toJsonl() const {
  std::ostringstream out;
  writeJsonl(out);
  return out.str();
}

}  // namespace dmarket
