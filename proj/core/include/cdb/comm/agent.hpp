#pragma once

#include "cdb/comm/message.hpp"
#include "cdb/vm/machine.hpp"

namespace cdb::comm {

// Target-side half of the nub: answers requests against a Machine.
class TargetAgent {
 public:
  explicit TargetAgent(vm::Machine& machine) : machine_(machine) {}

  StartupEvent startup() const;
  // Always returns the matching reply, an event for Continue, or ErrorReply.
  Message handle(const Message& request);
  bool exited() const { return std::holds_alternative<vm::Exited>(machine_.status()); }
  vm::Machine& machine() { return machine_; }

 private:
  Message event_for(const vm::RunStatus& s) const;

  vm::Machine& machine_;
};

}  // namespace cdb::comm
