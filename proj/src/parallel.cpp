#include "xicp/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace xicp {

namespace {

Exec initial_exec() {
#ifdef XICP_HAS_OPENMP
  const char* env = std::getenv("XICP_SERIAL");
  if (env != nullptr && env[0] != '\0') {
    return Exec::Serial;
  }
  return Exec::Parallel;
#else
  return Exec::Serial;
#endif
}

std::atomic<Exec>& exec_state() {
  static std::atomic<Exec> state{initial_exec()};
  return state;
}

}  // namespace

Exec default_exec() { return exec_state().load(); }

void set_default_exec(Exec exec) { exec_state().store(exec); }

}  // namespace xicp
