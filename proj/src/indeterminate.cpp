#include "waiterplan/indeterminate.hpp"

#include <atomic>
#include <stdexcept>

namespace waiterplan {

std::string to_string(VarId id) {
  const char* names[] = {"t", "k", "ep", "ev", "r", "d"};
  return std::string("x_") + names[static_cast<int>(id.tag)] +
         std::to_string(id.index);
}

namespace {

constexpr uint32_t kSeqBits = 20;
constexpr uint32_t kSeqMask = (1u << kSeqBits) - 1;

struct StreamState {
  uint32_t stream;
  uint32_t seq = 0;
};

thread_local StreamState* g_scope = nullptr;
std::atomic<uint32_t> g_global_seq{0};

}  // namespace

VarId FreshVars::next() {
  if (g_scope != nullptr) {
    if (g_scope->seq > kSeqMask) {
      throw std::runtime_error("FreshVars: scoped id stream exhausted");
    }
    return {VarTag::remainder, (g_scope->stream << kSeqBits) | g_scope->seq++};
  }
  const uint32_t seq = g_global_seq.fetch_add(1, std::memory_order_relaxed);
  if (seq > kSeqMask) {
    throw std::runtime_error("FreshVars: global id stream exhausted");
  }
  return {VarTag::remainder, (kGlobalStream << kSeqBits) | seq};
}

FreshVars::Scope::Scope(uint32_t stream) {
  if (stream > kModelStream) {
    throw std::invalid_argument("FreshVars::Scope: stream out of range");
  }
  prev_ = g_scope;
  g_scope = new StreamState{stream, 0};
}

FreshVars::Scope::~Scope() {
  delete g_scope;
  g_scope = static_cast<StreamState*>(prev_);
}

}  // namespace waiterplan
