#include "qnsk/fault_injection.hpp"

#include <atomic>

namespace qnsk {

namespace {
std::atomic<Fault> g_fault{Fault::none};
}

void inject_fault(Fault f) { g_fault.store(f); }
bool fault_injected(Fault f) { return f != Fault::none && g_fault.load() == f; }

}  // namespace qnsk
