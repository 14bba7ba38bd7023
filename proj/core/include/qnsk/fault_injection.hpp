#pragma once

namespace qnsk {

/// Deliberate defects used by mutation tests of the check gate.
enum class Fault { none, korteweg_sign };

void inject_fault(Fault f);
bool fault_injected(Fault f);

}  // namespace qnsk
