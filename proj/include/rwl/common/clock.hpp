#pragma once

#include <functional>
#include <string>

namespace rwl {

/// Source of wall-clock timestamps (ISO-8601, UTC). Injected everywhere a
/// timestamp is persisted so runs can be replayed byte-for-byte.
using Clock = std::function<std::string()>;

Clock system_clock();
Clock fixed_clock(std::string timestamp = "2000-01-01T00:00:00Z");

}  // namespace rwl
