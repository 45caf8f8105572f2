#include "rwl/common/clock.hpp"

#include <chrono>
#include <ctime>

#include <fmt/chrono.h>

namespace rwl {

Clock system_clock() {
  return [] {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
  };
}

Clock fixed_clock(std::string timestamp) {
  return [ts = std::move(timestamp)] { return ts; };
}

}  // namespace rwl
