#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rwl {

struct Channel {
  std::string name;
  std::string description;
  std::string unit;
};

/// Ordered, closed set of observation channels a reward program may read.
struct ObservationSchema {
  std::vector<Channel> channels;

  std::vector<std::string> names() const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }
};

}  // namespace rwl
