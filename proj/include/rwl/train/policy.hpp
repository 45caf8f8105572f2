#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "rwl/env/hopper.hpp"

namespace rwl::train {

/// Linear-tanh policy: action = tanh(W * obs + b), W row-major 2 x 9.
struct PolicyParams {
  static constexpr std::size_t kRows = 2;
  static constexpr std::size_t kCols = env::kChannelCount;
  static constexpr std::size_t kDim = kRows * kCols + kRows;

  std::array<double, kRows * kCols> weights{};
  std::array<double, kRows> bias{};

  env::Action act(const std::array<double, kCols>& obs) const;

  /// Flat parameter vector: weights then bias.
  std::array<double, kDim> flatten() const;
  static PolicyParams from_flat(std::span<const double, kDim> flat);

  bool all_finite() const;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

std::string policy_to_json(const PolicyParams& policy, std::uint64_t seed, std::string_view config_digest);

struct LoadedPolicy {
  PolicyParams params;
  std::uint64_t seed = 0;
  std::string config_digest;
};

/// Throws IoError on malformed documents.
LoadedPolicy policy_from_json(std::string_view text);

}  // namespace rwl::train
