#include "rwl/train/policy.hpp"

#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

#include "rwl/common/files.hpp"

namespace rwl::train {

env::Action PolicyParams::act(const std::array<double, kCols>& obs) const {
  std::array<double, kRows> out{};
  for (std::size_t r = 0; r < kRows; ++r) {
    double s = bias[r];
    for (std::size_t c = 0; c < kCols; ++c) s += weights[r * kCols + c] * obs[c];
    out[r] = std::tanh(s);
  }
  return {out[0], out[1]};
}

std::array<double, PolicyParams::kDim> PolicyParams::flatten() const {
  std::array<double, kDim> flat{};
  std::copy(weights.begin(), weights.end(), flat.begin());
  std::copy(bias.begin(), bias.end(), flat.begin() + weights.size());
  return flat;
}

PolicyParams PolicyParams::from_flat(std::span<const double, kDim> flat) {
  PolicyParams p;
  std::copy(flat.begin(), flat.begin() + p.weights.size(), p.weights.begin());
  std::copy(flat.begin() + p.weights.size(), flat.end(), p.bias.begin());
  return p;
}

bool PolicyParams::all_finite() const {
  for (double v : flatten()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string policy_to_json(const PolicyParams& policy, std::uint64_t seed, std::string_view config_digest) {
  nlohmann::json j = {
      {"W", policy.weights},
      {"b", policy.bias},
      {"seed", seed},
      {"config_digest", config_digest},
  };
  return j.dump(2) + "\n";
}

LoadedPolicy policy_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto w = j.at("W").get<std::vector<double>>();
    const auto b = j.at("b").get<std::vector<double>>();
    LoadedPolicy out;
    if (w.size() != out.params.weights.size() || b.size() != out.params.bias.size()) {
      throw IoError(fmt::format("policy: expected {} weights and {} biases", out.params.weights.size(),
                                out.params.bias.size()));
    }
    std::copy(w.begin(), w.end(), out.params.weights.begin());
    std::copy(b.begin(), b.end(), out.params.bias.begin());
    out.seed = j.at("seed").get<std::uint64_t>();
    out.config_digest = j.value("config_digest", "");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(fmt::format("policy: {}", e.what()));
  }
}

}  // namespace rwl::train
