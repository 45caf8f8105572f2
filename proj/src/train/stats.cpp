#include "rwl/train/stats.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "rwl/common/files.hpp"

namespace rwl::train {

std::vector<ComponentStat> compute_component_stats(const std::vector<const Trajectory*>& trajectories) {
  if (trajectories.empty()) return {};
  const std::size_t n = trajectories.front()->component_names.size();
  std::vector<ComponentStat> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t count = 0;
    for (const Trajectory* traj : trajectories) {
      for (const auto& s : traj->steps) {
        const double v = s.components[j];
        hi = std::max(hi, v);
        lo = std::min(lo, v);
        sum += v;
        ++count;
      }
    }
    if (count == 0) {
      out[j] = {0.0, 0.0, 0.0};
    } else {
      out[j] = {hi, sum / static_cast<double>(count), lo};
    }
  }
  return out;
}

std::vector<int> checkpoint_epochs(int epochs, int epochfreq) {
  if (epochs < 1 || epochfreq < 1) throw std::invalid_argument("epochs and epochfreq must be at least 1");
  std::vector<int> out;
  const int k = epochs / epochfreq;
  for (int i = 0; i < k; ++i) out.push_back(i * epochfreq);
  out.push_back(epochs);
  return out;
}

std::string summarize_component_stats(const ComponentStatsLog& log) {
  if (log.checkpoints.empty() || log.component_names.empty()) {
    throw std::invalid_argument("component stats log is empty");
  }
  std::string out;
  for (std::size_t j = 0; j < log.component_names.size(); ++j) {
    std::string epochs;
    std::string means;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t c = 0; c < log.checkpoints.size(); ++c) {
      const auto& cp = log.checkpoints[c];
      const ComponentStat& s = cp.stats.at(j);
      if (c > 0) {
        epochs += ", ";
        means += ", ";
      }
      epochs += fmt::format("{}", cp.epoch);
      means += fmt::format("{:#.6g}", s.mean);
      hi = std::max(hi, s.max);
      lo = std::min(lo, s.min);
      sum += s.mean;
    }
    const double mean = sum / static_cast<double>(log.checkpoints.size());
    out += fmt::format("{}:\n  mean at epochs [{}]: [{}]\n  max {:#.6g}, mean {:#.6g}, min {:#.6g}\n",
                       log.component_names[j], epochs, means, hi, mean, lo);
  }
  return out;
}

std::string stats_to_json(const ComponentStatsLog& log) {
  nlohmann::json cps = nlohmann::json::array();
  for (const auto& cp : log.checkpoints) {
    nlohmann::json stats = nlohmann::json::object();
    for (std::size_t j = 0; j < log.component_names.size(); ++j) {
      const auto& s = cp.stats.at(j);
      stats[log.component_names[j]] = {{"max", s.max}, {"mean", s.mean}, {"min", s.min}};
    }
    cps.push_back({{"epoch", cp.epoch}, {"stats", stats}});
  }
  nlohmann::json j = {{"component_names", log.component_names}, {"checkpoints", cps}};
  return j.dump(2) + "\n";
}

ComponentStatsLog stats_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ComponentStatsLog log;
    log.component_names = j.at("component_names").get<std::vector<std::string>>();
    for (const auto& cpj : j.at("checkpoints")) {
      Checkpoint cp;
      cp.epoch = cpj.at("epoch").get<int>();
      for (const auto& name : log.component_names) {
        const auto& s = cpj.at("stats").at(name);
        cp.stats.push_back({s.at("max").get<double>(), s.at("mean").get<double>(), s.at("min").get<double>()});
      }
      log.checkpoints.push_back(std::move(cp));
    }
    return log;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(fmt::format("stats: {}", e.what()));
  }
}

}  // namespace rwl::train
