#pragma once

#include <string>
#include <vector>

#include "rwl/train/rollout.hpp"

namespace rwl::train {

struct ComponentStat {
  double max = 0.0;
  double mean = 0.0;
  double min = 0.0;

  friend bool operator==(const ComponentStat&, const ComponentStat&) = default;
};

struct Checkpoint {
  int epoch = 0;  // completed epochs when recorded
  std::vector<ComponentStat> stats;  // aligned with ComponentStatsLog::component_names

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct ComponentStatsLog {
  std::vector<std::string> component_names;
  std::vector<Checkpoint> checkpoints;

  friend bool operator==(const ComponentStatsLog&, const ComponentStatsLog&) = default;
};

/// Per-component max/mean/min over every step of the trajectories.
std::vector<ComponentStat> compute_component_stats(const std::vector<const Trajectory*>& trajectories);

/// Epoch counts at which checkpoints are taken: 0, f, 2f, ... below
/// floor(epochs / f) * f, then `epochs`. Always floor(epochs / f) + 1 entries.
std::vector<int> checkpoint_epochs(int epochs, int epochfreq);

/// Text block per component: means at each checkpoint, then overall
/// max/mean/min. Throws std::invalid_argument for an empty log.
std::string summarize_component_stats(const ComponentStatsLog& log);

std::string stats_to_json(const ComponentStatsLog& log);
ComponentStatsLog stats_from_json(std::string_view text);

}  // namespace rwl::train
