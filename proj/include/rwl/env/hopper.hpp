#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rwl/common/schema.hpp"

namespace rwl::env {

/// Planar point-mass hopper: body-frame thrust plus pitch torque, gravity,
/// linear drag, and an inelastic ground at z = 0.
struct EnvConfig {
  double dt = 0.05;                 // s
  double thrust_max = 15.0;         // N per unit mass
  double torque_max = 5.0;
  double gravity = 9.81;            // m/s^2
  double linear_drag = 0.1;
  double rotational_damping = 0.2;
  double ground_friction = 0.5;
  int horizon = 200;                // steps
  double contact_epsilon = 1e-6;    // m
  double init_noise = 0.0;          // m, x/z reset offsets

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

/// Throws ConfigError when a field is out of range.
void validate(const EnvConfig& config);

struct Action {
  double thrust = 0.0;  // [-1, 1], along body-up
  double torque = 0.0;  // [-1, 1]

  friend bool operator==(const Action&, const Action&) = default;
};

struct EnvState {
  double x = 0.0;
  double z = 0.0;
  double vx = 0.0;
  double vz = 0.0;
  double pitch = 0.0;  // radians, kept in [-pi, pi]
  double ang_vel = 0.0;
  Action prev_action;
  int step = 0;

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

inline constexpr std::size_t kChannelCount = 9;

struct Observation {
  double torso_z = 0.0;
  double vel_x = 0.0;
  double vel_z = 0.0;
  double pitch = 0.0;
  double ang_vel = 0.0;
  double up_proj = 1.0;
  double contact = 1.0;
  double action_prev_0 = 0.0;
  double action_prev_1 = 0.0;

  /// Values in schema order.
  std::array<double, kChannelCount> values() const;

  friend bool operator==(const Observation&, const Observation&) = default;
};

EnvState reset(const EnvConfig& config, std::uint64_t seed);

Observation observe(const EnvState& state, const EnvConfig& config);

struct StepResult {
  EnvState state;
  Observation observation;
};

StepResult step(const EnvState& state, Action action, const EnvConfig& config);

ObservationSchema observation_schema(const EnvConfig& config);

/// Environment description given to program writers.
std::string env_context_text(const EnvConfig& config);

}  // namespace rwl::env
