#include "rwl/env/hopper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "rwl/common/files.hpp"

namespace rwl::env {

namespace {

double clamp_unit(double v) {
  if (std::isnan(v)) return 0.0;
  return std::clamp(v, -1.0, 1.0);
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

void validate(const EnvConfig& c) {
  if (!(c.dt > 0.0)) throw ConfigError("env.dt must be > 0");
  if (c.horizon < 1) throw ConfigError("env.horizon must be >= 1");
  const double coefficients[] = {c.thrust_max, c.torque_max,         c.gravity,         c.linear_drag,
                                 c.rotational_damping, c.ground_friction, c.contact_epsilon, c.init_noise};
  for (double v : coefficients) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("env coefficients must be finite and >= 0");
  }
}

std::array<double, kChannelCount> Observation::values() const {
  return {torso_z, vel_x, vel_z, pitch, ang_vel, up_proj, contact, action_prev_0, action_prev_1};
}

EnvState reset(const EnvConfig& config, std::uint64_t seed) {
  EnvState s;
  if (config.init_noise > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> offset(-config.init_noise, config.init_noise);
    s.x = offset(rng);
    s.z = std::max(0.0, offset(rng));
  }
  return s;
}

Observation observe(const EnvState& s, const EnvConfig& config) {
  Observation o;
  o.torso_z = s.z;
  o.vel_x = s.vx;
  o.vel_z = s.vz;
  o.pitch = s.pitch;
  o.ang_vel = s.ang_vel;
  o.up_proj = std::cos(s.pitch);
  o.contact = s.z <= config.contact_epsilon ? 1.0 : 0.0;
  o.action_prev_0 = s.prev_action.thrust;
  o.action_prev_1 = s.prev_action.torque;
  return o;
}

StepResult step(const EnvState& s, Action action, const EnvConfig& c) {
  const Action a{clamp_unit(action.thrust), clamp_unit(action.torque)};
  EnvState n = s;

  const double force_x = -std::sin(s.pitch) * a.thrust * c.thrust_max;
  const double force_z = std::cos(s.pitch) * a.thrust * c.thrust_max;
  n.vx = s.vx + c.dt * (force_x - c.linear_drag * s.vx);
  n.vz = s.vz + c.dt * (force_z - c.gravity - c.linear_drag * s.vz);
  n.ang_vel = s.ang_vel + c.dt * (a.torque * c.torque_max - c.rotational_damping * s.ang_vel);

  n.x = s.x + c.dt * n.vx;
  n.z = s.z + c.dt * n.vz;
  n.pitch = wrap_angle(s.pitch + c.dt * n.ang_vel);

  if (n.z < 0.0) {
    n.z = 0.0;
    n.vz = std::max(0.0, n.vz);
    n.vx = n.vx * (1.0 - c.ground_friction * c.dt);
  }
  n.prev_action = a;
  n.step = s.step + 1;
  return {n, observe(n, c)};
}

ObservationSchema observation_schema(const EnvConfig&) {
  return ObservationSchema{{
      {"torso_z", "height of the body above the ground", "m"},
      {"vel_x", "forward (horizontal) velocity, positive is forward", "m/s"},
      {"vel_z", "vertical velocity, positive is up", "m/s"},
      {"pitch", "body tilt from upright, positive leans backward", "rad"},
      {"ang_vel", "pitch angular velocity", "rad/s"},
      {"up_proj", "cos(pitch); 1 when upright, -1 when upside down", "1"},
      {"contact", "1 when touching the ground, else 0", "1"},
      {"action_prev_0", "thrust command applied this step, in [-1, 1]", "1"},
      {"action_prev_1", "torque command applied this step, in [-1, 1]", "1"},
  }};
}

std::string env_context_text(const EnvConfig& c) {
  std::string out;
  out += "Environment: planar hopper (2D point-mass body with a pitch angle).\n";
  out += "The agent fires a thruster along its body-up axis and applies a pitch torque.\n";
  out += "Tilting the body redirects thrust, which is how it moves forward; gravity pulls it\n";
  out += "down and the ground at height 0 stops falls (landing removes vertical speed and\n";
  out += "applies friction).\n\n";
  out += "Observation channels available to the reward (scalars, one value per step):\n";
  for (const auto& ch : observation_schema(c).channels) {
    out += fmt::format("- {} [{}]: {}\n", ch.name, ch.unit, ch.description);
  }
  out += "\nActions: thrust in [-1, 1] (scaled by ";
  out += fmt::format("{} m/s^2), torque in [-1, 1] (scaled by {}).\n", c.thrust_max, c.torque_max);
  out += fmt::format(
      "Dynamics: time step {} s, gravity {} m/s^2, linear drag {}, rotational damping {}, "
      "ground friction {}.\n",
      c.dt, c.gravity, c.linear_drag, c.rotational_damping, c.ground_friction);
  out += fmt::format("Episode: starts at rest on the ground and lasts {} steps ({} s).\n", c.horizon,
                     c.horizon * c.dt);
  out += "The reward is evaluated after every step on the channels above.\n";
  return out;
}

}  // namespace rwl::env
