#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "rwl/common/files.hpp"
#include "rwl/env/hopper.hpp"
#include "rwl/env/render.hpp"
#include "rwl/lang/program.hpp"

namespace rwl::env {
namespace {

EnvState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-5.0, 5.0), height(0.0, 3.0), vel(-10.0, 10.0),
      angle(-3.1, 3.1);
  EnvState s;
  s.x = pos(rng);
  s.z = std::bernoulli_distribution(0.2)(rng) ? 0.0 : height(rng);
  s.vx = vel(rng);
  s.vz = vel(rng);
  s.pitch = angle(rng);
  s.ang_vel = vel(rng);
  return s;
}

TEST(ResetTest, ZeroStateWithoutNoise) {
  const EnvConfig cfg;
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    EXPECT_EQ(reset(cfg, seed), EnvState{});
  }
}

TEST(ResetTest, NoiseDependsOnSeed) {
  EnvConfig cfg;
  cfg.init_noise = 0.1;
  const EnvState a = reset(cfg, 1), b = reset(cfg, 2);
  EXPECT_EQ(a, reset(cfg, 1));
  EXPECT_NE(a.x, b.x);
  EXPECT_LE(std::fabs(a.x), 0.1);
  EXPECT_LE(std::fabs(a.z), 0.1);
}

TEST(StepTest, RestIsFixedPoint) {
  const EnvConfig cfg;
  const EnvState start = reset(cfg, 0);
  EnvState s = start;
  for (int i = 0; i < 200; ++i) s = step(s, Action{}, cfg).state;
  EnvState expected = start;
  expected.step = 200;
  EXPECT_EQ(s, expected);
}

TEST(StepTest, OneStepThrust) {
  const EnvConfig cfg;
  const auto r = step(reset(cfg, 0), Action{1.0, 0.0}, cfg);
  EXPECT_NEAR(r.state.vz, 0.05 * (15.0 - 9.81), 1e-12);
  EXPECT_NEAR(r.state.vz, 0.2595, 1e-12);
}

TEST(StepTest, FreeFallLosesDtG) {
  const EnvConfig cfg;
  EnvState s;
  s.z = 0.5;
  const auto r = step(s, Action{}, cfg);
  EXPECT_NEAR(r.state.vz, -cfg.dt * cfg.gravity, 1e-12);
}

TEST(StepTest, ActionsClamped) {
  const EnvConfig cfg;
  const auto a = step(EnvState{}, Action{5.0, -7.0}, cfg);
  const auto b = step(EnvState{}, Action{1.0, -1.0}, cfg);
  EXPECT_EQ(a.state, b.state);
  EXPECT_EQ(a.state.prev_action, (Action{1.0, -1.0}));
}

TEST(StepTest, ContactIffOnGround) {
  const EnvConfig cfg;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    EnvState s = random_state(rng);
    if (i % 3 == 0) s.z = std::uniform_real_distribution<double>(0.0, 3.0 * cfg.contact_epsilon)(rng);
    const Observation o = observe(s, cfg);
    EXPECT_EQ(o.contact == 1.0, s.z <= cfg.contact_epsilon) << s.z;
    EXPECT_TRUE(o.contact == 0.0 || o.contact == 1.0);
  }
}

TEST(StepTest, InvariantsOnRandomStates) {
  const EnvConfig cfg;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 10000; ++i) {
    const EnvState s = random_state(rng);
    const Action a{u(rng), u(rng)};
    const auto r1 = step(s, a, cfg);
    const auto r2 = step(s, a, cfg);
    EXPECT_EQ(r1.state, r2.state);
    EXPECT_EQ(r1.observation, r2.observation);
    EXPECT_GE(r1.state.z, 0.0);
    EXPECT_LE(std::fabs(r1.observation.up_proj - std::cos(r1.state.pitch)), 1e-12);
    EXPECT_LE(std::fabs(r1.state.pitch), M_PI);
  }
}

TEST(StepTest, EnergyNonIncreasingWithoutActuation) {
  const EnvConfig cfg;
  std::mt19937_64 rng(13);
  auto energy = [&](const EnvState& s) { return 0.5 * (s.vx * s.vx + s.vz * s.vz) + cfg.gravity * s.z; };
  for (int i = 0; i < 10000; ++i) {
    const EnvState s = random_state(rng);
    const EnvState n = step(s, Action{}, cfg).state;
    EXPECT_LE(energy(n), energy(s) + 1e-9);
    EXPECT_LE(std::fabs(n.ang_vel), std::fabs(s.ang_vel));
  }
}

TEST(SchemaTest, NineValidChannels) {
  const auto schema = observation_schema(EnvConfig{});
  ASSERT_EQ(schema.channels.size(), 9u);
  EXPECT_EQ(schema.channels.front().name, "torso_z");
  for (const auto& c : schema.channels) {
    EXPECT_TRUE(lang::is_valid_identifier(c.name)) << c.name;
    EXPECT_FALSE(c.description.empty());
  }
}

TEST(SchemaTest, ContextText) {
  const std::string text = env_context_text(EnvConfig{});
  EXPECT_NE(text.find("vel_x"), std::string::npos);
  EXPECT_NE(text.find("200"), std::string::npos);
  EXPECT_LE(text.size(), 4096u);
  EXPECT_EQ(text, env_context_text(EnvConfig{}));
}

TEST(ConfigTest, RejectsBadValues) {
  EnvConfig cfg;
  cfg.dt = 0.0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = EnvConfig{};
  cfg.horizon = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  EXPECT_NO_THROW(validate(EnvConfig{}));
}

TEST(RenderTest, OriginMapsToQuarterWidth) {
  const auto p = world_to_pixel(EnvState{}, 0.0, 0.0, 64, 64);
  EXPECT_DOUBLE_EQ(p.col, 16.0);
  const Frame f = render_frame(EnvState{}, 64, 64);
  ASSERT_EQ(f.rgb.size(), 3u * 64 * 64);
  // Body disc is drawn around column 16 on the ground row.
  const int row = static_cast<int>(p.row);
  const std::size_t i = 3 * (static_cast<std::size_t>(row) * 64 + 16);
  const std::size_t sky = 3 * (2 * 64 + 60);
  EXPECT_NE(std::vector<std::uint8_t>(f.rgb.begin() + i, f.rgb.begin() + i + 3),
            std::vector<std::uint8_t>(f.rgb.begin() + sky, f.rgb.begin() + sky + 3));
}

TEST(RenderTest, Deterministic) {
  EnvState s;
  s.x = 1.2;
  s.z = 0.7;
  s.pitch = 0.3;
  EXPECT_EQ(render_frame(s, 96, 48), render_frame(s, 96, 48));
  EXPECT_THROW(render_frame(s, 8, 48), std::invalid_argument);
}

TEST(FramesTest, PpmRoundTrip) {
  const Frame f = render_frame(EnvState{}, 32, 20);
  const std::string ppm = encode_ppm(f);
  EXPECT_EQ(ppm.rfind("P6\n32 20\n255\n", 0), 0u);
  EXPECT_EQ(decode_ppm(ppm), f);
}

TEST(FramesTest, PngSignature) {
  const std::string png = encode_png(render_frame(EnvState{}, 32, 20));
  ASSERT_GT(png.size(), 8u);
  EXPECT_EQ(png.substr(1, 3), "PNG");
}

TEST(FramesTest, SequenceRoundTrip) {
  const auto dir = testing::scratch_dir("frames");
  std::vector<Frame> frames;
  EnvState s;
  for (int i = 0; i < 3; ++i) {
    s.x = i * 0.5;
    frames.push_back(render_frame(s, 24, 16));
  }
  write_frame_sequence(dir, frames, 0.25);
  const auto m = read_frame_manifest(dir);
  EXPECT_EQ(m.count, 3);
  EXPECT_EQ(m.dt, 0.25);
  EXPECT_EQ(read_frame_sequence(dir), frames);
  EXPECT_EQ(read_frame(dir, 2), frames[2]);
  EXPECT_TRUE(std::filesystem::exists(dir / "frame_0002.ppm"));
}

TEST(FramesTest, ExpertMediaReadable) {
  const auto frames = read_frame_sequence(testing::repo_data("expert_frames"));
  EXPECT_EQ(frames.size(), 41u);
}

}  // namespace
}  // namespace rwl::env
