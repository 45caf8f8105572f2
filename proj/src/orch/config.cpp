#include "rwl/orch/config.hpp"

#include <algorithm>
#include <initializer_list>

#include <fmt/format.h>

#include "rwl/common/digest.hpp"
#include "rwl/common/files.hpp"
#include "rwl/env/render.hpp"

namespace rwl::orch {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("{}: field '{}' has the wrong type", where, key));
  }
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

env::EnvConfig env_from_json(const json& j) {
  constexpr std::string_view w = "env";
  check_keys(j, {"dt", "thrust_max", "torque_max", "gravity", "linear_drag", "rotational_damping",
                 "ground_friction", "horizon", "contact_epsilon", "init_noise"},
             w);
  env::EnvConfig c;
  read(j, "dt", c.dt, w);
  read(j, "thrust_max", c.thrust_max, w);
  read(j, "torque_max", c.torque_max, w);
  read(j, "gravity", c.gravity, w);
  read(j, "linear_drag", c.linear_drag, w);
  read(j, "rotational_damping", c.rotational_damping, w);
  read(j, "ground_friction", c.ground_friction, w);
  read(j, "horizon", c.horizon, w);
  read(j, "contact_epsilon", c.contact_epsilon, w);
  read(j, "init_noise", c.init_noise, w);
  return c;
}

json env_to_json(const env::EnvConfig& c) {
  return {{"dt", c.dt},
          {"thrust_max", c.thrust_max},
          {"torque_max", c.torque_max},
          {"gravity", c.gravity},
          {"linear_drag", c.linear_drag},
          {"rotational_damping", c.rotational_damping},
          {"ground_friction", c.ground_friction},
          {"horizon", c.horizon},
          {"contact_epsilon", c.contact_epsilon},
          {"init_noise", c.init_noise}};
}

train::TrainConfig train_from_json(const json& j) {
  constexpr std::string_view w = "train";
  check_keys(j, {"gamma", "epochs", "epochfreq", "population", "elites", "init_sigma", "noise_decay", "seed"}, w);
  train::TrainConfig c;
  read(j, "gamma", c.gamma, w);
  read(j, "epochs", c.epochs, w);
  read(j, "epochfreq", c.epochfreq, w);
  read(j, "population", c.population, w);
  read(j, "elites", c.elites, w);
  read(j, "init_sigma", c.init_sigma, w);
  read(j, "noise_decay", c.noise_decay, w);
  read(j, "seed", c.seed, w);
  return c;
}

json train_to_json(const train::TrainConfig& c) {
  return {{"gamma", c.gamma},           {"epochs", c.epochs},        {"epochfreq", c.epochfreq},
          {"population", c.population}, {"elites", c.elites},        {"init_sigma", c.init_sigma},
          {"noise_decay", c.noise_decay}, {"seed", c.seed}};
}

std::string_view kind_name(feedback::BackendKind k) {
  switch (k) {
    case feedback::BackendKind::Http: return "http";
    case feedback::BackendKind::Scripted: return "scripted";
    case feedback::BackendKind::Human: return "human";
  }
  return "?";
}

feedback::BackendConfig backend_from_json(const json& j, const std::filesystem::path& base, std::string_view w) {
  check_keys(j, {"kind", "endpoint", "model", "temperature", "max_retries", "fixture_dir", "timeout_seconds",
                 "retry_backoff_ms"},
             w);
  feedback::BackendConfig c;
  std::string kind = "scripted";
  read(j, "kind", kind, w);
  if (kind == "http") {
    c.kind = feedback::BackendKind::Http;
  } else if (kind == "scripted") {
    c.kind = feedback::BackendKind::Scripted;
  } else if (kind == "human") {
    c.kind = feedback::BackendKind::Human;
  } else {
    throw ConfigError(fmt::format("{}: unknown backend kind '{}'", w, kind));
  }
  read(j, "endpoint", c.endpoint, w);
  read(j, "model", c.model, w);
  read(j, "temperature", c.temperature, w);
  read(j, "max_retries", c.max_retries, w);
  std::string fixture;
  read(j, "fixture_dir", fixture, w);
  c.fixture_dir = resolve(fixture, base);
  read(j, "timeout_seconds", c.timeout_seconds, w);
  read(j, "retry_backoff_ms", c.retry_backoff_ms, w);
  return c;
}

json backend_to_json(const feedback::BackendConfig& c) {
  return {{"kind", kind_name(c.kind)},
          {"endpoint", c.endpoint},
          {"model", c.model},
          {"temperature", c.temperature},
          {"max_retries", c.max_retries},
          {"fixture_dir", c.fixture_dir.string()},
          {"timeout_seconds", c.timeout_seconds},
          {"retry_backoff_ms", c.retry_backoff_ms}};
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Bilevel: return "bilevel";
    case Mode::Single: return "single";
    case Mode::Eureka: return "eureka";
    case Mode::EurekaGt: return "eureka_gt";
    case Mode::Human: return "human";
  }
  return "?";
}

Mode mode_from_string(std::string_view name) {
  for (Mode m : {Mode::Bilevel, Mode::Single, Mode::Eureka, Mode::EurekaGt, Mode::Human}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError(fmt::format("unknown mode '{}'", name));
}

int default_batch(Mode mode) {
  switch (mode) {
    case Mode::Eureka: return 8;
    case Mode::EurekaGt: return 4;
    default: return 1;
  }
}

train::TrainConfig RunConfig::effective_train() const {
  train::TrainConfig t = train;
  t.seed = seed;
  return t;
}

void validate(const RunConfig& c) {
  if (c.iterations < 1) throw ConfigError("iterations must be at least 1");
  if (c.max_repair_attempts < 0) throw ConfigError("max_repair_attempts must be non-negative");
  if (c.effective_batch() < 1) throw ConfigError("batch must be at least 1");
  env::validate(c.env);
  train::validate(c.effective_train());
  if (c.render.frame_stride < 1) throw ConfigError("render.frame_stride must be at least 1");
  if (c.render.width < env::kMinFrameSize || c.render.height < env::kMinFrameSize) {
    throw ConfigError("render size must be at least 16x16");
  }
  if (c.render.frame_cap < 1) throw ConfigError("render.frame_cap must be at least 1");
  if (!(c.sampling_temperature >= 0.0)) throw ConfigError("sampling_temperature must be non-negative");

  const bool uses_upper = c.mode == Mode::Bilevel || c.mode == Mode::Single;
  const bool uses_lower = c.mode != Mode::Single;
  if (uses_upper) feedback::validate(c.upper);
  if (uses_lower) feedback::validate(c.lower);
  if (c.mode != Mode::Eureka && c.mode != Mode::EurekaGt && c.expert_media.empty()) {
    throw ConfigError(fmt::format("mode {} requires expert_media", to_string(c.mode)));
  }
  if (c.mode == Mode::Eureka && !c.fitness) throw ConfigError("eureka mode requires a fitness spec");
  if (c.mode == Mode::EurekaGt && c.expert_score_program.empty()) {
    throw ConfigError("eureka_gt mode requires expert_score_program");
  }
  if (c.task_description.empty()) throw ConfigError("task_description must not be empty");
  if (c.creature_name.empty()) throw ConfigError("creature_name must not be empty");
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base) {
  constexpr std::string_view w = "config";
  check_keys(j, {"mode", "iterations", "max_repair_attempts", "batch", "env", "train", "upper", "lower",
                 "expert_media", "expert_score_program", "task_description", "creature_name", "seed",
                 "encoder_command", "fitness", "sampling_temperature", "render"},
             w);
  RunConfig c;
  std::string mode = "bilevel";
  read(j, "mode", mode, w);
  c.mode = mode_from_string(mode);
  read(j, "iterations", c.iterations, w);
  read(j, "max_repair_attempts", c.max_repair_attempts, w);
  if (j.contains("batch") && !j.at("batch").is_null()) {
    int b = 0;
    read(j, "batch", b, w);
    c.batch = b;
  }
  if (j.contains("env")) c.env = env_from_json(j.at("env"));
  if (j.contains("train")) c.train = train_from_json(j.at("train"));
  if (j.contains("upper")) c.upper = backend_from_json(j.at("upper"), base, "upper");
  if (j.contains("lower")) c.lower = backend_from_json(j.at("lower"), base, "lower");
  std::string media, score;
  read(j, "expert_media", media, w);
  read(j, "expert_score_program", score, w);
  c.expert_media = resolve(media, base);
  c.expert_score_program = resolve(score, base);
  read(j, "task_description", c.task_description, w);
  read(j, "creature_name", c.creature_name, w);
  read(j, "seed", c.seed, w);
  read(j, "encoder_command", c.encoder_command, w);
  if (j.contains("fitness") && !j.at("fitness").is_null()) {
    const auto& f = j.at("fitness");
    check_keys(f, {"task", "v_target"}, "fitness");
    eval::FitnessSpec spec;
    std::string task;
    read(f, "task", task, "fitness");
    spec.task = eval::fitness_task_from_string(task);
    read(f, "v_target", spec.v_target, "fitness");
    c.fitness = spec;
  }
  read(j, "sampling_temperature", c.sampling_temperature, w);
  if (j.contains("render")) {
    const auto& r = j.at("render");
    check_keys(r, {"frame_stride", "width", "height", "frame_cap"}, "render");
    read(r, "frame_stride", c.render.frame_stride, "render");
    read(r, "width", c.render.width, "render");
    read(r, "height", c.render.height, "render");
    read(r, "frame_cap", c.render.frame_cap, "render");
  }
  c.train.seed = c.seed;
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  const auto base = std::filesystem::absolute(path).parent_path();
  return run_config_from_json(j, base);
}

json run_config_to_json(const RunConfig& c) {
  json j = {
      {"mode", to_string(c.mode)},
      {"iterations", c.iterations},
      {"max_repair_attempts", c.max_repair_attempts},
      {"batch", c.effective_batch()},
      {"env", env_to_json(c.env)},
      {"train", train_to_json(c.effective_train())},
      {"upper", backend_to_json(c.upper)},
      {"lower", backend_to_json(c.lower)},
      {"expert_media", c.expert_media.string()},
      {"expert_score_program", c.expert_score_program.string()},
      {"task_description", c.task_description},
      {"creature_name", c.creature_name},
      {"seed", c.seed},
      {"encoder_command", c.encoder_command},
      {"fitness", nullptr},
      {"sampling_temperature", c.sampling_temperature},
      {"render",
       {{"frame_stride", c.render.frame_stride},
        {"width", c.render.width},
        {"height", c.render.height},
        {"frame_cap", c.render.frame_cap}}},
  };
  if (c.fitness) j["fitness"] = {{"task", eval::to_string(c.fitness->task)}, {"v_target", c.fitness->v_target}};
  return j;
}

std::string make_run_id(const RunConfig& c) {
  return fmt::format("{}-s{}-{}", to_string(c.mode), c.seed, sha256_hex(run_config_to_json(c).dump()).substr(0, 8));
}

}  // namespace rwl::orch
