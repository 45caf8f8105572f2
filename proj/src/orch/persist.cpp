#include <algorithm>

#include <fmt/format.h>
#include <json.hpp>

#include "rwl/common/files.hpp"
#include "rwl/feedback/prompts.hpp"
#include "rwl/orch/state.hpp"

namespace rwl::orch {

namespace {

using nlohmann::json;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_double(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}
std::optional<std::string> opt_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

json repairs_to_json(const std::vector<RepairAttempt>& repairs) {
  json arr = json::array();
  for (const auto& r : repairs) {
    arr.push_back({{"prompt", r.prompt}, {"error", r.error}, {"reply", r.reply}, {"outcome", r.outcome}});
  }
  return arr;
}

std::vector<RepairAttempt> repairs_from_json(const json& arr) {
  std::vector<RepairAttempt> out;
  for (const auto& r : arr) {
    out.push_back({r.at("prompt").get<std::string>(), r.at("error").get<std::string>(),
                   r.at("reply").get<std::string>(), r.at("outcome").get<std::string>()});
  }
  return out;
}

json state_to_json(const env::EnvState& s) {
  return {{"x", s.x},       {"z", s.z},
          {"vx", s.vx},     {"vz", s.vz},
          {"pitch", s.pitch}, {"ang_vel", s.ang_vel},
          {"prev_action", {s.prev_action.thrust, s.prev_action.torque}}, {"step", s.step}};
}

env::EnvState state_from_json(const json& j) {
  env::EnvState s;
  s.x = j.at("x").get<double>();
  s.z = j.at("z").get<double>();
  s.vx = j.at("vx").get<double>();
  s.vz = j.at("vz").get<double>();
  s.pitch = j.at("pitch").get<double>();
  s.ang_vel = j.at("ang_vel").get<double>();
  s.prev_action = {j.at("prev_action").at(0).get<double>(), j.at("prev_action").at(1).get<double>()};
  s.step = j.at("step").get<int>();
  return s;
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string strip_newline(std::string s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

void persist_iteration(const IterationRecord& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "reward.rwd", r.program_text + "\n");
  if (!r.policy_json.empty()) write_text_file(dir / "policy.json", r.policy_json);
  write_text_file(dir / "stats.json", train::stats_to_json(r.stats));
  write_text_file(dir / "score.json",
                  dump({{"score", opt(r.score)}, {"normalized_score", opt(r.normalized_score)},
                        {"fitness", opt(r.fitness)}}));
  if (r.feedback) {
    const auto& f = *r.feedback;
    write_text_file(dir / "feedback.json", dump({{"raw", f.raw},
                                                 {"problems", opt(f.problems)},
                                                 {"rewrite_component", opt(f.rewrite_component)},
                                                 {"remove_component", opt(f.remove_component)},
                                                 {"new_component", opt(f.new_component)}}));
  }
  write_text_file(dir / "repairs.json", dump(repairs_to_json(r.repairs)));
  if (!r.candidates.empty()) {
    json arr = json::array();
    for (const auto& c : r.candidates) {
      arr.push_back({{"index", c.index},
                     {"program", c.program_text},
                     {"fitness", opt(c.fitness)},
                     {"error", c.error},
                     {"repairs", repairs_to_json(c.repairs)}});
    }
    write_text_file(dir / "candidates.json", dump(arr));
  }
  write_text_file(dir / "record.json",
                  dump({{"index", r.index},
                        {"timestamp", r.timestamp},
                        {"trajectory_digest", r.trajectory_digest},
                        {"selected", r.selected ? json(*r.selected) : json(nullptr)},
                        {"frames",
                         {{"count", r.frames.count},
                          {"dt", r.frames.dt},
                          {"width", r.frames.width},
                          {"height", r.frames.height}}}}));
}

IterationRecord load_iteration(const std::filesystem::path& dir) {
  IterationRecord r;
  const json rec = read_json(dir / "record.json");
  try {
    r.index = rec.at("index").get<int>();
    r.timestamp = rec.at("timestamp").get<std::string>();
    r.trajectory_digest = rec.at("trajectory_digest").get<std::string>();
    if (!rec.at("selected").is_null()) r.selected = rec.at("selected").get<int>();
    const auto& fr = rec.at("frames");
    r.frames = {fr.at("count").get<int>(), fr.at("dt").get<double>(), fr.at("width").get<int>(),
                fr.at("height").get<int>()};
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}: {}", (dir / "record.json").string(), e.what()));
  }
  r.program_text = strip_newline(read_text_file(dir / "reward.rwd"));
  if (std::filesystem::exists(dir / "policy.json")) r.policy_json = read_text_file(dir / "policy.json");
  r.stats = train::stats_from_json(read_text_file(dir / "stats.json"));
  const json score = read_json(dir / "score.json");
  r.score = opt_double(score, "score");
  r.normalized_score = opt_double(score, "normalized_score");
  r.fitness = opt_double(score, "fitness");
  if (std::filesystem::exists(dir / "feedback.json")) {
    const json f = read_json(dir / "feedback.json");
    feedback::FeedbackRecord fb;
    fb.raw = f.at("raw").get<std::string>();
    fb.problems = opt_string(f, "problems");
    fb.rewrite_component = opt_string(f, "rewrite_component");
    fb.remove_component = opt_string(f, "remove_component");
    fb.new_component = opt_string(f, "new_component");
    r.feedback = fb;
  }
  try {
    r.repairs = repairs_from_json(read_json(dir / "repairs.json"));
    if (std::filesystem::exists(dir / "candidates.json")) {
      for (const auto& c : read_json(dir / "candidates.json")) {
        r.candidates.push_back({c.at("index").get<int>(), c.at("program").get<std::string>(),
                                opt_double(c, "fitness"), c.at("error").get<std::string>(),
                                repairs_from_json(c.at("repairs"))});
      }
    }
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}: {}", dir.string(), e.what()));
  }
  return r;
}

}  // namespace

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Running: return "running";
    case RunStatus::Completed: return "completed";
    case RunStatus::Aborted: return "aborted";
  }
  return "?";
}

std::filesystem::path iteration_dir(const std::filesystem::path& run_dir, int index) {
  return run_dir / fmt::format("iter_{}", index);
}

std::string report_json(const RunState& s) {
  json iters = json::array();
  for (const auto& r : s.iterations) {
    iters.push_back({{"index", r.index},
                     {"score", opt(r.score)},
                     {"normalized_score", opt(r.normalized_score)},
                     {"fitness", opt(r.fitness)}});
  }
  json fitness = nullptr;
  if (s.config.fitness) {
    fitness = {{"task", eval::to_string(s.config.fitness->task)},
               {"expression", eval::fitness_program_text(*s.config.fitness)}};
  }
  json j = {
      {"run_id", s.id},
      {"mode", to_string(s.config.mode)},
      {"status", to_string(s.status)},
      {"abort_reason", s.abort_reason},
      {"abort_iteration", s.abort_iteration},
      {"abort_repairs", repairs_to_json(s.abort_repairs)},
      {"expert_score", opt(s.expert_score)},
      {"created", s.created},
      {"iterations", iters},
      {"final_program", s.iterations.empty() ? json(nullptr) : json(s.iterations.back().program_text)},
      {"template_version", feedback::kTemplateVersion},
      {"fitness", fitness},
  };
  return dump(j);
}

void persist_run(const RunState& s, const std::filesystem::path& root) {
  const auto dir = root / s.id;
  std::filesystem::create_directories(dir);
  write_text_file(dir / "config.json", dump(run_config_to_json(s.config)));
  write_text_file(dir / "description.txt", s.description);
  for (const auto& r : s.iterations) persist_iteration(r, iteration_dir(dir, r.index));
  if (s.status == RunStatus::Aborted && s.abort_iteration >= 0 && !s.abort_repairs.empty()) {
    const auto adir = iteration_dir(dir, s.abort_iteration);
    std::filesystem::create_directories(adir);
    write_text_file(adir / "repairs.json", dump(repairs_to_json(s.abort_repairs)));
  }
  write_text_file(dir / "report.json", report_json(s));
}

RunState load_run(const std::filesystem::path& root, const std::string& id) {
  const auto dir = root / id;
  if (!std::filesystem::is_directory(dir)) throw IoError(fmt::format("{}: no such run", dir.string()));
  RunState s;
  s.id = id;
  try {
    s.config = run_config_from_json(read_json(dir / "config.json"), dir);
  } catch (const ConfigError& e) {
    throw IoError(fmt::format("{}: {}", (dir / "config.json").string(), e.what()));
  }
  s.description = read_text_file(dir / "description.txt");
  const json report = read_json(dir / "report.json");
  try {
    const std::string status = report.at("status").get<std::string>();
    s.status = status == "completed" ? RunStatus::Completed
               : status == "aborted" ? RunStatus::Aborted
                                     : RunStatus::Running;
    s.abort_reason = report.at("abort_reason").get<std::string>();
    s.abort_iteration = report.at("abort_iteration").get<int>();
    s.abort_repairs = repairs_from_json(report.at("abort_repairs"));
    s.expert_score = opt_double(report, "expert_score");
    s.created = report.at("created").get<std::string>();
    for (const auto& it : report.at("iterations")) {
      s.iterations.push_back(load_iteration(iteration_dir(dir, it.at("index").get<int>())));
    }
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}: {}", (dir / "report.json").string(), e.what()));
  }
  return s;
}

std::vector<std::string> list_runs(const std::filesystem::path& root) {
  std::vector<std::string> out;
  if (!std::filesystem::is_directory(root)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "config.json")) {
      out.push_back(entry.path().filename().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string trajectory_to_json(const train::Trajectory& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    const auto obs = s.observation.values();
    steps.push_back({{"state", state_to_json(s.state)},
                     {"action", {s.action.thrust, s.action.torque}},
                     {"observation", obs},
                     {"components", s.components},
                     {"total", s.total}});
  }
  json j = {{"initial", state_to_json(t.initial)},
            {"component_names", t.component_names},
            {"discounted_return", t.discounted_return},
            {"steps", steps}};
  return j.dump() + "\n";
}

train::Trajectory trajectory_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    train::Trajectory t;
    t.initial = state_from_json(j.at("initial"));
    t.component_names = j.at("component_names").get<std::vector<std::string>>();
    t.discounted_return = j.at("discounted_return").get<double>();
    for (const auto& sj : j.at("steps")) {
      train::TrajectoryStep s;
      s.state = state_from_json(sj.at("state"));
      s.action = {sj.at("action").at(0).get<double>(), sj.at("action").at(1).get<double>()};
      const auto o = sj.at("observation").get<std::vector<double>>();
      if (o.size() != env::kChannelCount) throw IoError("trajectory: observation has the wrong width");
      s.observation = {o[0], o[1], o[2], o[3], o[4], o[5], o[6], o[7], o[8]};
      s.components = sj.at("components").get<std::vector<double>>();
      s.total = sj.at("total").get<double>();
      t.steps.push_back(std::move(s));
    }
    return t;
  } catch (const json::exception& e) {
    throw IoError(fmt::format("trajectory: {}", e.what()));
  }
}

}  // namespace rwl::orch
