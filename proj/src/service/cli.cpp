#include "rwl/service/cli.hpp"

#include <CLI11.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "rwl/common/files.hpp"
#include "rwl/eval/scoring.hpp"
#include "rwl/feedback/backend.hpp"
#include "rwl/orch/runner.hpp"
#include "rwl/service/server.hpp"

namespace rwl::service {

namespace {

struct Flags {
  std::string config;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::string run_id;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string root = "runs";
  std::string clock = "system";
  std::string expert_score;
  std::optional<int> iteration;
  std::string out;
  std::string program;
};

Clock make_clock(const std::string& name) {
  if (name == "fixed") return fixed_clock();
  if (name == "system") return system_clock();
  throw ConfigError(fmt::format("unknown clock '{}' (expected fixed or system)", name));
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : std::string("-"); }

int cmd_run(const Flags& f, std::ostream& out, std::ostream& err) {
  orch::RunConfig cfg = orch::load_run_config(f.config);
  if (!f.mode.empty()) cfg.mode = orch::mode_from_string(f.mode);
  if (f.seed) cfg.seed = *f.seed;

  orch::RunnerOptions opts;
  opts.root = f.root;
  opts.clock = make_clock(f.clock);
  opts.log = [&err](const std::string& line) { err << line << '\n'; };

  feedback::HumanFeedbackQueue queue;
  std::unique_ptr<ApiServer> server;
  if (cfg.mode == orch::Mode::Human) {
    opts.human_queue = &queue;
    server = std::make_unique<ApiServer>(opts.root, &queue, opts.clock);
    const int port = server->start(f.host, f.port);
    err << fmt::format("feedback service listening on http://{}:{}\n", f.host, port);
  }
  const orch::RunState state = orch::execute_run(cfg, opts);
  if (server) server->stop();

  out << fmt::format("run {}\n", state.id);
  if (state.status == orch::RunStatus::Aborted) {
    out << fmt::format("aborted: {}\n", state.abort_reason);
    return kExitAborted;
  }
  const auto& last = state.iterations.back();
  out << fmt::format("S = {}\n", fmt_opt(last.normalized_score));
  return kExitOk;
}

int cmd_eval(const Flags& f, std::ostream& out) {
  const orch::RunState state = orch::load_run(f.root, f.run_id);
  if (state.iterations.empty()) throw ConfigError(fmt::format("run '{}' has no trained iterations", f.run_id));
  const int k = f.iteration.value_or(state.iterations.back().index);
  const auto traj =
      orch::trajectory_from_json(read_text_file(orch::iteration_dir(std::filesystem::path(f.root) / f.run_id, k) /
                                                "trajectory.json"));
  orch::RunConfig cfg = state.config;
  cfg.expert_score_program = std::filesystem::absolute(f.expert_score);
  const orch::ExpertBaseline expert = orch::compute_expert_baseline(cfg);
  auto score = eval::expert_score(traj, expert.program);
  if (!score) throw ConfigError(score.error().message);
  out << fmt::format("iteration {}: score {:.6f}, expert {:.6f}\n", k, *score, expert.score);
  out << fmt::format("S = {:.6f}\n", eval::normalized_expert_score(*score, expert.score));
  return kExitOk;
}

int cmd_report(const Flags& f, std::ostream& out) {
  const orch::RunState state = orch::load_run(f.root, f.run_id);
  out << fmt::format("run {} ({}, {})\n", state.id, orch::to_string(state.config.mode), orch::to_string(state.status));
  out << fmt::format("{:<10} {:>14} {:>10} {:>12}\n", "iteration", "score", "S", "fitness");
  for (const auto& r : state.iterations) {
    out << fmt::format("{:<10} {:>14} {:>10} {:>12}\n", r.index, fmt_opt(r.score), fmt_opt(r.normalized_score),
                       fmt_opt(r.fitness));
  }
  if (state.status == orch::RunStatus::Aborted) out << fmt::format("aborted: {}\n", state.abort_reason);
  return kExitOk;
}

int cmd_serve(const Flags& f, std::ostream& err) {
  ApiServer server(f.root, nullptr, make_clock(f.clock));
  err << fmt::format("serving {} on http://{}:{}\n", f.root, f.host, f.port);
  server.serve(f.host, f.port);
  return kExitOk;
}

int cmd_replay(const Flags& f, std::ostream& out) {
  if (!f.program.empty()) {
    // Train the given program and write its rollout as a frame sequence,
    // e.g. to produce expert media.
    if (f.config.empty() || f.out.empty()) throw ConfigError("replay --program needs --config and --out");
    orch::RunConfig cfg = orch::load_run_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    cfg.expert_score_program = std::filesystem::absolute(f.program);
    const orch::ExpertBaseline base = orch::compute_expert_baseline(cfg);
    const auto frames = orch::render_trajectory(base.trajectory, cfg.render);
    env::write_frame_sequence(f.out, frames, cfg.env.dt * cfg.render.frame_stride);
    write_text_file(std::filesystem::path(f.out) / "trajectory.json", orch::trajectory_to_json(base.trajectory));
    out << fmt::format("wrote {} frames to {} (score {:.6f})\n", frames.size(), f.out, base.score);
    return kExitOk;
  }
  const orch::RunState state = orch::load_run(f.root, f.run_id);
  if (state.iterations.empty()) throw ConfigError(fmt::format("run '{}' has no trained iterations", f.run_id));
  const int k = f.iteration.value_or(state.iterations.back().index);
  const auto idir = orch::iteration_dir(std::filesystem::path(f.root) / f.run_id, k);
  const auto traj = orch::trajectory_from_json(read_text_file(idir / "trajectory.json"));
  const auto frames = orch::render_trajectory(traj, state.config.render);
  const std::filesystem::path dest = f.out.empty() ? idir / "frames_replay" : std::filesystem::path(f.out);
  env::write_frame_sequence(dest, frames, state.config.env.dt * state.config.render.frame_stride);
  out << fmt::format("wrote {} frames to {}\n", frames.size(), dest.string());
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reward learning with language-model feedback"};
  app.require_subcommand(1);
  Flags f;

  auto* run = app.add_subcommand("run", "Execute a configured run");
  run->add_option("--config", f.config, "Run config (JSON)")->required();
  run->add_option("--mode", f.mode, "Override the configured mode");
  run->add_option("--seed", f.seed, "Override the configured seed");
  run->add_option("--root", f.root, "Runs directory");
  run->add_option("--clock", f.clock, "Timestamp source: system or fixed");
  run->add_option("--port", f.port, "Feedback service port (human mode)");
  run->add_option("--host", f.host, "Feedback service host (human mode)");

  auto* ev = app.add_subcommand("eval", "Recompute S for a stored run");
  ev->add_option("--run,--run-id", f.run_id, "Run id")->required();
  ev->add_option("--expert-score", f.expert_score, "Expert score program (.rwd)")->required();
  ev->add_option("--iteration", f.iteration, "Iteration (default: last)");
  ev->add_option("--root", f.root, "Runs directory");

  auto* rep = app.add_subcommand("report", "Per-iteration score table");
  rep->add_option("--run,--run-id", f.run_id, "Run id")->required();
  rep->add_option("--root", f.root, "Runs directory");

  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--root", f.root, "Runs directory");
  serve->add_option("--port", f.port, "Port");
  serve->add_option("--host", f.host, "Host");
  serve->add_option("--clock", f.clock, "Timestamp source: system or fixed");

  auto* replay = app.add_subcommand("replay", "Re-render frames from a stored trajectory");
  replay->add_option("--run,--run-id", f.run_id, "Run id");
  replay->add_option("--iteration", f.iteration, "Iteration (default: last)");
  replay->add_option("--root", f.root, "Runs directory");
  replay->add_option("--out", f.out, "Output frame directory");
  replay->add_option("--program", f.program, "Train this program instead and render its rollout");
  replay->add_option("--config", f.config, "Run config for --program");
  replay->add_option("--seed", f.seed, "Seed override for --program");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << fmt::format("error: {}\n", e.what());
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(f, out, err);
    if (*ev) return cmd_eval(f, out);
    if (*rep) return cmd_report(f, out);
    if (*serve) return cmd_serve(f, err);
    if (*replay) {
      if (f.program.empty() && f.run_id.empty()) throw ConfigError("replay needs --run or --program");
      return cmd_replay(f, out);
    }
  } catch (const ConfigError& e) {
    err << fmt::format("config error: {}\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    err << fmt::format("error: {}\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace rwl::service
