#include "rwl/orch/runner.hpp"

#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "rwl/common/digest.hpp"
#include "rwl/common/files.hpp"
#include "rwl/eval/scoring.hpp"
#include "rwl/feedback/generate.hpp"
#include "rwl/lang/program.hpp"
#include "rwl/orch/repair.hpp"

namespace rwl::orch {

namespace {

constexpr std::string_view kNoneYet = "(none yet)";

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

// Thrown inside a run to end it as aborted.
struct Abort {
  std::string reason;
  int iteration = -1;
  std::vector<RepairAttempt> repairs;
};

struct Trained {
  lang::RewardProgram program;
  train::TrainResult result;
  train::Trajectory trajectory;
};

class Run {
 public:
  Run(RunConfig config, const RunnerOptions& options) : cfg_(std::move(config)), opt_(options) {
    cfg_.batch = cfg_.effective_batch();
    cfg_.train.seed = cfg_.seed;
    validate(cfg_);
    state_.id = make_run_id(cfg_);
    state_.config = cfg_;
    state_.created = opt_.clock();
    dir_ = opt_.root / state_.id;
    schema_ = env::observation_schema(cfg_.env);
    digest_ = config_digest(cfg_);

    base_.creature_name = cfg_.creature_name;
    base_.task_description = cfg_.task_description;
    base_.env_context = env::env_context_text(cfg_.env);
    base_.grammar_help = lang::grammar_help_text();
    base_.epochfreq = cfg_.train.epochfreq;
  }

  RunState execute() {
    if (cfg_.mode == Mode::Human && opt_.human_queue == nullptr) {
      throw ConfigError("human mode requires the feedback service to be running");
    }
    prepare();
    try {
      switch (cfg_.mode) {
        case Mode::Bilevel:
        case Mode::Human: run_bilevel(); break;
        case Mode::Single: run_single(); break;
        case Mode::Eureka:
        case Mode::EurekaGt: run_eureka(); break;
      }
      state_.status = RunStatus::Completed;
    } catch (const Abort& a) {
      abort(a.reason, a.iteration, a.repairs);
    } catch (const feedback::BackendError& e) {
      abort(e.what(), static_cast<int>(state_.iterations.size()), {});
    }
    persist();
    log(fmt::format("run {} {}", state_.id, to_string(state_.status)));
    return state_;
  }

 private:
  void log(const std::string& line) const {
    if (opt_.log) opt_.log(line);
  }

  void abort(std::string reason, int iteration, std::vector<RepairAttempt> repairs) {
    state_.status = RunStatus::Aborted;
    state_.abort_reason = std::move(reason);
    state_.abort_iteration = iteration;
    state_.abort_repairs = std::move(repairs);
  }

  void prepare() {
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
    if (!cfg_.expert_media.empty()) {
      expert_frames_ = env::read_frame_sequence(cfg_.expert_media);
      if (expert_frames_.empty()) throw ConfigError("expert media contains no frames");
      expert_media_ = feedback::frames_to_media(expert_frames_, "expert", static_cast<std::size_t>(cfg_.render.frame_cap));
      for (std::size_t i : feedback::sample_frame_indices(expert_frames_.size(), static_cast<std::size_t>(cfg_.render.frame_cap))) {
        expert_urls_.push_back(fmt::format("/api/runs/{}/expert/frames/{}", state_.id, i));
      }
    }
    if (!cfg_.expert_score_program.empty()) {
      expert_ = compute_expert_baseline(cfg_);
      state_.expert_score = expert_->score;
      log(fmt::format("expert score {:.6f}", expert_->score));
    }
    if (cfg_.mode == Mode::Human) {
      upper_backend_ = std::make_unique<feedback::HumanBackend>(
          *opt_.human_queue,
          std::chrono::milliseconds(static_cast<std::int64_t>(cfg_.upper.timeout_seconds * 1000.0)));
    } else if (cfg_.mode == Mode::Bilevel || cfg_.mode == Mode::Single) {
      upper_backend_ = feedback::make_backend(cfg_.upper, opt_.human_queue);
    }
    if (cfg_.mode != Mode::Single) lower_backend_ = feedback::make_backend(cfg_.lower, opt_.human_queue);
    persist();
  }

  void persist() {
    persist_run(state_, opt_.root);
    write_text_file(dir_ / "transcript.json", transcript_.to_json());
  }

  feedback::CallOptions call_options(std::string purpose, int iteration) const {
    feedback::CallOptions o;
    o.purpose = std::move(purpose);
    o.run_id = state_.id;
    o.iteration = iteration;
    o.expert_frame_urls = expert_urls_;
    return o;
  }

  SmokeTest smoke_test() const {
    return [this](const lang::RewardProgram& p) -> std::optional<std::string> {
      train::TrainConfig smoke = cfg_.effective_train();
      smoke.epochs = 1;
      smoke.epochfreq = 1;
      auto r = train::train(cfg_.env, p, smoke);
      if (!r) return r.error().message;
      return std::nullopt;
    };
  }

  // Trains the acquired program; evaluation errors during full training go
  // back through the repair loop with whatever budget remains.
  std::optional<Trained> train_acquired(RepairContext& rc, Acquired& acq) {
    while (acq.program) {
      const lang::RewardProgram program = *acq.program;
      auto result = train::train(cfg_.env, program, cfg_.effective_train());
      std::optional<std::string> error;
      if (result) {
        auto traj = train::rollout(cfg_.env, result->policy, program, cfg_.seed, cfg_.train.gamma);
        if (traj) return Trained{program, std::move(*result), std::move(*traj)};
        error = traj.error().message;
      } else {
        error = result.error().message;
      }
      const int remaining = cfg_.max_repair_attempts - static_cast<int>(acq.repairs.size());
      if (remaining <= 0) {
        acq.program.reset();
        acq.failure = fmt::format("training failed and the repair budget is exhausted: {}", *error);
        break;
      }
      Acquired fixed = repair_program(rc, acq.conversation, acq.reply, *error, remaining);
      acq.repairs.insert(acq.repairs.end(), fixed.repairs.begin(), fixed.repairs.end());
      acq.program = std::move(fixed.program);
      acq.reply = std::move(fixed.reply);
      acq.failure = std::move(fixed.failure);
    }
    return std::nullopt;
  }

  IterationRecord make_record(int index, const Trained& t, std::vector<RepairAttempt> repairs) {
    IterationRecord r;
    r.index = index;
    r.program_text = lang::print_program(t.program);
    r.policy_json = train::policy_to_json(t.result.policy, cfg_.seed, digest_);
    r.stats = t.result.stats;
    r.repairs = std::move(repairs);

    const auto idir = iteration_dir(dir_, index);
    std::filesystem::create_directories(idir);
    const std::string traj_json = trajectory_to_json(t.trajectory);
    write_text_file(idir / "trajectory.json", traj_json);
    r.trajectory_digest = sha256_hex(traj_json);

    const auto frames = render_trajectory(t.trajectory, cfg_.render);
    env::write_frame_sequence(idir / "frames", frames, cfg_.env.dt * cfg_.render.frame_stride);
    r.frames = env::read_frame_manifest(idir / "frames");
    encode_video(idir);

    if (expert_) {
      auto score = eval::expert_score(t.trajectory, expert_->program);
      if (!score) throw ConfigError(fmt::format("expert score program failed: {}", score.error().message));
      r.score = *score;
      r.normalized_score = eval::normalized_expert_score(*score, expert_->score);
    }
    r.timestamp = opt_.clock();
    learner_media_ = feedback::frames_to_media(frames, "learner", static_cast<std::size_t>(cfg_.render.frame_cap));
    learner_urls_.clear();
    for (std::size_t i : feedback::sample_frame_indices(frames.size(), static_cast<std::size_t>(cfg_.render.frame_cap))) {
      learner_urls_.push_back(fmt::format("/api/runs/{}/iterations/{}/frames/{}", state_.id, index, i));
    }
    return r;
  }

  void encode_video(const std::filesystem::path& idir) const {
    if (cfg_.encoder_command.empty()) return;
    std::string cmd = replace_all(cfg_.encoder_command, "{frames_dir}", (idir / "frames").string());
    cmd = replace_all(cmd, "{out}", (idir / "video.mp4").string());
    if (std::system(cmd.c_str()) != 0) log(fmt::format("encoder command failed: {}", cmd));
  }

  void log_record(const IterationRecord& r) const {
    if (r.normalized_score) {
      log(fmt::format("iteration {}: S = {:.6f}", r.index, *r.normalized_score));
    } else {
      log(fmt::format("iteration {} trained", r.index));
    }
  }

  void run_bilevel() {
    feedback::Session upper(*upper_backend_, "upper", transcript_);
    feedback::Session lower(*lower_backend_, "lower", transcript_);

    feedback::PromptContext ctx = base_;
    auto describe_opts = call_options("describe", 0);
    state_.description = feedback::vlm_describe(upper, expert_media_, ctx, describe_opts);
    persist();

    feedback::PromptContext llm_ctx = ctx;
    llm_ctx.task_description = fmt::format("{}\n\n{}", cfg_.task_description, state_.description);
    RepairContext rc{lower, schema_, llm_ctx, call_options("generate", 0), smoke_test()};
    Acquired acq = acquire_program(rc, feedback::initial_conversation(llm_ctx), cfg_.max_repair_attempts);

    for (int i = 0; i < cfg_.iterations; ++i) {
      auto trained = train_acquired(rc, acq);
      if (!trained) throw Abort{acq.failure, i, acq.repairs};
      IterationRecord rec = make_record(i, *trained, acq.repairs);
      state_.iterations.push_back(rec);
      persist();
      log_record(rec);
      if (i + 1 == cfg_.iterations) break;

      feedback::PromptContext review = ctx;
      review.reward_program = rec.program_text;
      review.stats_summary = train::summarize_component_stats(rec.stats);
      auto opts = call_options("review", i);
      opts.reward_text = review.reward_program;
      opts.stats_summary = review.stats_summary;
      opts.learner_frame_urls = learner_urls_;
      auto fb = feedback::vlm_review(upper, expert_media_, learner_media_, review, opts);
      state_.iterations.back().feedback = fb;
      persist();

      feedback::PromptContext next = llm_ctx;
      next.feedback = fb.raw;
      next.stats_summary = review.stats_summary;
      rc.prompt = next;
      rc.options = call_options("generate", i + 1);
      acq = acquire_program(rc, feedback::review_conversation(next, rec.program_text), cfg_.max_repair_attempts);
    }
  }

  void run_single() {
    feedback::Session upper(*upper_backend_, "upper", transcript_);
    feedback::PromptContext ctx = base_;
    ctx.reward_program = kNoneYet;
    ctx.stats_summary = kNoneYet;
    RepairContext rc{upper, schema_, ctx, call_options("generate", 0), smoke_test()};
    Acquired acq = acquire_program(rc, feedback::single_level_conversation(ctx, expert_media_, {}),
                                   cfg_.max_repair_attempts);
    for (int i = 0; i < cfg_.iterations; ++i) {
      auto trained = train_acquired(rc, acq);
      if (!trained) throw Abort{acq.failure, i, acq.repairs};
      IterationRecord rec = make_record(i, *trained, acq.repairs);
      state_.iterations.push_back(rec);
      persist();
      log_record(rec);
      if (i + 1 == cfg_.iterations) break;

      ctx.reward_program = rec.program_text;
      ctx.stats_summary = train::summarize_component_stats(rec.stats);
      rc.prompt = ctx;
      rc.options = call_options("generate", i + 1);
      acq = acquire_program(rc, feedback::single_level_conversation(ctx, expert_media_, learner_media_),
                            cfg_.max_repair_attempts);
    }
  }

  double candidate_fitness(const Trained& t) const {
    if (cfg_.mode == Mode::EurekaGt) {
      auto s = eval::expert_score(t.trajectory, expert_->program);
      if (!s) throw ConfigError(fmt::format("expert score program failed: {}", s.error().message));
      return *s;
    }
    auto f = eval::eureka_fitness(t.trajectory, *cfg_.fitness);
    if (!f) throw ConfigError(fmt::format("fitness expression failed: {}", f.error().message));
    return *f;
  }

  void run_eureka() {
    feedback::Session lower(*lower_backend_, "lower", transcript_);
    feedback::PromptContext ctx = base_;
    const int k = cfg_.effective_batch();
    std::vector<feedback::ChatTurn> conversation = feedback::initial_conversation(ctx);

    for (int i = 0; i < cfg_.iterations; ++i) {
      std::vector<CandidateRecord> candidates;
      std::vector<std::optional<Trained>> trained(static_cast<std::size_t>(k));
      std::vector<double> fitness(static_cast<std::size_t>(k), -std::numeric_limits<double>::infinity());
      for (int c = 0; c < k; ++c) {
        RepairContext rc{lower, schema_, ctx, call_options("candidate", i), smoke_test()};
        rc.options.temperature = cfg_.sampling_temperature;
        Acquired acq = acquire_program(rc, conversation, cfg_.max_repair_attempts);
        auto t = train_acquired(rc, acq);
        CandidateRecord cand;
        cand.index = c;
        cand.repairs = acq.repairs;
        if (t) {
          cand.program_text = lang::print_program(t->program);
          fitness[static_cast<std::size_t>(c)] = candidate_fitness(*t);
          cand.fitness = fitness[static_cast<std::size_t>(c)];
          trained[static_cast<std::size_t>(c)] = std::move(t);
        } else {
          cand.error = acq.failure;
        }
        candidates.push_back(std::move(cand));
      }
      bool any = false;
      for (const auto& t : trained) any = any || t.has_value();
      if (!any) throw Abort{fmt::format("all {} candidates failed in iteration {}", k, i), i, {}};

      const std::size_t best = eval::select_best(fitness);
      const Trained& winner = *trained[best];
      IterationRecord rec = make_record(i, winner, candidates[best].repairs);
      rec.candidates = std::move(candidates);
      rec.selected = static_cast<int>(best);
      rec.fitness = fitness[best];
      state_.iterations.push_back(rec);
      persist();
      log(fmt::format("iteration {}: selected candidate {} (fitness {:.6f})", i, best, fitness[best]));
      if (i + 1 == cfg_.iterations) break;

      feedback::PromptContext next = ctx;
      next.feedback = fmt::format(
          "The reward function above was the best of {} sampled reward functions, reaching a task fitness of "
          "{:#.6g}. Improve it using the component values below.",
          k, fitness[best]);
      next.stats_summary = train::summarize_component_stats(rec.stats);
      conversation = feedback::review_conversation(next, rec.program_text);
    }
  }

  RunConfig cfg_;
  const RunnerOptions& opt_;
  RunState state_;
  std::filesystem::path dir_;
  ObservationSchema schema_;
  std::string digest_;
  feedback::PromptContext base_;
  feedback::Transcript transcript_;
  std::unique_ptr<feedback::Backend> upper_backend_;
  std::unique_ptr<feedback::Backend> lower_backend_;
  std::vector<env::Frame> expert_frames_;
  std::vector<feedback::Media> expert_media_;
  std::vector<std::string> expert_urls_;
  std::vector<feedback::Media> learner_media_;
  std::vector<std::string> learner_urls_;
  std::optional<ExpertBaseline> expert_;
};

}  // namespace

std::string config_digest(const RunConfig& config) { return sha256_hex(run_config_to_json(config).dump()); }

ExpertBaseline compute_expert_baseline(const RunConfig& config) {
  const auto path = config.expert_score_program;
  auto program = lang::parse_program(read_text_file(path));
  if (!program) throw ConfigError(fmt::format("{}: {}", path.string(), program.error().message));
  if (auto err = lang::validate_program(*program, env::observation_schema(config.env))) {
    throw ConfigError(fmt::format("{}: {}", path.string(), err->message));
  }
  auto result = train::train(config.env, *program, config.effective_train());
  if (!result) throw ConfigError(fmt::format("{}: {}", path.string(), result.error().message));
  auto traj = train::rollout(config.env, result->policy, *program, config.seed, config.train.gamma);
  if (!traj) throw ConfigError(fmt::format("{}: {}", path.string(), traj.error().message));
  auto score = eval::expert_score(*traj, *program);
  if (!score) throw ConfigError(fmt::format("{}: {}", path.string(), score.error().message));
  if (!(*score > 0.0)) {
    throw ConfigError(fmt::format("{}: expert-tuned score is {}, but must be positive", path.string(), *score));
  }
  return {std::move(*program), result->policy, std::move(*traj), *score};
}

std::vector<env::Frame> render_trajectory(const train::Trajectory& trajectory, const RenderConfig& render) {
  std::vector<env::Frame> frames;
  frames.push_back(env::render_frame(trajectory.initial, render.width, render.height));
  for (std::size_t s = 0; s < trajectory.steps.size(); ++s) {
    if ((s + 1) % static_cast<std::size_t>(render.frame_stride) == 0) {
      frames.push_back(env::render_frame(trajectory.steps[s].state, render.width, render.height));
    }
  }
  return frames;
}

RunState execute_run(RunConfig config, const RunnerOptions& options) {
  Run run(std::move(config), options);
  return run.execute();
}

}  // namespace rwl::orch
