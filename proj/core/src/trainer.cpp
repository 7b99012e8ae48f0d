#include "flatgrasp/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "flatgrasp/error.hpp"
#include "flatgrasp/rng.hpp"

namespace flatgrasp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kUpdateStream = 0x0bda7e;
constexpr std::uint64_t kEvalStream = 0xe7a1;

class Window {
 public:
  Window(std::size_t capacity, const std::vector<int>& initial) : capacity_(capacity) {
    for (int r : initial) push(r);
  }
  void push(int r) {
    values_.push_back(r);
    sum_ += r;
    if (values_.size() > capacity_) {
      sum_ -= values_.front();
      values_.pop_front();
    }
  }
  double mean() const { return values_.empty() ? 0.0 : static_cast<double>(sum_) / values_.size(); }
  std::vector<int> values() const { return {values_.begin(), values_.end()}; }

 private:
  std::size_t capacity_;
  std::deque<int> values_;
  long long sum_ = 0;
};

std::ofstream open_stream(const fs::path& path, bool append, const json& header) {
  fs::create_directories(path.parent_path());
  const bool fresh = !append || !fs::exists(path);
  std::ofstream out(path, fresh ? std::ios::trunc : std::ios::app);
  if (!out) throw Error("cannot open " + path.string());
  if (fresh) out << dump_line(header) << '\n';
  return out;
}

std::string checkpoint_name(std::uint64_t episode) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "checkpoint_%08llu.fgsp", static_cast<unsigned long long>(episode));
  return buf;
}

bool crossed(std::uint64_t before, std::uint64_t after, std::uint64_t every) {
  return every > 0 && before / every != after / every;
}

struct LoopHooks {
  std::function<void(const RolloutBatch&)> on_batch;
  std::function<void(const UpdateMetrics&, const Agent&, const TrainState&)> on_update;
  std::function<std::optional<double>(const Agent&)> eval;
};

void run_loop(const EpisodeSource& source, const RunConfig& config, Agent& agent, TrainState& state,
              const LoopHooks& hooks, std::vector<UpdateMetrics>& metrics) {
  Window window(static_cast<std::size_t>(config.trailing_window), state.window);
  const std::uint64_t batch = static_cast<std::uint64_t>(config.ppo.batch_size);
  while (state.episode < config.total_episodes) {
    const std::uint64_t n = std::min(batch, config.total_episodes - state.episode);
    const auto snapshot = agent.snapshot();
    const RolloutBatch rb = rollout(source, *snapshot, n, config.seed, config.workers, false, state.episode);
    if (hooks.on_batch) hooks.on_batch(rb);

    UpdateMetrics m;
    if (n >= static_cast<std::uint64_t>(config.ppo.minibatch_size)) {
      m.loss = ppo_update(agent, rb.transitions, config.ppo, hash_seed(config.seed, {kUpdateStream, state.update}),
                          config.workers);
      ++state.update;
    }
    int successes = 0;
    for (const Transition& t : rb.transitions) {
      successes += t.reward;
      window.push(t.reward);
    }
    const std::uint64_t before = state.episode;
    state.episode += n;
    state.window = window.values();
    m.episode = state.episode;
    m.update = state.update;
    m.batch_success = static_cast<double>(successes) / static_cast<double>(n);
    m.trailing_success = window.mean();
    if (hooks.eval && (crossed(before, state.episode, config.eval_every) || state.episode == config.total_episodes) &&
        config.eval_every > 0)
      m.eval_success = hooks.eval(agent);
    metrics.push_back(m);
    if (hooks.on_update) hooks.on_update(m, agent, state);
  }
}

std::unique_ptr<Agent> fresh_agent(const RunConfig& config) {
  return std::make_unique<Agent>(effective_backbone(config), effective_policy(config), config.ppo);
}

}  // namespace

json to_json(const UpdateMetrics& m) {
  return {{"episode", m.episode},
          {"update", m.update},
          {"batch_success", m.batch_success},
          {"trailing_success", m.trailing_success},
          {"policy_loss", m.loss.policy_loss},
          {"value_loss", m.loss.value_loss},
          {"entropy", m.loss.entropy},
          {"clip_fraction", m.loss.clip_fraction},
          {"approx_kl", m.loss.approx_kl},
          {"grad_norm", m.loss.grad_norm},
          {"eval_success", m.eval_success ? json(*m.eval_success) : json(nullptr)}};
}

TrainResult train(const RunConfig& config, const TrainOptions& options) {
  validate(config);
  TrainResult result;
  if (options.resume) {
    Checkpoint ck = load_checkpoint(*options.resume);
    if (!same_architecture(ck.agent->backbone().config(), effective_backbone(config)) ||
        !same_architecture(ck.agent->policy().config(), effective_policy(config)))
      throw FormatError("checkpoint architecture does not match the run config");
    result.agent = std::move(ck.agent);
    result.state = std::move(ck.state);
  } else {
    result.agent = fresh_agent(config);
  }
  Agent& agent = *result.agent;

  const fs::path dir = config.output_dir;
  std::ofstream metrics_out, records_out;
  if (options.write_files) {
    fs::create_directories(dir);
    write_text_file(dir / "config.json", to_json(config).dump(2) + "\n");
    metrics_out = open_stream(dir / "metrics.jsonl", options.resume.has_value(), metrics_header());
    if (config.record_episodes)
      records_out = open_stream(dir / "episodes.jsonl", options.resume.has_value(), records_header());
  }

  const GraspSource source(config.env, agent.backbone().trainable());
  std::optional<GraspSource> eval_source;
  if (config.eval_every > 0) {
    EnvConfig ec = config.env;
    ec.evaluation = true;
    eval_source.emplace(ec, false);
  }

  LoopHooks hooks;
  if (config.record_episodes && options.write_files)
    hooks.on_batch = [&](const RolloutBatch& rb) {
      for (const EpisodeRecord& r : rb.records) records_out << dump_line(to_json(r)) << '\n';
    };
  if (eval_source)
    hooks.eval = [&](const Agent& a) {
      const auto snap = a.snapshot();
      const RolloutBatch rb = rollout(*eval_source, *snap, config.eval_episodes, hash_seed(config.seed, {kEvalStream}),
                                      config.workers, true);
      int s = 0;
      for (const Transition& t : rb.transitions) s += t.reward;
      return static_cast<double>(s) / static_cast<double>(config.eval_episodes);
    };
  hooks.on_update = [&](const UpdateMetrics& m, const Agent& a, const TrainState& st) {
    if (options.write_files) {
      metrics_out << dump_line(to_json(m)) << '\n';
      metrics_out.flush();
      if (crossed(m.episode - std::min<std::uint64_t>(m.episode, static_cast<std::uint64_t>(config.ppo.batch_size)),
                  m.episode, config.checkpoint_every) &&
          m.episode < config.total_episodes)
        save_checkpoint(dir / checkpoint_name(m.episode), a, config, st);
    }
    if (options.on_update) options.on_update(m);
  };

  run_loop(source, config, agent, result.state, hooks, result.metrics);

  if (options.write_files) {
    result.final_checkpoint = dir / "final.fgsp";
    save_checkpoint(result.final_checkpoint, agent, config, result.state);
  }
  return result;
}

TrainResult train_on(const EpisodeSource& source, const RunConfig& config,
                     const std::function<void(const UpdateMetrics&)>& on_update) {
  validate(config);
  TrainResult result;
  result.agent = fresh_agent(config);
  LoopHooks hooks;
  if (on_update) hooks.on_update = [&](const UpdateMetrics& m, const Agent&, const TrainState&) { on_update(m); };
  run_loop(source, config, *result.agent, result.state, hooks, result.metrics);
  return result;
}

EvalReport evaluate_policy(const PolicySnapshot& snapshot, const EnvConfig& env,
                           const std::vector<ObjectModel>& objects, const EvalOptions& options,
                           std::vector<EpisodeRecord>* records) {
  if (options.runs < 1) throw InvalidArgument("runs per object must be >= 1");
  if (objects.empty()) throw InvalidArgument("object set is empty");
  EnvConfig ec = env;
  ec.evaluation = true;
  const ObjectSetSource source(ec, objects, options.runs);
  const std::size_t n = objects.size() * static_cast<std::size_t>(options.runs);
  RolloutBatch rb = rollout(source, snapshot, n, options.seed, options.workers, true);

  EvalReport report;
  report.seed = options.seed;
  std::map<Family, int> family_count, family_seen;
  for (const ObjectModel& o : objects) ++family_count[o.family];
  for (std::size_t k = 0; k < objects.size(); ++k) {
    ObjectResult r;
    r.object = objects[k];
    r.id = std::string(family_tag(objects[k].family));
    if (family_count[objects[k].family] > 1) r.id += "#" + std::to_string(++family_seen[objects[k].family]);
    r.runs = options.runs;
    for (int i = 0; i < options.runs; ++i) r.successes += rb.transitions[k * options.runs + i].reward;
    r.mean_percent = 100.0 * r.successes / r.runs;
    report.objects.push_back(std::move(r));
  }
  double sum = 0.0;
  for (const ObjectResult& r : report.objects) sum += r.mean_percent;
  report.all_percent = sum / static_cast<double>(report.objects.size());
  if (records) *records = std::move(rb.records);
  return report;
}

json to_json(const EvalReport& report) {
  json objs = json::array();
  for (const ObjectResult& r : report.objects)
    objs.push_back({{"id", r.id},
                    {"object", to_json(r.object)},
                    {"runs", r.runs},
                    {"successes", r.successes},
                    {"mean_percent", r.mean_percent}});
  return {{"objects", objs},
          {"all_percent", report.all_percent},
          {"config_hash", report.config_hash},
          {"checkpoint_id", report.checkpoint_id},
          {"seed", report.seed}};
}

std::string format_table(const EvalReport& report, const std::string& row_label) {
  std::vector<std::string> head{"Method"}, row{row_label};
  char buf[32];
  for (const ObjectResult& r : report.objects) {
    head.push_back(r.id);
    std::snprintf(buf, sizeof buf, "%.1f", r.mean_percent);
    row.push_back(buf);
  }
  head.push_back("All");
  std::snprintf(buf, sizeof buf, "%.1f", report.all_percent);
  row.push_back(buf);
  std::ostringstream out;
  for (const auto* line : {&head, &row}) {
    for (std::size_t i = 0; i < head.size(); ++i) {
      const std::size_t w = std::max(head[i].size(), row[i].size());
      std::string cell = (*line)[i];
      cell.resize(w, ' ');
      out << cell << (i + 1 < head.size() ? "  " : "");
    }
    out << '\n';
  }
  return out.str();
}

const std::vector<AblationVariant>& ablation_variants() {
  static const std::vector<AblationVariant> v{
      {"fixed-shared", "Fixed Backbone + Shared AC", BackboneMode::kFixed, AcMode::kShared},
      {"fixed-independent", "Fixed Backbone + Independent AC", BackboneMode::kFixed, AcMode::kIndependent},
      {"adaptive-shared", "Adaptive Backbone + Shared AC", BackboneMode::kAdaptive, AcMode::kShared},
      {"adaptive-independent", "Adaptive Backbone + Independent AC", BackboneMode::kAdaptive, AcMode::kIndependent},
  };
  return v;
}

AblationResult run_ablation(const RunConfig& base, const TrainOptions& options) {
  validate(base);
  AblationResult result;
  for (const AblationVariant& v : ablation_variants()) {
    RunConfig c = base;
    c.backbone.mode = v.backbone;
    c.policy.ac_mode = v.ac;
    c.output_dir = (fs::path(base.output_dir) / v.key).string();
    TrainOptions o;
    o.write_files = options.write_files;
    o.on_update = options.on_update;
    TrainResult r = train(c, o);
    AblationResult::Entry e;
    e.variant = v;
    e.final_trailing_success = r.metrics.empty() ? 0.0 : r.metrics.back().trailing_success;
    e.curve = std::move(r.metrics);
    e.output_dir = c.output_dir;
    result.entries.push_back(std::move(e));
  }
  if (options.write_files) {
    const fs::path dir = base.output_dir;
    write_text_file(dir / "summary.json", to_json(result).dump(2) + "\n");
    write_text_file(dir / "summary.txt", format_ablation_table(result));
  }
  return result;
}

json to_json(const AblationResult& result) {
  json variants = json::array();
  for (const auto& e : result.entries) {
    json curve = json::array();
    for (const UpdateMetrics& m : e.curve) curve.push_back({m.episode, m.trailing_success});
    variants.push_back({{"key", e.variant.key},
                        {"label", e.variant.label},
                        {"backbone", backbone_mode_name(e.variant.backbone)},
                        {"ac_mode", ac_mode_name(e.variant.ac)},
                        {"final_trailing_success", e.final_trailing_success},
                        {"metrics", (e.output_dir / "metrics.jsonl").generic_string()},
                        {"curve", curve}});
  }
  return {{"variants", variants}};
}

std::string format_ablation_table(const AblationResult& result) {
  std::size_t w = 7;
  for (const auto& e : result.entries) w = std::max(w, e.variant.label.size());
  std::ostringstream out;
  std::string h = "Variant";
  h.resize(w, ' ');
  out << h << "  Final trailing success\n";
  char buf[32];
  for (const auto& e : result.entries) {
    std::string l = e.variant.label;
    l.resize(w, ' ');
    std::snprintf(buf, sizeof buf, "%.3f", e.final_trailing_success);
    out << l << "  " << buf << '\n';
  }
  return out.str();
}

}  // namespace flatgrasp
