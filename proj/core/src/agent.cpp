#include "flatgrasp/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "flatgrasp/error.hpp"
#include "flatgrasp/parallel.hpp"
#include "flatgrasp/rng.hpp"

namespace flatgrasp {

std::string_view backbone_mode_name(BackboneMode m) {
  return m == BackboneMode::kFixed ? "fixed" : "adaptive";
}

BackboneMode parse_backbone_mode(std::string_view name) {
  if (name == "fixed") return BackboneMode::kFixed;
  if (name == "adaptive") return BackboneMode::kAdaptive;
  throw InvalidArgument("unknown backbone mode '" + std::string(name) + "' (expected fixed|adaptive)");
}

std::string_view ac_mode_name(AcMode m) { return m == AcMode::kShared ? "shared" : "independent"; }

AcMode parse_ac_mode(std::string_view name) {
  if (name == "shared") return AcMode::kShared;
  if (name == "independent") return AcMode::kIndependent;
  throw InvalidArgument("unknown actor-critic mode '" + std::string(name) + "' (expected shared|independent)");
}

int BackboneConfig::output_size() const {
  int s = input_size;
  for (int stride : strides) s = nn::ConvShape{1, 1, 3, stride, 1}.out_size(s);
  return s;
}

void validate(const PPOConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(what);
  };
  require(c.clip_epsilon > 0.0 && c.clip_epsilon < 1.0, "ppo.clip_epsilon must be in (0, 1)");
  require(c.learning_rate > 0.0 && std::isfinite(c.learning_rate), "ppo.learning_rate must be positive");
  require(c.entropy_coef >= 0.0, "ppo.entropy_coef must be >= 0");
  require(c.value_coef >= 0.0, "ppo.value_coef must be >= 0");
  require(c.epochs >= 1, "ppo.epochs must be >= 1");
  require(c.batch_size >= 1, "ppo.batch_size must be >= 1");
  require(c.minibatch_size >= 1 && c.minibatch_size <= c.batch_size,
          "ppo.minibatch_size must be in [1, batch_size]");
  require(c.max_grad_norm > 0.0, "ppo.max_grad_norm must be positive");
  require(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0, "ppo.adam_beta1 must be in [0, 1)");
  require(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0, "ppo.adam_beta2 must be in [0, 1)");
  require(c.adam_epsilon > 0.0, "ppo.adam_epsilon must be positive");
}

std::vector<double> normalized_advantages(std::span<const Transition> batch, bool normalize) {
  std::vector<double> adv(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) adv[i] = advantage(batch[i]);
  if (!normalize || adv.empty()) return adv;
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::max(std::sqrt(var / static_cast<double>(adv.size())), 1e-8);
  for (double& a : adv) a = (a - mean) / sd;
  return adv;
}

void Adam::step(std::span<float> params, std::span<const float> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw InvalidArgument("optimizer size does not match parameter buffer");
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double m = b1_ * m_[i] + (1.0 - b1_) * g;
    const double v = b2_ * v_[i] + (1.0 - b2_) * g * g;
    m_[i] = static_cast<float>(m);
    v_[i] = static_cast<float>(v);
    params[i] -= static_cast<float>(lr_ * (m / c1) / (std::sqrt(v / c2) + eps_));
  }
}

void Adam::load(std::span<const float> m, std::span<const float> v, std::uint64_t t) {
  if (m.size() != m_.size() || v.size() != v_.size()) throw FormatError("optimizer state size mismatch");
  std::copy(m.begin(), m.end(), m_.begin());
  std::copy(v.begin(), v.end(), v_.begin());
  t_ = t;
}

bool same_architecture(const BackboneConfig& a, const BackboneConfig& b) {
  return a.mode == b.mode && a.channels == b.channels && a.strides == b.strides && a.input_size == b.input_size;
}

bool same_architecture(const PolicyConfig& a, const PolicyConfig& b) {
  return a.ac_mode == b.ac_mode && a.feature_channels == b.feature_channels &&
         a.hidden_channels == b.hidden_channels && a.trunk_dilation == b.trunk_dilation && a.map_size == b.map_size;
}

InferenceModel::InferenceModel(const PolicySnapshot& s) : backbone_(s.backbone_config), policy_(s.policy_config) {
  if (s.version != kSnapshotVersion) throw FormatError("unsupported snapshot version");
  backbone_.load_params(s.backbone_params);
  policy_.load_params(s.policy_params);
}

namespace {

void check_configs(const BackboneConfig& b, const PolicyConfig& p) {
  if (b.channels != p.feature_channels)
    throw InvalidArgument("policy feature_channels must equal backbone channels");
  if (b.output_size() != p.map_size) throw InvalidArgument("backbone output size must equal the policy map size");
}

}  // namespace

Agent::Agent(const BackboneConfig& backbone, const PolicyConfig& policy, const PPOConfig& ppo)
    : backbone_((check_configs(backbone, policy), backbone)), policy_(policy), ppo_(ppo),
      policy_opt_(policy_.param_count(), ppo), backbone_opt_(backbone_.param_count(), ppo) {
  validate(ppo);
}

std::shared_ptr<const PolicySnapshot> Agent::snapshot() const {
  auto s = std::make_shared<PolicySnapshot>();
  s->backbone_config = backbone_.config();
  s->policy_config = policy_.config();
  s->backbone_params.assign(backbone_.params().begin(), backbone_.params().end());
  s->policy_params.assign(policy_.params().begin(), policy_.params().end());
  return s;
}

void Agent::restore(const PolicySnapshot& s) {
  if (s.version != kSnapshotVersion) throw FormatError("unsupported snapshot version");
  if (!same_architecture(s.backbone_config, backbone_.config()) ||
      !same_architecture(s.policy_config, policy_.config()))
    throw FormatError("snapshot architecture does not match the agent");
  backbone_.load_params(s.backbone_params);
  policy_.load_params(s.policy_params);
}

LossStats ppo_update(Agent& agent, std::span<const Transition> batch, const PPOConfig& cfg, std::uint64_t seed,
                     int workers) {
  validate(cfg);
  if (batch.empty()) throw InvalidArgument("ppo_update needs a non-empty batch");
  if (batch.size() < static_cast<std::size_t>(cfg.minibatch_size))
    throw InvalidArgument("batch is smaller than the minibatch size");
  const bool adapt = agent.backbone().trainable();
  for (const Transition& t : batch) {
    if (adapt ? !t.color : !(t.features || t.color)) throw InvalidArgument("transition is missing its observation");
    if (t.action < 0 || t.action >= agent.policy().config().action_count())
      throw InvalidArgument("transition action out of range");
  }

  const std::vector<double> adv = normalized_advantages(batch, cfg.normalize_advantage);

  // Keep copies so a numerical failure leaves the agent untouched.
  const auto before = agent.snapshot();
  const Adam policy_opt_before = agent.policy_optimizer();
  const Adam backbone_opt_before = agent.backbone_optimizer();
  auto rollback = [&](const std::string& why) {
    agent.restore(*before);
    agent.policy_optimizer() = policy_opt_before;
    agent.backbone_optimizer() = backbone_opt_before;
    throw NumericalFailure(why);
  };

  const std::size_t np = agent.policy().param_count();
  const std::size_t nb = adapt ? agent.backbone().param_count() : 0;
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(hash_seed(seed, {0x990dULL}));

  LossStats stats;
  double kl_sum = 0.0, clip_sum = 0.0, pl_sum = 0.0, vl_sum = 0.0, ent_sum = 0.0, norm_sum = 0.0;
  std::size_t samples = 0;
  const std::size_t mb = static_cast<std::size_t>(cfg.minibatch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start + mb <= order.size(); start += mb) {
      const double scale = 1.0 / static_cast<double>(mb);
      std::vector<nn::Buffer<float>> gp(mb), gb(mb);
      std::vector<SampleTerms> terms(mb);
      parallel_for(mb, workers, [&](std::size_t k) {
        const std::size_t i = order[start + k];
        const Transition& t = batch[i];
        gp[k].assign(np, 0.0f);
        gb[k].assign(nb, 0.0f);
        SampleInput<float> in;
        if (t.color) in.color = *t.color;
        in.features = t.features.get();
        in.action = t.action;
        in.old_log_prob = t.log_prob;
        in.advantage = adv[i];
        in.target = static_cast<double>(t.reward);
        terms[k] = sample_gradient<float>(agent.backbone(), agent.policy(), in, cfg, scale, gp[k], gb[k]);
      });

      // Reduce in sample order so worker count never changes the sum.
      nn::Buffer<float> grad_p(np, 0.0f), grad_b(nb, 0.0f);
      for (std::size_t k = 0; k < mb; ++k) {
        for (std::size_t j = 0; j < np; ++j) grad_p[j] += gp[k][j];
        for (std::size_t j = 0; j < nb; ++j) grad_b[j] += gb[k][j];
        const SampleTerms& s = terms[k];
        pl_sum += s.policy_loss;
        vl_sum += s.value_loss;
        ent_sum += s.entropy;
        clip_sum += s.clipped ? 1.0 : 0.0;
        kl_sum += batch[order[start + k]].log_prob - s.log_prob;
        if (!std::isfinite(s.policy_loss) || !std::isfinite(s.value_loss) || !std::isfinite(s.entropy))
          rollback("non-finite loss during update");
      }
      ++samples;

      double sq = 0.0;
      for (float g : grad_p) sq += static_cast<double>(g) * g;
      for (float g : grad_b) sq += static_cast<double>(g) * g;
      const double norm = std::sqrt(sq);
      if (!std::isfinite(norm)) rollback("non-finite gradient during update");
      norm_sum += norm;
      if (norm > cfg.max_grad_norm) {
        const float f = static_cast<float>(cfg.max_grad_norm / norm);
        for (float& g : grad_p) g *= f;
        for (float& g : grad_b) g *= f;
      }
      agent.policy_optimizer().step(agent.policy().mutable_params(), grad_p);
      if (adapt) agent.backbone_optimizer().step(agent.backbone().mutable_params(), grad_b);
      if (!nn::all_finite<float>(agent.policy().params()) || !nn::all_finite<float>(agent.backbone().params()))
        rollback("non-finite parameters after optimizer step");
    }
  }

  const double n = static_cast<double>(samples * mb);
  stats.minibatches = static_cast<int>(samples);
  if (samples > 0) {
    stats.policy_loss = pl_sum / n;
    stats.value_loss = vl_sum / n;
    stats.entropy = ent_sum / n;
    stats.clip_fraction = clip_sum / n;
    stats.approx_kl = kl_sum / n;
    stats.grad_norm = norm_sum / static_cast<double>(samples);
  }
  return stats;
}

}  // namespace flatgrasp
