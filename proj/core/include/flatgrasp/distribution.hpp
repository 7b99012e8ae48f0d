#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "flatgrasp/rng.hpp"

namespace flatgrasp {

// Categorical distribution over action-map cells, parameterised by logits.
// Reductions are done in double whatever T is, so float logits produce the
// same log-probabilities at rollout time and at update time.
template <typename T>
struct Categorical {
  std::vector<double> log_probs;
  double entropy = 0.0;

  explicit Categorical(std::span<const T> logits) : log_probs(logits.size()) {
    double m = -std::numeric_limits<double>::infinity();
    for (T z : logits) m = std::max(m, static_cast<double>(z));
    double sum = 0.0;
    for (T z : logits) sum += std::exp(static_cast<double>(z) - m);
    const double lse = m + std::log(sum);
    for (std::size_t i = 0; i < logits.size(); ++i) {
      log_probs[i] = static_cast<double>(logits[i]) - lse;
      entropy -= std::exp(log_probs[i]) * log_probs[i];
    }
  }

  double prob(std::size_t i) const { return std::exp(log_probs[i]); }

  // Smallest index whose cumulative mass exceeds u in [0, 1).
  int inverse_cdf(double u) const {
    double cum = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < log_probs.size(); ++i) {
      const double p = prob(i);
      if (p > 0.0) last_positive = static_cast<int>(i);
      cum += p;
      if (u < cum) return static_cast<int>(i);
    }
    return last_positive;
  }
};

inline double action_uniform(std::uint64_t seed) { return Rng(hash_seed(seed, {0xac710ULL})).uniform(); }

struct ActionSample {
  int index = 0;
  double log_prob = 0.0;
};

// Inverse-CDF draw from softmax(logits) with a seeded stream.
template <typename T>
ActionSample sample_action(std::span<const T> logits, std::uint64_t seed) {
  const Categorical<T> dist(logits);
  const int i = dist.inverse_cdf(action_uniform(seed));
  return {i, dist.log_probs[static_cast<std::size_t>(i)]};
}

// Argmax with ties going to the smallest index.
template <typename T>
ActionSample greedy_action(std::span<const T> logits) {
  const Categorical<T> dist(logits);
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i)
    if (logits[i] > logits[best]) best = i;
  return {static_cast<int>(best), dist.log_probs[best]};
}

}  // namespace flatgrasp
