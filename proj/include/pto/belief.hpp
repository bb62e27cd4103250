#pragma once

// Belief-state algebra under a binary observation model. A belief is
// identified by its support; its probabilities are always the prior
// restricted to the support and renormalized.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pto/scenario.hpp"
#include "pto/world_set.hpp"

namespace pto {

using BeliefId = std::uint32_t;

class ImpossibleObservation : public std::domain_error {
 public:
  ImpossibleObservation() : std::domain_error("observation is inconsistent with the belief support") {}
};

struct BeliefState {
  BeliefId id = 0;
  WorldSet support;
  std::vector<double> probs;
};

/// Append-only map from support set to a dense belief id. Id 0 is the
/// prior's support.
class BeliefRegistry {
 public:
  BeliefRegistry() = default;
  explicit BeliefRegistry(std::vector<double> prior) : prior_(std::move(prior)) {
    if (prior_.empty() || prior_.size() > kMaxHypotheses)
      throw std::invalid_argument("prior must cover 1..64 hypotheses");
    WorldSet support;
    for (std::size_t s = 0; s < prior_.size(); ++s) {
      if (prior_[s] < 0.0) throw std::invalid_argument("negative prior");
      if (prior_[s] > 0.0) support |= WorldSet::single(s);
    }
    if (support.empty()) throw std::invalid_argument("prior has no mass");
    intern(support);
  }

  const std::vector<double>& prior() const { return prior_; }
  std::size_t hypothesis_count() const { return prior_.size(); }
  std::size_t size() const { return beliefs_.size(); }
  BeliefId root() const { return 0; }
  const BeliefState& operator[](BeliefId id) const { return beliefs_.at(id); }
  const std::vector<BeliefState>& beliefs() const { return beliefs_; }

  /// Prior mass of a set of hypotheses.
  double mass(WorldSet worlds) const {
    double m = 0.0;
    worlds.for_each([&](std::size_t s) {
      if (s < prior_.size()) m += prior_[s];
    });
    return m;
  }

  /// Canonical belief with the given support, created if new.
  BeliefId intern(WorldSet support) {
    if (auto it = index_.find(support.mask()); it != index_.end()) return it->second;
    const double m = mass(support);
    if (support.empty() || !(m > 0.0)) throw ImpossibleObservation();
    BeliefState b;
    b.id = static_cast<BeliefId>(beliefs_.size());
    b.probs.assign(prior_.size(), 0.0);
    WorldSet positive;
    support.for_each([&](std::size_t s) {
      if (prior_[s] > 0.0) {
        b.probs[s] = prior_[s] / m;
        positive |= WorldSet::single(s);
      }
    });
    b.support = positive;
    if (positive != support) return intern(positive);
    index_.emplace(support.mask(), b.id);
    beliefs_.push_back(std::move(b));
    return beliefs_.back().id;
  }

  std::optional<BeliefId> find(WorldSet support) const {
    if (auto it = index_.find(support.mask()); it != index_.end()) return it->second;
    return std::nullopt;
  }

 private:
  std::vector<double> prior_;
  std::vector<BeliefState> beliefs_;
  std::unordered_map<std::uint64_t, BeliefId> index_;
};

/// Bayesian update with a binary observation consistent with `consistent`.
inline BeliefId update(BeliefRegistry& registry, BeliefId b, WorldSet consistent) {
  const WorldSet support = registry[b].support & consistent;
  if (support.empty()) throw ImpossibleObservation();
  return registry.intern(support);
}

/// Probability of an observation whose consistent worlds are `consistent`,
/// under belief `b`.
inline double observation_probability(const BeliefState& b, WorldSet consistent) {
  double p = 0.0;
  (b.support & consistent).for_each([&](std::size_t s) { p += b.probs[s]; });
  return p;
}

struct ObservationOutcome {
  WorldSet consistent;
  BeliefId child = 0;
  double probability = 0.0;
};

/// All outcomes of observing one factor from one belief.
struct FactorObservation {
  std::size_t factor = 0;
  std::vector<ObservationOutcome> outcomes;
};

/// Informative observations for the factors in `visible_mask`, ordered by
/// factor index. A factor is informative iff its outcomes split the
/// support into at least two nonempty parts.
inline std::vector<FactorObservation> observe_visible(const Scenario& sc, BeliefRegistry& registry,
                                                      BeliefId b, std::uint64_t visible_mask) {
  std::vector<FactorObservation> out;
  for (std::size_t f = 0; f < sc.factors.size(); ++f) {
    if (!((visible_mask >> f) & 1U)) continue;
    const WorldSet support = registry[b].support;
    std::vector<WorldSet> parts;
    for (WorldSet o : sc.factor_outcomes(f))
      if (support.intersects(o)) parts.push_back(o);
    if (parts.size() < 2) continue;
    FactorObservation obs{f, {}};
    for (WorldSet o : parts) {
      const BeliefId child = update(registry, b, o);
      obs.outcomes.push_back({o, child, observation_probability(registry[b], o)});
    }
    out.push_back(std::move(obs));
  }
  return out;
}

inline std::vector<FactorObservation> observe_outcomes(const Scenario& sc, Config x, BeliefRegistry& registry,
                                                       BeliefId b) {
  return observe_visible(sc, registry, b, visible_factors(sc, x));
}

/// Closes the registry under observation of every factor in
/// `observable_mask`; returns the number of beliefs.
inline std::size_t enumerate_reachable(const Scenario& sc, BeliefRegistry& registry, std::uint64_t observable_mask) {
  for (BeliefId b = 0; b < registry.size(); ++b) observe_visible(sc, registry, b, observable_mask);
  return registry.size();
}

}  // namespace pto
