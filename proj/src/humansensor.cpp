#include "lapf/humansensor.hpp"

#include <algorithm>
#include <map>

namespace lapf {

HumanSensorSim HumanSensorSim::from_corpus(const Corpus& corpus, Split split,
                                           CognitiveModel cognitive, QuantizationScheme scheme) {
  std::map<double, std::vector<std::string>> grouped;
  for (const auto& r : corpus.records) {
    if (r.split == split && r.domain == DomainTag::in_domain) grouped[r.level_ratio].push_back(r.text);
  }
  if (grouped.empty()) throw CorpusError("no in-domain records in the " + std::string(to_string(split)) + " split");
  HumanSensorSim sim{std::move(cognitive), std::move(scheme), {}, {}, std::nullopt};
  for (auto& [level, texts] : grouped) sim.buckets.push_back({level, std::move(texts)});
  return sim;
}

std::size_t nearest_bucket(const HumanSensorSim& sim, double y) {
  if (sim.buckets.empty()) throw CorpusError("human sensor has no text buckets");
  const double ratio = (y - sim.scheme.lo()) / (sim.scheme.hi() - sim.scheme.lo());
  const auto it = std::lower_bound(sim.buckets.begin(), sim.buckets.end(), ratio,
                                   [](const LevelBucket& b, double r) { return b.level_ratio < r; });
  if (it == sim.buckets.begin()) return 0;
  if (it == sim.buckets.end()) return sim.buckets.size() - 1;
  const auto upper = static_cast<std::size_t>(it - sim.buckets.begin());
  const double d_hi = it->level_ratio - ratio;
  const double d_lo = ratio - std::prev(it)->level_ratio;
  return d_lo <= d_hi ? upper - 1 : upper;
}

Observation emit_text(const HumanSensorSim& sim, double y, RandomStream& rng) {
  if (!sim.scheme.contains(y)) throw InvalidInput("emit_text: cognitive value outside the range");
  const auto& bucket = sim.buckets[nearest_bucket(sim, y)];
  if (bucket.texts.empty()) throw CorpusError("empty text bucket");
  Observation obs;
  obs.y = y;
  obs.q = quantize(sim.scheme, y);
  obs.text = bucket.texts[rng.index(bucket.texts.size())];
  if (!sim.ood_bank.empty()) {
    const std::size_t k = rng.index(sim.ood_bank.size());
    if (sim.ood_threshold && y < *sim.ood_threshold) {
      obs.text = sim.ood_bank[k];
      obs.ood = true;
    }
  } else if (sim.ood_threshold && y < *sim.ood_threshold) {
    throw CorpusError("OOD injection requested with an empty OOD bank");
  }
  return obs;
}

Observation observe(const HumanSensorSim& sim, const Eigen::VectorXd& x, RandomStream& rng) {
  return emit_text(sim, perceive(sim.cognitive, x, rng), rng);
}

std::vector<Observation> observe_all(const HumanSensorSim& sim, const Eigen::VectorXd& x,
                                     int count, RandomStream& rng) {
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) out.push_back(observe(sim, x, rng));
  return out;
}

}  // namespace lapf
