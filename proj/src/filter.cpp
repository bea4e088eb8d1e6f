#include "lapf/filter.hpp"

namespace lapf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_cognitive(const CognitiveModel& c, Index state_dim) {
  if (c.C.size() != state_dim) throw ConfigError("cognitive model dimension does not match the plant");
  if (!(c.noise_var > 0.0)) throw ConfigError("cognitive noise variance must be positive");
}

}  // namespace

void validate_backend(const LikelihoodBackend& backend, Index state_dim) {
  std::visit(overloaded{
                 [](const NoUpdate&) {},
                 [&](const LapfLikelihoodModel& m) {
                   if (!m.classifier) throw ConfigError("LAPF backend needs a classifier");
                   if (m.classifier->levels() != m.scheme.levels())
                     throw ConfigError("classifier output size does not match the label count");
                   check_cognitive(m.cognitive, state_dim);
                 },
                 [&](const EdapfLikelihoodModel& m) {
                   if (!m.regressor) throw ConfigError("EDAPF backend needs a regressor");
                   if (!(m.r_tilde > 0.0)) throw ConfigError("pseudo-observation noise variance must be positive");
                   check_cognitive(m.cognitive, state_dim);
                 },
             },
             backend);
}

LanguageAidedFilter::LanguageAidedFilter(PlantModel plant, LikelihoodBackend backend, const PriorSpec& prior,
                                         Index particles, RandomStream rng)
    : plant_(std::move(plant)), backend_(std::move(backend)), rng_(std::move(rng)) {
  plant_.validate();
  if (prior.mean.size() != plant_.dim()) throw ConfigError("prior dimension does not match the plant");
  validate_backend(backend_, plant_.dim());
  particles_ = init_particles(prior, particles, rng_);
}

StepSummary LanguageAidedFilter::prior_summary() const {
  return {0, posterior_mean(particles_), effective_sample_size(particles_), degenerate_};
}

Eigen::VectorXd LanguageAidedFilter::likelihoods(std::span<const std::string> texts) {
  readings_.clear();
  Eigen::VectorXd joint = Eigen::VectorXd::Ones(particles_.size());
  for (const auto& text : texts) {
    TextReading reading{text, {}, 0.0};
    const Eigen::VectorXd single = std::visit(
        overloaded{
            [&](const NoUpdate&) -> Eigen::VectorXd { return Eigen::VectorXd::Ones(particles_.size()); },
            [&](const LapfLikelihoodModel& m) -> Eigen::VectorXd {
              reading.label_distribution = m.classifier->label_distribution(text);
              return lapf_likelihoods(m.scheme, m.cognitive, reading.label_distribution, particles_.states);
            },
            [&](const EdapfLikelihoodModel& m) -> Eigen::VectorXd {
              reading.pseudo_observation = m.regressor->predict(text);
              return edapf_likelihoods(m.cognitive, m.r_tilde, reading.pseudo_observation, particles_.states);
            },
        },
        backend_);
    joint = joint.cwiseProduct(single);
    readings_.push_back(std::move(reading));
  }
  return joint;
}

StepSummary LanguageAidedFilter::step(std::span<const std::string> texts) {
  ++step_;
  particles_ = propagate_particles(plant_, std::move(particles_), rng_);
  if (!std::holds_alternative<NoUpdate>(backend_) && !texts.empty()) {
    particles_ = update_weights(std::move(particles_), likelihoods(texts), degenerate_);
  } else {
    readings_.clear();
  }
  StepSummary s{step_, posterior_mean(particles_), effective_sample_size(particles_), degenerate_};
  particles_ = resample(particles_, rng_);
  return s;
}

FilterTrajectory run_filter(const PlantModel& plant, const LikelihoodBackend& backend, const PriorSpec& prior,
                            const std::vector<std::vector<std::string>>& observations, Index particles,
                            RandomStream& rng) {
  LanguageAidedFilter filter(plant, backend, prior, particles, std::move(rng));
  FilterTrajectory out;
  out.steps.reserve(observations.size() + 1);
  out.steps.push_back(filter.prior_summary());
  for (const auto& texts : observations) out.steps.push_back(filter.step(texts));
  rng = std::move(filter.rng());
  return out;
}

}  // namespace lapf
