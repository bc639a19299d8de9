#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "housegan/dataio/corpus.hpp"
#include "housegan/dataio/mask.hpp"
#include "housegan/nn/adam.hpp"
#include "housegan/relnet/checkpoint.hpp"
#include "housegan/training/gradient_penalty.hpp"

namespace housegan {

struct TrainConfig {
  double learning_rate_g = 1e-4;
  double learning_rate_d = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  int batch_size = 32;
  double gp_weight = 10.0;
  int n_critic = 1;
  std::int64_t iterations = 200000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate_g > 0) || !(learning_rate_d > 0)) throw ValidationError("learning rates must be positive");
    if (!(adam_beta1 > 0 && adam_beta1 < 1) || !(adam_beta2 > 0 && adam_beta2 < 1)) {
      throw ValidationError("Adam betas must lie in (0, 1)");
    }
    if (batch_size < 1) throw ValidationError("batch_size must be positive");
    if (gp_weight < 0) throw ValidationError("gp_weight must be non-negative");
    if (n_critic < 1) throw ValidationError("n_critic must be at least 1");
    if (iterations < 0) throw ValidationError("iterations must be non-negative");
  }

  nn::AdamConfig adam_g() const { return {learning_rate_g, adam_beta1, adam_beta2, 1e-8}; }
  nn::AdamConfig adam_d() const { return {learning_rate_d, adam_beta1, adam_beta2, 1e-8}; }

  Json to_json() const {
    return {{"learning_rate_g", learning_rate_g}, {"learning_rate_d", learning_rate_d},
            {"adam_beta1", adam_beta1},           {"adam_beta2", adam_beta2},
            {"batch_size", batch_size},           {"gp_weight", gp_weight},
            {"n_critic", n_critic},               {"iterations", iterations},
            {"seed", seed}};
  }

  static TrainConfig from_json(const Json& j) {
    TrainConfig c;
    c.learning_rate_g = j.value("learning_rate_g", c.learning_rate_g);
    c.learning_rate_d = j.value("learning_rate_d", c.learning_rate_d);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.gp_weight = j.value("gp_weight", c.gp_weight);
    c.n_critic = j.value("n_critic", c.n_critic);
    c.iterations = j.value("iterations", c.iterations);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
  }
};

/// A diagram with its ground-truth masks [rooms, 1, M, M] in {-1, +1}.
struct TrainingExample {
  std::string id;
  BubbleDiagram diagram;
  nn::Tensor<double> masks;
};

inline TrainingExample make_example(const Sample& s, int mask_size) {
  nn::Tensor<double> masks({s.layout.size(), 1, mask_size, mask_size});
  const auto rooms = masks_from_layout(s.layout, mask_size);
  for (int r = 0; r < s.layout.size(); ++r) {
    const auto v = rooms[static_cast<std::size_t>(r)].values();
    std::copy(v.begin(), v.end(), masks.node(r).begin());
  }
  return {s.id, s.diagram, std::move(masks)};
}

struct StepLog {
  std::int64_t iteration = 0;
  /// Mean over the batch of D(fake) - D(real) + gp_weight * GP, from the
  /// last critic update of the iteration.
  double d_loss = 0;
  /// Mean of -D(fake) at the generator update.
  double g_loss = 0;
  /// Mean unweighted penalty.
  double gp = 0;
};

/// Owns both networks and their optimizers. Every random draw is addressed
/// by (seed, iteration, ...) so a resumed run continues exactly where the
/// saved one stopped.
class Trainer {
 public:
  Trainer(ModelConfig model, TrainConfig config)
      : Trainer(model, config, make_params(model, config.seed)) {}

  Trainer(ModelConfig model, TrainConfig config, ModelParams params)
      : config_(config),
        model_(model),
        dual_model_(model),
        params_(std::move(params)),
        opt_g_(config.adam_g(), params_.generator),
        opt_d_(config.adam_d(), params_.critic) {
    config_.validate();
  }

  /// Continues from a checkpoint that carries optimizer state.
  static Trainer resume(const Checkpoint& ck, TrainConfig config) {
    Trainer t(ck.config, config, ck.params);
    if (ck.generator_optimizer) t.opt_g_ = ck.generator_optimizer->restore(t.params_.generator);
    if (ck.critic_optimizer) t.opt_d_ = ck.critic_optimizer->restore(t.params_.critic);
    t.iteration_ = ck.iteration;
    return t;
  }

  const TrainConfig& config() const { return config_; }
  const RelationalGan<double>& model() const { return model_; }
  const ModelParams& params() const { return params_; }
  std::int64_t iteration() const { return iteration_; }

  /// Noise used for sample `slot` of the batch in `round` (critic rounds are
  /// 0..n_critic-1, the generator update is round n_critic).
  std::vector<NoiseVector> noise_for(std::int64_t iteration, int round, int slot, int rooms) const {
    RandomStream rs(config_.seed, {static_cast<std::uint64_t>(StreamDomain::kTrainNoise),
                                   static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(round),
                                   static_cast<std::uint64_t>(slot)});
    std::vector<NoiseVector> z;
    for (int r = 0; r < rooms; ++r) z.push_back(rs.normal_vector(model_.arch().noise_dim));
    return z;
  }

  double epsilon_for(std::int64_t iteration, int round, int slot) const {
    RandomStream rs(config_.seed, {static_cast<std::uint64_t>(StreamDomain::kInterpolation),
                                   static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(round),
                                   static_cast<std::uint64_t>(slot)});
    return rs.uniform();
  }

  /// One iteration: n_critic critic updates on the batch, then one generator
  /// update. Variable-size diagrams are handled by looping per sample.
  StepLog step(std::span<const TrainingExample* const> batch) {
    if (batch.empty()) throw ValidationError("empty training batch");
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    StepLog log;
    log.iteration = iteration_;

    for (int round = 0; round < config_.n_critic; ++round) {
      auto grads = params_.critic.zeros_like();
      const auto dual_critic = params_.critic.cast<DualD>();
      double d_loss = 0, gp_sum = 0;
      for (std::size_t s = 0; s < batch.size(); ++s) {
        const TrainingExample& ex = *batch[s];
        const int slot = static_cast<int>(s);
        const auto z = noise_for(iteration_, round, slot, ex.diagram.size());
        const auto fake = model_.generate(params_.generator, ex.diagram, z).masks;

        const auto real_pass = model_.critique(params_.critic, ex.diagram, ex.masks, true);
        model_.critic_backward(params_.critic, real_pass, -inv_b, &grads);
        const auto fake_pass = model_.critique(params_.critic, ex.diagram, fake, true);
        model_.critic_backward(params_.critic, fake_pass, inv_b, &grads);

        const double eps = epsilon_for(iteration_, round, slot);
        const PenaltyTerm gp = accumulate_gradient_penalty(model_, dual_model_, params_.critic, dual_critic,
                                                           ex.diagram, ex.masks, fake, eps,
                                                           config_.gp_weight * inv_b, grads);
        d_loss += fake_pass.score - real_pass.score + config_.gp_weight * gp.value;
        gp_sum += gp.value;
      }
      opt_d_.step(params_.critic, grads);
      log.d_loss = d_loss * inv_b;
      log.gp = gp_sum * inv_b;
    }

    auto grads = params_.generator.zeros_like();
    double g_loss = 0;
    for (std::size_t s = 0; s < batch.size(); ++s) {
      const TrainingExample& ex = *batch[s];
      const auto z = noise_for(iteration_, config_.n_critic, static_cast<int>(s), ex.diagram.size());
      const auto gen = model_.generate(params_.generator, ex.diagram, z, true);
      const auto pass = model_.critique(params_.critic, ex.diagram, gen.masks, true);
      const auto dmasks = model_.critic_backward(params_.critic, pass, -inv_b, nullptr);
      model_.generator_backward(params_.generator, gen, dmasks, grads);
      g_loss -= pass.score;
    }
    opt_g_.step(params_.generator, grads);
    log.g_loss = g_loss * inv_b;
    ++iteration_;
    return log;
  }

  Checkpoint checkpoint(std::optional<Group> held_out) const {
    Checkpoint ck;
    ck.config = model_.config();
    ck.held_out = held_out;
    ck.seed = config_.seed;
    ck.iteration = iteration_;
    ck.train_config = config_.to_json();
    ck.params = params_;
    ck.generator_optimizer = OptimizerSnapshot::of(opt_g_);
    ck.critic_optimizer = OptimizerSnapshot::of(opt_d_);
    return ck;
  }

 private:
  TrainConfig config_;
  RelationalGan<double> model_;
  RelationalGan<DualD> dual_model_;
  ModelParams params_;
  nn::Adam opt_g_;
  nn::Adam opt_d_;
  std::int64_t iteration_ = 0;
};

/// Batch of indices into the training split, drawn with replacement from a
/// stream keyed by the iteration.
inline std::vector<std::size_t> batch_indices(std::uint64_t seed, std::int64_t iteration, std::size_t pool, int size) {
  RandomStream rs(seed, {static_cast<std::uint64_t>(StreamDomain::kBatch), static_cast<std::uint64_t>(iteration)});
  std::vector<std::size_t> idx;
  for (int i = 0; i < size; ++i) idx.push_back(static_cast<std::size_t>(rs.next_u64() % pool));
  return idx;
}

struct RunOptions {
  /// Final checkpoint path.
  std::filesystem::path out;
  /// CSV with iteration,d_loss,g_loss,gp,wall_time. Empty disables it.
  std::filesystem::path metrics_log;
  /// One line per iteration listing the sample ids in the batch.
  std::filesystem::path batch_audit;
  /// Writes OUT.iter<N> every this many iterations (0 disables).
  std::int64_t checkpoint_every = 0;
  std::function<void(const StepLog&)> on_step;
};

inline std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

/// Trains on every group except `held_out` and writes the final checkpoint.
inline Checkpoint train_run(const TrainConfig& config, const Corpus& corpus, Group held_out, const ModelConfig& model,
                            const RunOptions& options, const Checkpoint* resume_from = nullptr) {
  config.validate();
  const Split split = split_groups(corpus, held_out);
  if (split.train.empty()) {
    throw ValidationError("no training samples outside group " + std::string(group_name(held_out)));
  }
  const int m = model.arch.mask_size();
  std::vector<TrainingExample> pool;
  pool.reserve(split.train.size());
  for (const Sample* s : split.train) pool.push_back(make_example(*s, m));

  Trainer trainer = resume_from ? Trainer::resume(*resume_from, config) : Trainer(model, config);
  const bool append = resume_from != nullptr;
  std::ofstream metrics, audit;
  if (!options.metrics_log.empty()) {
    metrics.open(options.metrics_log, append ? std::ios::app : std::ios::trunc);
    if (!append) metrics << "iteration,d_loss,g_loss,gp,wall_time\n";
  }
  if (!options.batch_audit.empty()) audit.open(options.batch_audit, append ? std::ios::app : std::ios::trunc);

  const auto start = std::chrono::steady_clock::now();
  std::vector<const TrainingExample*> batch;
  while (trainer.iteration() < config.iterations) {
    const std::int64_t it = trainer.iteration();
    batch.clear();
    for (std::size_t i : batch_indices(config.seed, it, pool.size(), config.batch_size)) batch.push_back(&pool[i]);
    const StepLog log = trainer.step(batch);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (metrics.is_open()) {
      metrics << log.iteration << ',' << format_double(log.d_loss) << ',' << format_double(log.g_loss) << ','
              << format_double(log.gp) << ',' << wall << '\n';
    }
    if (audit.is_open()) {
      audit << log.iteration;
      for (const auto* ex : batch) audit << ',' << ex->id;
      audit << '\n';
    }
    if (options.on_step) options.on_step(log);
    if (options.checkpoint_every > 0 && trainer.iteration() % options.checkpoint_every == 0 && !options.out.empty()) {
      save_checkpoint(trainer.checkpoint(held_out), options.out.string() + ".iter" + std::to_string(trainer.iteration()));
    }
  }
  Checkpoint ck = trainer.checkpoint(held_out);
  if (!options.out.empty()) save_checkpoint(ck, options.out);
  return ck;
}

}  // namespace housegan
