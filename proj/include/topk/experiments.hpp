#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "topk/csv.hpp"
#include "topk/embeddings.hpp"
#include "topk/losses.hpp"
#include "topk/simplex.hpp"

namespace topk {

// Expected top-k loss after minimizing the surrogate exactly and linking: for
// each p, the lexicographically first optimal representative is linked with
// argmax_link and scored under p. kTopK gives the mean Bayes risk.
double risk(LossId id, const LabelSpace& space,
            std::span<const ProbVector> samples);
double risk(const RepresentativeSet& reps, std::span<const ProbVector> samples);
double mean_bayes_risk(std::span<const ProbVector> samples, std::size_t k);
// risk - mean Bayes risk.
double regret(LossId id, const LabelSpace& space,
              std::span<const ProbVector> samples);

struct SweepConfig {
  std::size_t n = 5;
  std::size_t k = 3;
  std::vector<double> alphas{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  std::size_t samples_per_alpha = 1000;
  std::uint64_t seed = 0;
  std::vector<LossId> losses{LossId::kL2, LossId::kL3, LossId::kL4,
                             LossId::kLk};
};

struct SweepRecord {
  double alpha;
  LossId loss;
  double risk;
  double regret;
  std::size_t n_samples;
  std::uint64_t seed;
};

// Dirichlet(alpha, alpha, 1, ..., 1) concentrations for n labels.
std::vector<double> sweep_concentration(std::size_t n, double alpha);

// One record per (alpha, loss), alphas outermost. Every loss sees the same
// samples for a given alpha.
std::vector<SweepRecord> regret_sweep(const SweepConfig& cfg);
CsvTable sweep_table(std::span<const SweepRecord> records);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;

  explicit AdamState(std::size_t size)
      : first_moment(size, 0.0), second_moment(size, 0.0) {}
};

// One bias-corrected Adam update of params in place.
void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double learning_rate,
               const AdamOptions& options = {});

// Scores u = W x + b with W square (row-major) and features x in R^n.
struct LinearModel {
  std::size_t dim;
  std::vector<double> weights;
  std::vector<double> bias;

  explicit LinearModel(std::size_t n)
      : dim(n), weights(n * n, 0.0), bias(n, 0.0) {}

  std::vector<double> scores(std::span<const double> x) const;
  bool finite() const;
};

struct TrainConfig {
  std::vector<double> base_p{0.15, 0.15, 0.15, 0.2, 0.35};
  std::size_t k = 3;
  double alpha = 64.0;
  std::size_t train_size = 10000;
  std::size_t test_size = 1000;
  std::size_t epochs = 200;
  double learning_rate = 0.01;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  std::vector<LossId> losses{LossId::kL2, LossId::kL3, LossId::kL4,
                             LossId::kLk};
};

struct TrainRecord {
  double alpha;
  LossId loss;
  std::uint64_t seed;
  std::size_t epoch;
  double train_surrogate_loss;
  double test_topk_loss;
};

struct LossOutcome {
  LossId loss;
  double test_topk_loss;
};

struct TrainResult {
  // Epoch 0 is the zero-initialized model.
  std::vector<TrainRecord> records;
  std::vector<LossOutcome> final_test;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<Label> labels;
};

// Draws p ~ Dirichlet(alpha * base_p), uses p as the features and y ~ p as
// the label. Returns {train, test}.
std::pair<Dataset, Dataset> make_datasets(const TrainConfig& cfg);

// Trains one linear model per surrogate with minibatch Adam on the mean
// surrogate loss and scores argmax_link predictions on the test set. Throws
// TrainingError when parameters stop being finite.
TrainResult train_and_eval(const TrainConfig& cfg);
CsvTable train_table(std::span<const TrainRecord> records);

// Throws std::invalid_argument when a config violates its invariants.
void validate(const SweepConfig& cfg);
void validate(const TrainConfig& cfg);

}  // namespace topk
