#include "topk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "topk/properties.hpp"
#include "topk/random.hpp"

namespace topk {

double mean_bayes_risk(std::span<const ProbVector> samples, std::size_t k) {
  std::vector<double> values;
  values.reserve(samples.size());
  for (const ProbVector& p : samples) {
    values.push_back(bayes_risk_topk(p, k));
  }
  return pairwise_sum(values) / static_cast<double>(samples.size());
}

double risk(const RepresentativeSet& reps,
            std::span<const ProbVector> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("risk needs at least one sample");
  }
  const LabelSpace& space = reps.space;
  std::vector<double> values;
  values.reserve(samples.size());
  for (const ProbVector& p : samples) {
    const PropertyValue opt = prop_over_reps(reps, p);
    const TopKSet linked =
        argmax_link(reps.entries[opt.entries.front()].embedded, space.k());
    values.push_back(expected_loss(LossId::kTopK, linked, p, space));
  }
  return pairwise_sum(values) / static_cast<double>(samples.size());
}

double risk(LossId id, const LabelSpace& space,
            std::span<const ProbVector> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("risk needs at least one sample");
  }
  if (id == LossId::kTopK) {
    return mean_bayes_risk(samples, space.k());
  }
  return risk(representative_set(id, space), samples);
}

double regret(LossId id, const LabelSpace& space,
              std::span<const ProbVector> samples) {
  return risk(id, space, samples) - mean_bayes_risk(samples, space.k());
}

std::vector<double> sweep_concentration(std::size_t n, double alpha) {
  std::vector<double> c(n, 1.0);
  for (std::size_t i = 0; i < std::min<std::size_t>(2, n); ++i) {
    c[i] = alpha;
  }
  return c;
}

void validate(const SweepConfig& cfg) {
  const LabelSpace space(cfg.n, cfg.k);
  if (cfg.samples_per_alpha < 1) {
    throw std::invalid_argument("samples_per_alpha must be >= 1");
  }
  if (cfg.alphas.empty()) {
    throw std::invalid_argument("alphas must be nonempty");
  }
  for (double a : cfg.alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("alphas must be positive");
    }
  }
}

std::vector<SweepRecord> regret_sweep(const SweepConfig& cfg) {
  validate(cfg);
  const LabelSpace space(cfg.n, cfg.k);
  std::vector<RepresentativeSet> reps;
  for (LossId id : cfg.losses) {
    if (is_surrogate(id)) {
      reps.push_back(representative_set(id, space));
    }
  }
  std::vector<SweepRecord> out;
  for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
    const double alpha = cfg.alphas[a];
    const std::vector<ProbVector> samples =
        dirichlet_sample(sweep_concentration(cfg.n, alpha),
                         derive_seed(cfg.seed, a), cfg.samples_per_alpha);
    const double bayes = mean_bayes_risk(samples, cfg.k);
    std::size_t r = 0;
    for (LossId id : cfg.losses) {
      const double value =
          is_surrogate(id) ? risk(reps[r++], samples) : bayes;
      out.push_back(
          {alpha, id, value, value - bayes, samples.size(), cfg.seed});
    }
  }
  return out;
}

CsvTable sweep_table(std::span<const SweepRecord> records) {
  CsvTable t;
  t.header = {"alpha", "loss", "risk", "regret", "n_samples", "seed"};
  for (const SweepRecord& r : records) {
    t.rows.push_back({format_double(r.alpha), to_string(r.loss),
                      format_double(r.risk), format_double(r.regret),
                      std::to_string(r.n_samples), std::to_string(r.seed)});
  }
  return t;
}

void adam_step(std::span<double> params, std::span<const double> grads,
               AdamState& state, double learning_rate,
               const AdamOptions& options) {
  if (params.size() != grads.size() ||
      params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw std::invalid_argument("adam_step: parameter, gradient and state sizes differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = options.beta1 * m + (1.0 - options.beta1) * grads[i];
    v = options.beta2 * v + (1.0 - options.beta2) * grads[i] * grads[i];
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
  }
}

std::vector<double> LinearModel::scores(std::span<const double> x) const {
  std::vector<double> u = bias;
  for (std::size_t r = 0; r < dim; ++r) {
    const double* row = weights.data() + r * dim;
    for (std::size_t c = 0; c < dim; ++c) {
      u[r] += row[c] * x[c];
    }
  }
  return u;
}

bool LinearModel::finite() const {
  const auto ok = [](double x) { return std::isfinite(x); };
  return std::all_of(weights.begin(), weights.end(), ok) &&
         std::all_of(bias.begin(), bias.end(), ok);
}

void validate(const TrainConfig& cfg) {
  const ProbVector base(cfg.base_p);
  const LabelSpace space(cfg.base_p.size(), cfg.k);
  if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha)) {
    throw std::invalid_argument("alpha must be positive");
  }
  for (double x : cfg.base_p) {
    if (!(x > 0.0)) {
      throw std::invalid_argument(
          "base_p entries must be positive to form Dirichlet concentrations");
    }
  }
  if (cfg.train_size < 1 || cfg.test_size < 1) {
    throw std::invalid_argument("train_size and test_size must be >= 1");
  }
  if (!(cfg.learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (cfg.batch_size < 1) {
    throw std::invalid_argument("batch_size must be >= 1");
  }
  for (LossId id : cfg.losses) {
    if (!is_surrogate(id)) {
      throw std::invalid_argument("only surrogate losses can be trained");
    }
  }
}

std::pair<Dataset, Dataset> make_datasets(const TrainConfig& cfg) {
  std::vector<double> concentration = cfg.base_p;
  for (double& c : concentration) {
    c *= cfg.alpha;
  }
  DirichletSampler sampler(concentration, derive_seed(cfg.seed, 0));
  Rng label_rng(derive_seed(cfg.seed, 1));
  const auto draw = [&](std::size_t count) {
    Dataset d;
    d.features.reserve(count);
    d.labels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      ProbVector p = sampler.sample();
      d.labels.push_back(label_rng.categorical(p.values()));
      d.features.emplace_back(p.values().begin(), p.values().end());
    }
    return d;
  };
  Dataset train = draw(cfg.train_size);
  Dataset test = draw(cfg.test_size);
  return {std::move(train), std::move(test)};
}

namespace {

double mean_surrogate(LossId id, const LinearModel& model, const Dataset& d,
                      std::size_t k) {
  std::vector<double> values(d.labels.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = surrogate_loss(id, model.scores(d.features[i]), d.labels[i], k);
  }
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double mean_topk(const LinearModel& model, const Dataset& d, std::size_t k) {
  std::size_t misses = 0;
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    if (!argmax_link(model.scores(d.features[i]), k).contains(d.labels[i])) {
      ++misses;
    }
  }
  return static_cast<double>(misses) / static_cast<double>(d.labels.size());
}

}  // namespace

TrainResult train_and_eval(const TrainConfig& cfg) {
  validate(cfg);
  const std::size_t n = cfg.base_p.size();
  const std::size_t k = cfg.k;
  const auto [train, test] = make_datasets(cfg);

  TrainResult result;
  for (LossId id : cfg.losses) {
    LinearModel model(n);
    AdamState weight_state(model.weights.size());
    AdamState bias_state(model.bias.size());
    // Every loss sees the same minibatch order.
    Rng order_rng(derive_seed(cfg.seed, 2));
    std::vector<std::size_t> order(train.labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    const auto record = [&](std::size_t epoch) {
      const double train_loss = mean_surrogate(id, model, train, k);
      const double test_loss = mean_topk(model, test, k);
      if (!model.finite() || !std::isfinite(train_loss)) {
        throw TrainingError("training diverged for loss " + to_string(id) +
                            " at epoch " + std::to_string(epoch));
      }
      result.records.push_back(
          {cfg.alpha, id, cfg.seed, epoch, train_loss, test_loss});
      return test_loss;
    };

    double test_loss = record(0);
    std::vector<double> weight_grad(model.weights.size());
    std::vector<double> bias_grad(model.bias.size());
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
      order_rng.shuffle(order);
      for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
        std::fill(weight_grad.begin(), weight_grad.end(), 0.0);
        std::fill(bias_grad.begin(), bias_grad.end(), 0.0);
        for (std::size_t b = start; b < stop; ++b) {
          const std::vector<double>& x = train.features[order[b]];
          const Subgradient g =
              subgradient(id, model.scores(x), train.labels[order[b]], k);
          for (std::size_t r = 0; r < n; ++r) {
            if (g[r] == 0.0) {
              continue;
            }
            bias_grad[r] += g[r];
            for (std::size_t c = 0; c < n; ++c) {
              weight_grad[r * n + c] += g[r] * x[c];
            }
          }
        }
        const double scale = 1.0 / static_cast<double>(stop - start);
        for (double& v : weight_grad) v *= scale;
        for (double& v : bias_grad) v *= scale;
        adam_step(model.weights, weight_grad, weight_state, cfg.learning_rate);
        adam_step(model.bias, bias_grad, bias_state, cfg.learning_rate);
      }
      test_loss = record(epoch);
    }
    result.final_test.push_back({id, test_loss});
  }
  return result;
}

CsvTable train_table(std::span<const TrainRecord> records) {
  CsvTable t;
  t.header = {"alpha", "loss", "seed", "epoch", "train_surrogate_loss",
              "test_topk_loss"};
  for (const TrainRecord& r : records) {
    t.rows.push_back({format_double(r.alpha), to_string(r.loss),
                      std::to_string(r.seed), std::to_string(r.epoch),
                      format_double(r.train_surrogate_loss),
                      format_double(r.test_topk_loss)});
  }
  return t;
}

}  // namespace topk
