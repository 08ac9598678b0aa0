#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "test_util.hpp"
#include "topk/config.hpp"
#include "topk/experiments.hpp"
#include "topk/random.hpp"

using namespace topk;

namespace {

std::vector<ProbVector> repeated(std::vector<double> p, std::size_t count) {
  return std::vector<ProbVector>(count, ProbVector(std::move(p)));
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TrainConfig small_train() {
  TrainConfig cfg;
  cfg.train_size = 300;
  cfg.test_size = 100;
  cfg.epochs = 5;
  return cfg;
}

}  // namespace

TEST(Risk, Examples) {
  const auto a = repeated({0.5, 0.3, 0.2}, 10);
  EXPECT_NEAR(risk(LossId::kLk, LabelSpace(3, 2), a), 0.2, 1e-12);
  const auto b = repeated({.15, .15, .15, .2, .35}, 3);
  EXPECT_NEAR(risk(LossId::kL4, LabelSpace(5, 3), b), 0.35, 1e-12);
  EXPECT_NEAR(regret(LossId::kL4, LabelSpace(5, 3), b), 0.05, 1e-12);

  std::mt19937_64 rng(41);
  std::vector<ProbVector> c;
  double bayes = 0.0;
  for (int i = 0; i < 50; ++i) {
    c.emplace_back(oracle::uniform_simplex(4, rng));
    bayes += bayes_risk_topk(c.back(), 2);
  }
  EXPECT_NEAR(risk(LossId::kTopK, LabelSpace(4, 2), c), bayes / 50, 1e-12);
  EXPECT_THROW(risk(LossId::kL2, LabelSpace(4, 2), std::vector<ProbVector>{}),
               std::invalid_argument);
}

TEST(Regret, NonnegativeAndZeroForLk) {
  std::mt19937_64 rng(42);
  std::vector<ProbVector> samples;
  for (int i = 0; i < 300; ++i) samples.emplace_back(oracle::uniform_simplex(5, rng));
  const LabelSpace space(5, 2);
  EXPECT_LE(std::abs(regret(LossId::kLk, space, samples)), 1e-9);
  for (LossId id : {LossId::kL2, LossId::kL3, LossId::kL4}) {
    for (const ProbVector& p : samples) {
      ASSERT_GE(regret(id, space, std::span(&p, 1)), -1e-12);
    }
  }
}

TEST(Sweep, DefaultShape) {
  SweepConfig cfg;
  cfg.samples_per_alpha = 50;
  const std::vector<SweepRecord> records = regret_sweep(cfg);
  ASSERT_EQ(records.size(), 28u);
  EXPECT_EQ(records[0].alpha, 0.125);
  EXPECT_EQ(records[0].loss, LossId::kL2);
  EXPECT_EQ(records[27].alpha, 8.0);
  EXPECT_EQ(records[27].loss, LossId::kLk);
  for (const SweepRecord& r : records) {
    EXPECT_GE(r.regret, -1e-12);
    EXPECT_EQ(r.n_samples, 50u);
    if (r.loss == LossId::kLk) EXPECT_LE(std::abs(r.regret), 1e-9);
  }
  EXPECT_EQ(sweep_concentration(5, 0.5), (std::vector<double>{0.5, 0.5, 1, 1, 1}));
}

TEST(Sweep, SingleSampleMatchesRegret) {
  SweepConfig cfg;
  cfg.alphas = {1.0, 2.0};
  cfg.samples_per_alpha = 1;
  cfg.seed = 11;
  const std::vector<SweepRecord> records = regret_sweep(cfg);
  const LabelSpace space(cfg.n, cfg.k);
  for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
    const std::vector<ProbVector> p = dirichlet_sample(
        sweep_concentration(cfg.n, cfg.alphas[a]), derive_seed(cfg.seed, a), 1);
    for (std::size_t l = 0; l < cfg.losses.size(); ++l) {
      const SweepRecord& r = records[a * cfg.losses.size() + l];
      EXPECT_EQ(r.regret, regret(cfg.losses[l], space, p));
    }
  }
}

TEST(Sweep, DeterministicPerSeed) {
  SweepConfig cfg;
  cfg.samples_per_alpha = 40;
  cfg.seed = 3;
  const auto a = regret_sweep(cfg);
  const auto b = regret_sweep(cfg);
  cfg.seed = 4;
  const auto c = regret_sweep(cfg);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].risk, b[i].risk);
    differs = differs || a[i].risk != c[i].risk;
  }
  EXPECT_TRUE(differs);
}

TEST(Sweep, TopKRecordHasZeroRegret) {
  SweepConfig cfg;
  cfg.samples_per_alpha = 20;
  cfg.losses = {LossId::kTopK, LossId::kL4};
  for (const SweepRecord& r : regret_sweep(cfg)) {
    if (r.loss == LossId::kTopK) EXPECT_EQ(r.regret, 0.0);
  }
  cfg.alphas = {};
  EXPECT_THROW(regret_sweep(cfg), std::invalid_argument);
}

TEST(Adam, ZeroGradientIsFixedPoint) {
  std::vector<double> params{1.0, -2.0, 3.0};
  AdamState state(3);
  for (int i = 0; i < 5; ++i) adam_step(params, std::vector<double>(3, 0.0), state, 0.01);
  EXPECT_EQ(params, (std::vector<double>{1.0, -2.0, 3.0}));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<double> params{0.0, 0.0, 0.0};
  AdamState state(3);
  adam_step(params, std::vector<double>{2.0, -0.5, 1e-3}, state, 0.01);
  EXPECT_NEAR(params[0], -0.01, 1e-9);
  EXPECT_NEAR(params[1], 0.01, 1e-9);
  EXPECT_NEAR(params[2], -0.01, 1e-7);
  EXPECT_EQ(state.step, 1u);
  EXPECT_THROW(adam_step(params, std::vector<double>{1.0}, state, 0.01),
               std::invalid_argument);
}

TEST(LinearModel, ScoresAreAffine) {
  LinearModel m(2);
  m.weights = {1, 2, 3, 4};
  m.bias = {0.5, -0.5};
  EXPECT_EQ(m.scores(std::vector<double>{1, 1}), (std::vector<double>{3.5, 6.5}));
  EXPECT_TRUE(m.finite());
  m.bias[0] = std::nan("");
  EXPECT_FALSE(m.finite());
}

TEST(Train, ZeroEpochsScoresInitialModel) {
  TrainConfig cfg = small_train();
  cfg.epochs = 0;
  const TrainResult r = train_and_eval(cfg);
  ASSERT_EQ(r.records.size(), cfg.losses.size());
  const auto [train, test] = make_datasets(cfg);
  // Zero scores link to {1, ..., k}.
  std::size_t misses = 0;
  for (Label y : test.labels) misses += y >= cfg.k;
  const double expected = double(misses) / double(test.labels.size());
  for (const LossOutcome& o : r.final_test) EXPECT_EQ(o.test_topk_loss, expected);
  for (const TrainRecord& rec : r.records) EXPECT_EQ(rec.epoch, 0u);
}

TEST(Train, RecordsEveryEpochAndIsDeterministic) {
  const TrainConfig cfg = small_train();
  const TrainResult a = train_and_eval(cfg);
  const TrainResult b = train_and_eval(cfg);
  ASSERT_EQ(a.records.size(), cfg.losses.size() * (cfg.epochs + 1));
  std::ostringstream sa, sb;
  write_csv(train_table(a.records), sa);
  write_csv(train_table(b.records), sb);
  EXPECT_EQ(sa.str(), sb.str());

  TrainConfig other = cfg;
  other.seed = 1;
  std::ostringstream sc;
  write_csv(train_table(train_and_eval(other).records), sc);
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Train, SurrogateLossDecreasesOnDefaultConfig) {
  const TrainResult r = train_and_eval(TrainConfig{});
  for (LossId id : TrainConfig{}.losses) {
    double first = 0.0, last = 0.0;
    for (const TrainRecord& rec : r.records) {
      if (rec.loss != id) continue;
      if (rec.epoch == 0) first = rec.train_surrogate_loss;
      last = rec.train_surrogate_loss;
    }
    EXPECT_LE(last, first) << to_string(id);
  }
}

TEST(Train, DatasetsFollowConfig) {
  const TrainConfig cfg = small_train();
  const auto [train, test] = make_datasets(cfg);
  EXPECT_EQ(train.labels.size(), 300u);
  EXPECT_EQ(test.features.size(), 100u);
  for (const auto& x : train.features) {
    double total = 0.0;
    for (double v : x) total += v;
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Train, ValidationErrors) {
  TrainConfig cfg = small_train();
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train_and_eval(cfg), std::invalid_argument);
  cfg = small_train();
  cfg.losses = {LossId::kTopK};
  EXPECT_THROW(train_and_eval(cfg), std::invalid_argument);
  cfg = small_train();
  cfg.k = 5;
  EXPECT_THROW(train_and_eval(cfg), std::invalid_argument);
  cfg = small_train();
  cfg.base_p = {0.5, 0.5, 0.0};
  EXPECT_THROW(train_and_eval(cfg), std::invalid_argument);
}

TEST(Train, DivergenceNamesTheLoss) {
  TrainConfig cfg = small_train();
  cfg.learning_rate = 1e308;
  cfg.losses = {LossId::kL3};
  try {
    train_and_eval(cfg);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("l3"), std::string::npos);
  }
}

TEST(Csv, FormattingAndEscaping) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0 / 3), "0.333333333333");
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Csv, HeaderOnlyAndOneRecord) {
  const auto dir = std::filesystem::temp_directory_path() / "topk_csv_test";
  std::filesystem::create_directories(dir);
  const auto empty = dir / "empty.csv";
  emit_csv(sweep_table({}), empty);
  EXPECT_EQ(slurp(empty), "alpha,loss,risk,regret,n_samples,seed\r\n");

  const std::vector<SweepRecord> one{{0.5, LossId::kL4, 0.25, 0.05, 10, 7}};
  const auto single = dir / "one.csv";
  emit_csv(sweep_table(one), single);
  EXPECT_EQ(slurp(single),
            "alpha,loss,risk,regret,n_samples,seed\r\n0.5,l4,0.25,0.05,10,7\r\n");

  const auto unicode = dir / "r\xC3\xA9gret.csv";
  emit_csv(sweep_table(one), unicode);
  EXPECT_EQ(slurp(unicode), slurp(single));

  EXPECT_THROW(emit_csv(sweep_table(one), dir / "missing" / "x.csv"), FileError);
  std::filesystem::remove_all(dir);
}

TEST(Config, ParsesSweepAndReportsEveryProblem) {
  const SweepConfig cfg = parse_sweep_config(
      nlohmann::json::parse(R"({"n": 4, "k": 2, "alphas": [1, 2], "seed": 9})"));
  EXPECT_EQ(cfg.n, 4u);
  EXPECT_EQ(cfg.alphas, (std::vector<double>{1, 2}));
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.samples_per_alpha, 1000u);

  try {
    parse_sweep_config(nlohmann::json::parse(
        R"({"n": "five", "alphas": [-1], "colour": 1})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.problems().size(), 3u);
  }
  EXPECT_THROW(parse_sweep_config(nlohmann::json::parse(R"({"n": 3, "k": 3})")),
               ConfigError);
}

TEST(Config, TrainAlphaScalarOrList) {
  const auto one = parse_train_configs(nlohmann::json::parse(R"({"alpha": 4})"));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].alpha, 4.0);
  const auto many = parse_train_configs(
      nlohmann::json::parse(R"({"alpha": [1, 16], "epochs": 0, "losses": ["lk"]})"));
  ASSERT_EQ(many.size(), 2u);
  EXPECT_EQ(many[1].alpha, 16.0);
  EXPECT_EQ(many[1].epochs, 0u);
  EXPECT_THROW(parse_train_configs(nlohmann::json::parse(R"({"losses": ["topk"]})")),
               ConfigError);
}

TEST(Config, Region) {
  const RegionScanConfig cfg = parse_region_config(nlohmann::json::parse(
      R"({"loss": "l4", "predicate": "p4", "n": 5, "k": 2, "samples": 10})"));
  EXPECT_EQ(cfg.loss, LossId::kL4);
  EXPECT_EQ(cfg.predicate, Predicate::kP4);
  EXPECT_EQ(cfg.samples, 10u);
  EXPECT_THROW(parse_region_config(nlohmann::json::parse(R"({"predicate": "p3", "k": 1})")),
               ConfigError);
  EXPECT_THROW(read_json_file("/nonexistent/file.json"), FileError);
}
