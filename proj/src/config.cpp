#include "topk/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "topk/csv.hpp"

namespace topk {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out += (i == 0 ? "" : "; ") + parts[i];
  }
  return out;
}

// Reads typed fields from a JSON object, collecting every problem instead of
// stopping at the first.
class FieldReader {
 public:
  explicit FieldReader(const nlohmann::json& j) : j_(j) {
    if (!j_.is_object()) {
      problems_.push_back("config: expected a JSON object");
    }
  }

  void count(const char* name, std::size_t& out, std::size_t min_value) {
    const nlohmann::json* v = find(name);
    if (v == nullptr) return;
    if (!v->is_number_integer() || v->get<long long>() < 0 ||
        static_cast<std::size_t>(v->get<long long>()) < min_value) {
      problems_.push_back(std::string(name) + ": expected an integer >= " +
                          std::to_string(min_value));
      return;
    }
    out = v->get<std::size_t>();
  }

  void seed(const char* name, std::uint64_t& out) {
    const nlohmann::json* v = find(name);
    if (v == nullptr) return;
    if (!v->is_number_integer() ||
        (!v->is_number_unsigned() && v->get<long long>() < 0)) {
      problems_.push_back(std::string(name) + ": expected a nonnegative integer");
      return;
    }
    out = v->get<std::uint64_t>();
  }

  void positive(const char* name, double& out) {
    const nlohmann::json* v = find(name);
    if (v == nullptr) return;
    if (!v->is_number() || !(v->get<double>() > 0.0) ||
        !std::isfinite(v->get<double>())) {
      problems_.push_back(std::string(name) + ": expected a positive number");
      return;
    }
    out = v->get<double>();
  }

  void positive_list(const char* name, std::vector<double>& out) {
    const nlohmann::json* v = find(name);
    if (v == nullptr) return;
    std::vector<double> values;
    if (!read_positive_array(*v, values)) {
      problems_.push_back(std::string(name) +
                          ": expected a nonempty array of positive numbers");
      return;
    }
    out = std::move(values);
  }

  // Number or array of numbers.
  void positive_scalar_or_list(const char* name, std::vector<double>& out) {
    const nlohmann::json* v = find(name);
    if (v == nullptr) return;
    if (v->is_number()) {
      const double x = v->get<double>();
      if (x > 0.0 && std::isfinite(x)) {
        out = {x};
        return;
      }
    } else {
      std::vector<double> values;
      if (read_positive_array(*v, values)) {
        out = std::move(values);
        return;
      }
    }
    problems_.push_back(std::string(name) +
                        ": expected a positive number or array of them");
  }

  void losses(const char* name, std::vector<LossId>& out, bool surrogates_only) {
    const nlohmann::json* v = find(name);
    if (v == nullptr) return;
    std::vector<LossId> ids;
    bool ok = v->is_array() && !v->empty();
    if (ok) {
      for (const auto& item : *v) {
        if (!item.is_string()) {
          ok = false;
          break;
        }
        try {
          const LossId id = parse_loss_id(item.get<std::string>());
          if (surrogates_only && !is_surrogate(id)) {
            ok = false;
            break;
          }
          ids.push_back(id);
        } catch (const std::invalid_argument&) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      problems_.push_back(std::string(name) + ": expected a nonempty array of " +
                          (surrogates_only ? "\"l2\", \"l3\", \"l4\", \"lk\""
                                           : "loss names"));
      return;
    }
    out = std::move(ids);
  }

  void loss(const char* name, LossId& out) {
    const nlohmann::json* v = find(name);
    if (v == nullptr) return;
    try {
      if (!v->is_string()) throw std::invalid_argument("not a string");
      const LossId id = parse_loss_id(v->get<std::string>());
      if (!is_surrogate(id)) throw std::invalid_argument("not a surrogate");
      out = id;
    } catch (const std::invalid_argument&) {
      problems_.push_back(std::string(name) +
                          ": expected one of \"l2\", \"l3\", \"l4\", \"lk\"");
    }
  }

  void predicate(const char* name, Predicate& out) {
    const nlohmann::json* v = find(name);
    if (v == nullptr) return;
    try {
      if (!v->is_string()) throw std::invalid_argument("not a string");
      out = parse_predicate(v->get<std::string>());
    } catch (const std::invalid_argument&) {
      problems_.push_back(std::string(name) +
                          ": expected one of \"p2\", \"p3\", \"p4\", \"none\"");
    }
  }

  // Flags unknown fields and throws if anything went wrong.
  void finish() {
    if (j_.is_object()) {
      for (const auto& item : j_.items()) {
        if (known_.count(item.key()) == 0) {
          problems_.push_back(item.key() + ": unknown field");
        }
      }
    }
    if (!problems_.empty()) {
      throw ConfigError(problems_);
    }
  }

 private:
  const nlohmann::json* find(const char* name) {
    known_.insert(name);
    if (!j_.is_object()) return nullptr;
    const auto it = j_.find(name);
    return it == j_.end() ? nullptr : &*it;
  }

  static bool read_positive_array(const nlohmann::json& v,
                                  std::vector<double>& out) {
    if (!v.is_array() || v.empty()) return false;
    for (const auto& item : v) {
      if (!item.is_number()) return false;
      const double x = item.get<double>();
      if (!(x > 0.0) || !std::isfinite(x)) return false;
      out.push_back(x);
    }
    return true;
  }

  const nlohmann::json& j_;
  std::set<std::string> known_;
  std::vector<std::string> problems_;
};

template <typename F>
void revalidate(F&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError({e.what()});
  } catch (const std::domain_error& e) {
    throw ConfigError({e.what()});
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid config: " + join(problems)),
      problems_(std::move(problems)) {}

SweepConfig parse_sweep_config(const nlohmann::json& j) {
  SweepConfig cfg;
  FieldReader r(j);
  r.count("n", cfg.n, 2);
  r.count("k", cfg.k, 1);
  r.positive_list("alphas", cfg.alphas);
  r.count("samples_per_alpha", cfg.samples_per_alpha, 1);
  r.seed("seed", cfg.seed);
  r.losses("losses", cfg.losses, false);
  r.finish();
  revalidate([&] {
    validate(cfg);
    if (cfg.n > kMaxEnumerationLabels) {
      throw std::invalid_argument("n: at most " +
                                  std::to_string(kMaxEnumerationLabels));
    }
  });
  return cfg;
}

std::vector<TrainConfig> parse_train_configs(const nlohmann::json& j) {
  TrainConfig base;
  std::vector<double> alphas{base.alpha};
  FieldReader r(j);
  r.positive_list("base_p", base.base_p);
  r.count("k", base.k, 1);
  r.positive_scalar_or_list("alpha", alphas);
  r.count("train_size", base.train_size, 1);
  r.count("test_size", base.test_size, 1);
  r.count("epochs", base.epochs, 0);
  r.positive("learning_rate", base.learning_rate);
  r.count("batch_size", base.batch_size, 1);
  r.seed("seed", base.seed);
  r.losses("losses", base.losses, true);
  r.finish();
  std::vector<TrainConfig> out;
  for (double a : alphas) {
    TrainConfig cfg = base;
    cfg.alpha = a;
    revalidate([&] { validate(cfg); });
    out.push_back(std::move(cfg));
  }
  return out;
}

RegionScanConfig parse_region_config(const nlohmann::json& j) {
  std::size_t n = 5;
  std::size_t k = 2;
  RegionScanConfig cfg;
  FieldReader r(j);
  r.loss("loss", cfg.loss);
  r.predicate("predicate", cfg.predicate);
  r.count("n", n, 2);
  r.count("k", k, 1);
  r.positive_list("alpha", cfg.alpha);
  r.count("samples", cfg.samples, 1);
  r.seed("seed", cfg.seed);
  r.finish();
  revalidate([&] {
    cfg.space = LabelSpace(n, k);
    if (n > kMaxEnumerationLabels) {
      throw std::invalid_argument("n: at most " +
                                  std::to_string(kMaxEnumerationLabels));
    }
    if (!cfg.alpha.empty() && cfg.alpha.size() != n) {
      throw std::invalid_argument("alpha: needs one entry per label");
    }
    if (cfg.predicate == Predicate::kP3 && k < 2) {
      throw std::invalid_argument("predicate: p3 needs k >= 2");
    }
  });
  return cfg;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FileError("cannot open '" + path.string() + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
}

}  // namespace topk
