#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topk/config.hpp"
#include "topk/consistency.hpp"
#include "topk/csv.hpp"
#include "topk/experiments.hpp"
#include "topk/json_io.hpp"
#include "topk/properties.hpp"

using namespace topk;
using nlohmann::json;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

// p within this distance of the simplex is rescaled with a warning.
constexpr double kRenormalizeTolerance = 1e-6;
constexpr double kSilentTolerance = 1e-9;

// Raised for inputs that parse but make no sense together.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_reals(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size() ||
        !std::isfinite(value)) {
      throw InputError(std::string(flag) + ": '" + item + "' is not a number");
    }
    out.push_back(value);
    start = comma + 1;
  }
  return out;
}

LabelSet parse_labels(const std::string& text, const char* flag, std::size_t n) {
  LabelSet out;
  for (double v : parse_reals(text, flag)) {
    if (v != std::floor(v) || v < 1 || v > static_cast<double>(n)) {
      throw InputError(std::string(flag) + ": labels must be integers in 1.." +
                       std::to_string(n));
    }
    out.push_back(static_cast<Label>(v) - 1);
  }
  return out;
}

ProbVector read_p(const std::string& text, std::size_t n) {
  std::vector<double> p = parse_reals(text, "--p");
  if (p.size() != n) {
    throw InputError("--p has " + std::to_string(p.size()) +
                     " entries, expected " + std::to_string(n));
  }
  double total = 0.0;
  for (double x : p) total += x;
  ProbVector out = ProbVector::normalized(p, kRenormalizeTolerance);
  if (std::abs(total - 1.0) > kSilentTolerance) {
    std::cerr << "warning: --p sums to " << format_double(total)
              << "; renormalized\n";
  }
  return out;
}

std::string fmt(double x) { return format_double(x); }

// Rounds every float in place to the printed precision.
void round_numbers(json& j) {
  if (j.is_number_float()) {
    j = std::stod(format_double(j.get<double>()));
  } else if (j.is_structured()) {
    for (auto& item : j) round_numbers(item);
  }
}

void print_json(json j) {
  round_numbers(j);
  std::cout << j.dump(2) << "\n";
}

void write_table(const CsvTable& table, const std::string& out) {
  if (out.empty()) {
    write_csv(table, std::cout);
  } else {
    emit_csv(table, out);
  }
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json j = read_json_file(path);
  if (!j.is_object()) throw ConfigError({"config: expected a JSON object"});
  return j;
}

struct Common {
  std::string loss;
  std::size_t n = 0;
  std::size_t k = 0;
};

void add_common(CLI::App* cmd, Common& c, bool required) {
  auto* loss = cmd->add_option("--loss", c.loss, "topk, l2, l3, l4 or lk");
  auto* n = cmd->add_option("--n", c.n, "number of labels")->check(CLI::PositiveNumber);
  auto* k = cmd->add_option("--k", c.k, "set size")->check(CLI::PositiveNumber);
  if (required) {
    loss->required();
    n->required();
    k->required();
  }
}

int cmd_eval(const Common& c, const std::optional<std::string>& u,
             const std::optional<std::string>& set, std::size_t y) {
  const LossId id = parse_loss_id(c.loss);
  const LabelSpace space(c.n, c.k);
  if (y < 1 || y > c.n) {
    throw InputError("--y must be in 1.." + std::to_string(c.n));
  }
  double value = 0.0;
  if (id == LossId::kTopK) {
    if (!set) throw InputError("--loss topk needs --set");
    const LabelSet members = parse_labels(*set, "--set", c.n);
    if (members.size() != c.k) {
      throw InputError("--set needs exactly k labels");
    }
    value = topk_loss(space, TopKSet(members), y - 1);
  } else {
    if (!u) throw InputError("--loss " + c.loss + " needs --u");
    const std::vector<double> scores = parse_reals(*u, "--u");
    if (scores.size() != c.n) {
      throw InputError("--u has " + std::to_string(scores.size()) +
                       " entries, expected " + std::to_string(c.n));
    }
    value = surrogate_loss(id, scores, y - 1, c.k);
  }
  std::cout << fmt(value) << "\n";
  return 0;
}

int cmd_prop(const Common& c, const std::string& p_text) {
  const LossId id = parse_loss_id(c.loss);
  const LabelSpace space(c.n, c.k);
  const ProbVector p = read_p(p_text, c.n);
  json out{{"loss", to_string(id)}, {"n", c.n}, {"k", c.k}};
  if (id == LossId::kTopK) {
    json sets = json::array();
    for (const TopKSet& s : prop_topk(p, c.k)) sets.push_back(to_json(s));
    out["optima"] = sets;
    out["min_value"] = bayes_risk_topk(p, c.k);
  } else {
    if (c.n > kMaxEnumerationLabels) {
      throw InputError("--n: at most " + std::to_string(kMaxEnumerationLabels));
    }
    const RepresentativeSet reps = representative_set(id, space);
    const PropertyValue value = prop_over_reps(reps, p);
    out.update(to_json(value, reps));
    const TopKSet link =
        argmax_link(reps.entries[value.entries.front()].embedded, c.k);
    out["link"] = to_json(link);
    out["link_risk"] = expected_loss(LossId::kTopK, link, p, space);
    if (id == LossId::kL4) out["greedy"] = to_json(greedy_prop_l4(p, c.k));
  }
  print_json(std::move(out));
  return 0;
}

int cmd_audit_single(const Common& c, const std::string& p_text) {
  const LossId id = parse_loss_id(c.loss);
  if (!is_surrogate(id)) throw InputError("--loss must be a surrogate");
  const ProbVector p = read_p(p_text, c.n);
  json out = to_json(audit(id, LabelSpace(c.n, c.k), p));
  out["loss"] = to_string(id);
  print_json(std::move(out));
  return 0;
}

// Config: {"loss", "n", "k", "p": [[...], ...]}.
int cmd_audit_batch(const std::string& config, const std::string& out_path) {
  const json j = load_config(config);
  std::vector<std::string> problems;
  for (const auto& item : j.items()) {
    if (item.key() != "loss" && item.key() != "n" && item.key() != "k" &&
        item.key() != "p") {
      problems.push_back(item.key() + ": unknown field");
    }
  }
  for (const char* field : {"loss", "n", "k", "p"}) {
    if (!j.contains(field)) problems.push_back(std::string(field) + ": required");
  }
  if (!problems.empty()) throw ConfigError(problems);
  if (!j["loss"].is_string() || !j["n"].is_number_unsigned() ||
      !j["k"].is_number_unsigned() || !j["p"].is_array()) {
    throw ConfigError({"expected loss string, n and k integers, p array"});
  }
  const LossId id = parse_loss_id(j["loss"].get<std::string>());
  if (!is_surrogate(id)) throw ConfigError({"loss: must be a surrogate"});
  const LabelSpace space(j["n"].get<std::size_t>(), j["k"].get<std::size_t>());
  const RepresentativeSet reps = representative_set(id, space);

  CsvTable table;
  table.header = {"sample_id"};
  for (std::size_t i = 1; i <= space.n(); ++i) {
    table.header.push_back("p" + std::to_string(i));
  }
  table.header.insert(table.header.end(), {"link_consistent", "link_agnostic"});
  std::size_t consistent = 0;
  for (std::size_t s = 0; s < j["p"].size(); ++s) {
    const json& row = j["p"][s];
    std::vector<double> values;
    try {
      values = row.get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError({"p[" + std::to_string(s) + "]: expected numbers"});
    }
    if (values.size() != space.n()) {
      throw ConfigError({"p[" + std::to_string(s) + "]: expected n entries"});
    }
    const ProbVector p = ProbVector::normalized(values, kRenormalizeTolerance);
    const AuditVerdict v = audit(reps, p);
    consistent += v.link_consistent;
    std::vector<std::string> cells{std::to_string(s)};
    for (double x : p.values()) cells.push_back(fmt(x));
    cells.push_back(v.link_consistent ? "true" : "false");
    cells.push_back(v.link_agnostic_consistent ? "true" : "false");
    table.rows.push_back(std::move(cells));
  }
  write_table(table, out_path);
  std::cerr << "audited " << table.rows.size() << " distributions; "
            << consistent << " link-consistent\n";
  return 0;
}

int cmd_region(const RegionScanConfig& cfg, const std::string& out_path) {
  const RegionScan scan = region_scan(cfg);
  CsvTable table;
  table.header = {"sample_id"};
  for (std::size_t i = 1; i <= cfg.space.n(); ++i) {
    table.header.push_back("p" + std::to_string(i));
  }
  table.header.insert(table.header.end(),
                      {"predicate", "link_consistent", "link_agnostic", "near_tie"});
  const auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
  for (const RegionRecord& r : scan.records) {
    std::vector<std::string> cells{std::to_string(r.sample_id)};
    for (double x : r.p) cells.push_back(fmt(x));
    cells.insert(cells.end(), {flag(r.predicate), flag(r.link_consistent),
                               flag(r.link_agnostic), flag(r.near_tie)});
    table.rows.push_back(std::move(cells));
  }
  write_table(table, out_path);
  const RegionSummary& s = scan.summary;
  std::cerr << "loss=" << to_string(cfg.loss)
            << " predicate=" << to_string(cfg.predicate) << " samples=" << s.samples
            << " predicate_true=" << s.predicate_true
            << " link_consistent=" << s.link_consistent
            << " near_ties=" << s.near_ties << " implication_rate="
            << (s.implication_rate ? fmt(*s.implication_rate) : std::string("n/a"))
            << "\n";
  return 0;
}

int cmd_sweep(const SweepConfig& cfg, const std::string& out_path) {
  const std::vector<SweepRecord> records = regret_sweep(cfg);
  write_table(sweep_table(records), out_path);
  std::cerr << "sweep: " << records.size() << " records\n";
  return 0;
}

int cmd_train(const std::vector<TrainConfig>& configs, const std::string& out_path) {
  std::vector<TrainRecord> records;
  for (const TrainConfig& cfg : configs) {
    const TrainResult r = train_and_eval(cfg);
    records.insert(records.end(), r.records.begin(), r.records.end());
    for (const LossOutcome& o : r.final_test) {
      std::cerr << "alpha=" << fmt(cfg.alpha) << " loss=" << to_string(o.loss)
                << " test_topk_loss=" << fmt(o.test_topk_loss) << "\n";
    }
  }
  write_table(train_table(records), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-k surrogate losses: evaluation, properties, audits and experiments"};
  app.require_subcommand(1);

  Common common;
  std::optional<std::string> u, set, p_text, alpha_text;
  std::size_t y = 0;
  std::string config, out, predicate;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;

  auto* eval = app.add_subcommand("eval", "evaluate a loss at one report and label");
  add_common(eval, common, true);
  auto* u_opt = eval->add_option("--u", u, "comma-separated scores");
  eval->add_option("--set", set, "comma-separated 1-based labels")->excludes(u_opt);
  eval->add_option("--y", y, "1-based label")->required();

  auto* prop = app.add_subcommand("prop", "optimal reports for p");
  add_common(prop, common, true);
  prop->add_option("--p", p_text, "comma-separated probabilities")->required();

  auto* audit_cmd = app.add_subcommand(
      "audit", "check that linked surrogate optima are top-k optimal");
  add_common(audit_cmd, common, false);
  auto* audit_p = audit_cmd->add_option("--p", p_text, "comma-separated probabilities");
  audit_cmd->add_option("--config", config, "JSON with loss, n, k and a list p")
      ->excludes(audit_p);
  audit_cmd->add_option("--out", out, "CSV output (default stdout)");

  auto* region = app.add_subcommand("region", "sample p and test predicate implications");
  region->add_option("--config", config, "JSON region config");
  region->add_option("--loss", common.loss, "l2, l3, l4 or lk");
  region->add_option("--predicate", predicate, "p2, p3, p4 or none");
  region->add_option("--n", common.n, "number of labels");
  region->add_option("--k", common.k, "set size");
  region->add_option("--alpha", alpha_text, "comma-separated Dirichlet concentrations");
  region->add_option("--samples", samples, "number of samples");
  region->add_option("--seed", seed, "random seed");
  region->add_option("--out", out, "CSV output (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "regret over the concentration grid");
  sweep->add_option("--config", config, "JSON sweep config");
  sweep->add_option("--seed", seed, "random seed");
  sweep->add_option("--out", out, "CSV output (default stdout)");

  auto* train = app.add_subcommand("train", "train linear models per surrogate");
  train->add_option("--config", config, "JSON train config");
  train->add_option("--seed", seed, "random seed");
  train->add_option("--out", out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (eval->parsed()) return cmd_eval(common, u, set, y);
    if (prop->parsed()) return cmd_prop(common, *p_text);
    if (audit_cmd->parsed()) {
      if (!config.empty()) return cmd_audit_batch(config, out);
      if (!p_text || common.loss.empty() || common.n == 0 || common.k == 0) {
        std::cerr << "audit needs --loss, --n, --k and --p, or --config\n"
                  << audit_cmd->help();
        return kExitUsage;
      }
      return cmd_audit_single(common, *p_text);
    }
    // Flags override config-file fields.
    json j = load_config(config);
    if (seed) j["seed"] = *seed;
    if (region->parsed()) {
      if (!common.loss.empty()) j["loss"] = common.loss;
      if (!predicate.empty()) j["predicate"] = predicate;
      if (common.n != 0) j["n"] = common.n;
      if (common.k != 0) j["k"] = common.k;
      if (samples) j["samples"] = *samples;
      if (alpha_text) j["alpha"] = parse_reals(*alpha_text, "--alpha");
      return cmd_region(parse_region_config(j), out);
    }
    if (sweep->parsed()) return cmd_sweep(parse_sweep_config(j), out);
    if (train->parsed()) return cmd_train(parse_train_configs(j), out);
  } catch (const ConfigError& e) {
    std::cerr << "error: invalid config\n";
    for (const std::string& problem : e.problems()) {
      std::cerr << "  " << problem << "\n";
    }
    return kExitDomain;
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::logic_error& e) {
    // invalid_argument, domain_error, out_of_range
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
