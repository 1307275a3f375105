#include "ftrl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ftrl/baselines.hpp"
#include "ftrl/bounds.hpp"
#include "ftrl/engine.hpp"
#include "ftrl/errors.hpp"
#include "ftrl/regularizers.hpp"

namespace ftrl {

using json = nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::quantile: return "quantile";
    case ExperimentKind::semiadv: return "semiadv";
    case ExperimentKind::lowerbound: return "lowerbound";
    case ExperimentKind::custom: return "custom";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(std::string_view name) {
  if (name == "quantile") return ExperimentKind::quantile;
  if (name == "semiadv") return ExperimentKind::semiadv;
  if (name == "lowerbound") return ExperimentKind::lowerbound;
  if (name == "custom") return ExperimentKind::custom;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::string ComparatorSpec::column_name() const {
  if (kind == "best") return "regret_best";
  if (kind == "weights") return "regret_weights";
  return "regret_" + kind + "_" + std::to_string(index);
}

// ---------------------------------------------------------------------------
// JSON schema

namespace {

constexpr std::string_view kAlgorithmNames[] = {"abnormal", "carl", "hedge", "normalhedge",
                                                "chi_squared", "ftrl"};
constexpr std::string_view kGenerators[] = {"shannon", "chi_squared", "root_log", "carl"};
constexpr std::string_view kPriors[] = {"uniform", "counting"};
constexpr std::string_view kSchedules[] = {"inverse_root", "carl_default", "hedge_default",
                                           "variance_prior", "variance_played"};
constexpr std::string_view kComparators[] = {"best", "quantile", "uniform_top", "expert", "weights"};

template <std::size_t N>
bool one_of(const std::string& value, const std::string_view (&options)[N]) {
  return std::find(std::begin(options), std::end(options), value) != std::end(options);
}

template <std::size_t N>
void require_one_of(const std::string& value, const std::string_view (&options)[N],
                    const std::string& where) {
  if (one_of(value, options)) return;
  std::string list;
  for (auto o : options) list += (list.empty() ? "" : ", ") + std::string(o);
  throw ConfigError(where + ": '" + value + "' is not one of {" + list + "}");
}

void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  if (!object.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

std::string read_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

double read_double(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + ": expected a finite number");
  return d;
}

Index read_index(const json& v, const std::string& where, Index min_value) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  const auto i = v.get<std::int64_t>();
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    throw ConfigError(where + ": integer too large");
  }
  if (i < min_value) throw ConfigError(where + ": must be >= " + std::to_string(min_value));
  return static_cast<Index>(i);
}

bool read_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw ConfigError(where + ": expected true or false");
  return v.get<bool>();
}

const json& read_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array");
  return v;
}

void require_positive(double v, const std::string& where) {
  if (!(v > 0.0)) throw ConfigError(where + ": must be positive");
}

void require_csv_safe(const std::string& s, const std::string& where) {
  if (s.find_first_of(",\"\n\r") != std::string::npos) {
    throw ConfigError(where + ": must not contain commas, quotes or line breaks");
  }
}

AlgorithmSpec parse_algorithm(const json& j, const std::string& where) {
  if (j.is_string()) {
    AlgorithmSpec a;
    a.name = j.get<std::string>();
    require_one_of(a.name, kAlgorithmNames, where + ".name");
    return a;
  }
  reject_unknown(j, {"name", "label", "generator", "prior", "schedule", "scale", "multiplier",
                     "curvature_bound"},
                 where);
  AlgorithmSpec a;
  if (!j.contains("name")) throw ConfigError(where + ": missing 'name'");
  a.name = read_string(j.at("name"), where + ".name");
  require_one_of(a.name, kAlgorithmNames, where + ".name");
  if (j.contains("label")) a.label = read_string(j.at("label"), where + ".label");
  if (j.contains("generator")) a.generator = read_string(j.at("generator"), where + ".generator");
  if (j.contains("prior")) a.prior = read_string(j.at("prior"), where + ".prior");
  if (j.contains("schedule")) a.schedule = read_string(j.at("schedule"), where + ".schedule");
  if (j.contains("scale")) a.scale = read_double(j.at("scale"), where + ".scale");
  if (j.contains("multiplier")) a.multiplier = read_double(j.at("multiplier"), where + ".multiplier");
  if (j.contains("curvature_bound")) {
    a.curvature_bound = read_double(j.at("curvature_bound"), where + ".curvature_bound");
  }
  require_csv_safe(a.label, where + ".label");
  require_one_of(a.generator, kGenerators, where + ".generator");
  require_one_of(a.prior, kPriors, where + ".prior");
  require_one_of(a.schedule, kSchedules, where + ".schedule");
  require_positive(a.scale, where + ".scale");
  require_positive(a.multiplier, where + ".multiplier");
  require_positive(a.curvature_bound, where + ".curvature_bound");
  return a;
}

EnvironmentSpec parse_environment(const json& j) {
  const std::string where = "environment";
  reject_unknown(j, {"good_experts", "replications", "rounds", "experts", "variants", "seed",
                     "repetitions", "quantile_index", "csv_path", "bernoulli_p", "lenient"},
                 where);
  EnvironmentSpec e;
  if (j.contains("good_experts")) e.good_experts = read_index(j.at("good_experts"), where + ".good_experts", 1);
  if (j.contains("replications")) {
    e.replications.clear();
    for (const auto& r : read_array(j.at("replications"), where + ".replications")) {
      e.replications.push_back(read_index(r, where + ".replications[]", 1));
    }
  }
  if (j.contains("rounds")) e.rounds = read_index(j.at("rounds"), where + ".rounds", 0);
  if (j.contains("experts")) e.experts = read_index(j.at("experts"), where + ".experts", 0);
  if (j.contains("variants")) {
    e.variants.clear();
    for (const auto& v : read_array(j.at("variants"), where + ".variants")) {
      e.variants.push_back(read_string(v, where + ".variants[]"));
    }
  }
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError(where + ".seed: expected a nonnegative integer");
    }
    e.seed = s.get<std::uint64_t>();
  }
  if (j.contains("repetitions")) e.repetitions = read_index(j.at("repetitions"), where + ".repetitions", 1);
  if (j.contains("quantile_index")) {
    e.quantile_index = read_index(j.at("quantile_index"), where + ".quantile_index", 1);
  }
  if (j.contains("csv_path")) e.csv_path = read_string(j.at("csv_path"), where + ".csv_path");
  if (j.contains("bernoulli_p")) e.bernoulli_p = read_double(j.at("bernoulli_p"), where + ".bernoulli_p");
  if (j.contains("lenient")) e.lenient = read_bool(j.at("lenient"), where + ".lenient");

  if (e.good_experts > 63) throw ConfigError(where + ".good_experts: must lie in [1, 63]");
  if (!(e.bernoulli_p >= 0.0 && e.bernoulli_p <= 1.0)) {
    throw ConfigError(where + ".bernoulli_p: must lie in [0, 1]");
  }
  for (const auto& v : e.variants) {
    try {
      semiadv_variant_from_string(v);
    } catch (const ContractError& err) {
      throw ConfigError(where + ".variants: " + err.what());
    }
  }
  return e;
}

ComparatorSpec parse_comparator(const json& j, const std::string& where) {
  reject_unknown(j, {"kind", "index", "weights"}, where);
  ComparatorSpec c;
  if (j.contains("kind")) c.kind = read_string(j.at("kind"), where + ".kind");
  require_one_of(c.kind, kComparators, where + ".kind");
  if (j.contains("index")) c.index = read_index(j.at("index"), where + ".index", 0);
  if (j.contains("weights")) {
    for (const auto& w : read_array(j.at("weights"), where + ".weights")) {
      c.weights.push_back(read_double(w, where + ".weights[]"));
    }
  }
  if ((c.kind == "quantile" || c.kind == "uniform_top") && c.index < 1) {
    throw ConfigError(where + ".index: must be >= 1 for " + c.kind);
  }
  if (c.kind == "weights" && c.weights.empty()) throw ConfigError(where + ".weights: required");
  return c;
}

ToleranceSpec parse_tolerances(const json& j) {
  reject_unknown(j, {"solver", "residual"}, "tolerances");
  ToleranceSpec t;
  if (j.contains("solver")) t.solver = read_double(j.at("solver"), "tolerances.solver");
  if (j.contains("residual")) t.residual = read_double(j.at("residual"), "tolerances.residual");
  require_positive(t.solver, "tolerances.solver");
  require_positive(t.residual, "tolerances.residual");
  return t;
}

json to_json(const AlgorithmSpec& a) {
  return json{{"name", a.name},         {"label", a.label},   {"generator", a.generator},
              {"prior", a.prior},       {"schedule", a.schedule}, {"scale", a.scale},
              {"multiplier", a.multiplier}, {"curvature_bound", a.curvature_bound}};
}

json to_json(const EnvironmentSpec& e) {
  return json{{"good_experts", e.good_experts}, {"replications", e.replications},
              {"rounds", e.rounds},             {"experts", e.experts},
              {"variants", e.variants},         {"seed", e.seed},
              {"repetitions", e.repetitions},   {"quantile_index", e.quantile_index},
              {"csv_path", e.csv_path},         {"bernoulli_p", e.bernoulli_p},
              {"lenient", e.lenient}};
}

json to_json(const ComparatorSpec& c) {
  return json{{"kind", c.kind}, {"index", c.index}, {"weights", c.weights}};
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  reject_unknown(root, {"experiment", "algorithms", "environment", "output_dir", "comparators",
                        "tolerances", "checkpoints", "snapshot_every", "threads"},
                 "config");
  ExperimentConfig c;
  if (root.contains("experiment")) {
    c.kind = experiment_kind_from_string(read_string(root.at("experiment"), "experiment"));
  }
  if (root.contains("algorithms")) {
    const auto& list = read_array(root.at("algorithms"), "algorithms");
    for (std::size_t k = 0; k < list.size(); ++k) {
      c.algorithms.push_back(parse_algorithm(list[k], "algorithms[" + std::to_string(k) + "]"));
    }
  }
  if (root.contains("environment")) c.environment = parse_environment(root.at("environment"));
  if (root.contains("output_dir")) c.output_dir = read_string(root.at("output_dir"), "output_dir");
  if (root.contains("comparators")) {
    const auto& list = read_array(root.at("comparators"), "comparators");
    for (std::size_t k = 0; k < list.size(); ++k) {
      c.comparators.push_back(parse_comparator(list[k], "comparators[" + std::to_string(k) + "]"));
    }
  }
  if (root.contains("tolerances")) c.tolerances = parse_tolerances(root.at("tolerances"));
  if (root.contains("checkpoints")) {
    for (const auto& t : read_array(root.at("checkpoints"), "checkpoints")) {
      c.checkpoints.push_back(read_index(t, "checkpoints[]", 1));
    }
  }
  if (root.contains("snapshot_every")) {
    c.snapshot_every = read_index(root.at("snapshot_every"), "snapshot_every", 0);
  }
  if (root.contains("threads")) {
    c.threads = static_cast<unsigned>(read_index(root.at("threads"), "threads", 1));
  }
  return c;
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path));
}

ExperimentConfig parse_config_for(std::string_view json_text, ExperimentKind kind) {
  ExperimentConfig c = parse_config(json_text);
  const bool declared = json::parse(json_text.begin(), json_text.end()).contains("experiment");
  if (declared && c.kind != kind) {
    throw ConfigError("config is for '" + std::string(to_string(c.kind)) + "', not '" +
                      std::string(to_string(kind)) + "'");
  }
  c.kind = kind;
  return c;
}

ExperimentConfig load_config_for(const std::filesystem::path& path, ExperimentKind kind) {
  return parse_config_for(read_text(path), kind);
}

std::string serialize_config(const ExperimentConfig& c) {
  json root;
  root["experiment"] = std::string(to_string(c.kind));
  root["algorithms"] = json::array();
  for (const auto& a : c.algorithms) root["algorithms"].push_back(to_json(a));
  root["environment"] = to_json(c.environment);
  root["output_dir"] = c.output_dir;
  root["comparators"] = json::array();
  for (const auto& q : c.comparators) root["comparators"].push_back(to_json(q));
  root["tolerances"] = json{{"solver", c.tolerances.solver}, {"residual", c.tolerances.residual}};
  root["checkpoints"] = c.checkpoints;
  root["snapshot_every"] = c.snapshot_every;
  root["threads"] = c.threads;
  return root.dump(2);
}

// ---------------------------------------------------------------------------
// Learners and play

std::unique_ptr<Learner> make_learner(const AlgorithmSpec& spec, Index experts,
                                      const SolverOptions& solver) {
  SessionOptions options;
  options.solver = solver;
  const std::string label = spec.display_name();
  auto named = [&](Session s) {
    return std::make_unique<Session>(s.generator(), s.prior(), s.schedule(), options, label);
  };
  if (spec.name == "abnormal") return named(make_abnormal(experts, options));
  if (spec.name == "carl") return named(make_ftrl_carl(experts, options));
  if (spec.name == "hedge") return named(make_hedge(experts, spec.multiplier, options));
  if (spec.name == "normalhedge") return std::make_unique<NormalHedge>(experts);
  if (spec.name == "chi_squared") {
    return std::make_unique<Session>(make_chi_squared(), Prior::uniform(experts),
                                     Schedule::inverse_root(std::sqrt(2.0)), options, label);
  }
  if (spec.name != "ftrl") throw ConfigError("unknown algorithm '" + spec.name + "'");

  DivergenceGenerator gen = make_shannon();
  if (spec.generator == "chi_squared") gen = make_chi_squared();
  else if (spec.generator == "root_log") gen = make_root_log();
  else if (spec.generator == "carl") gen = make_carl(experts);
  else if (spec.generator != "shannon") throw ConfigError("unknown generator '" + spec.generator + "'");

  Prior prior = spec.prior == "counting" ? Prior::counting(experts) : Prior::uniform(experts);

  Schedule schedule = Schedule::inverse_root(spec.scale);
  if (spec.schedule == "carl_default") schedule = Schedule::carl_default();
  else if (spec.schedule == "hedge_default") schedule = Schedule::hedge_default(spec.multiplier);
  else if (spec.schedule == "variance_prior") {
    schedule = Schedule::variance_adaptive(spec.curvature_bound, VarianceMode::prior);
  } else if (spec.schedule == "variance_played") {
    schedule = Schedule::variance_adaptive(spec.curvature_bound, VarianceMode::played);
  }
  return std::make_unique<Session>(std::move(gen), std::move(prior), std::move(schedule), options,
                                   label);
}

PlayResult play(Learner& learner, const LossMatrix& losses, const RoundObserver& observer,
                std::vector<WeightVector> tracked) {
  if (losses.experts() != learner.experts()) throw ContractError("play: expert count mismatch");
  PlayResult result{RegretTrajectory(losses.experts(), std::move(tracked)), 0.0};
  for (Index t = 0; t < losses.rounds(); ++t) {
    const WeightVector& w = learner.predict();
    const Vector loss = losses.row(t);
    if (observer) observer(t + 1, w, loss);
    const double realized = learner.update(loss);
    result.trajectory.record(realized, loss);
  }
  if (const auto* session = dynamic_cast<const Session*>(&learner)) {
    result.max_residual = session->max_residual();
  }
  return result;
}

std::vector<Index> default_checkpoints(Index rounds) {
  if (rounds < 1) throw ContractError("checkpoints: rounds must be >= 1");
  std::vector<Index> points;
  for (Index decade = 1; decade < rounds; decade *= 10) {
    for (Index m : {1, 2, 5}) {
      if (decade * m < rounds) points.push_back(decade * m);
    }
    if (decade > rounds / 10) break;
  }
  points.push_back(rounds);
  return points;
}

// ---------------------------------------------------------------------------
// Runners

namespace {

/// Runs fn(0..count-1) on up to `threads` workers. The exception of the
/// lowest failing index is rethrown.
void run_cells(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SolverOptions solver_options(const ExperimentConfig& config) {
  SolverOptions s;
  s.tolerance = config.tolerances.solver;
  return s;
}

void check_residual(double max_residual, const ExperimentConfig& config) {
  if (max_residual > config.tolerances.residual) {
    throw NumericError("normalization residual " + format_double(max_residual) +
                       " exceeds tolerance " + format_double(config.tolerances.residual));
  }
}

void require_kind(const ExperimentConfig& config, ExperimentKind kind) {
  if (config.kind != kind) {
    throw ConfigError("config describes a '" + std::string(to_string(config.kind)) +
                      "' experiment, not '" + std::string(to_string(kind)) + "'");
  }
}

std::vector<AlgorithmSpec> algorithms_or(const ExperimentConfig& config,
                                         std::initializer_list<const char*> defaults) {
  if (!config.algorithms.empty()) return config.algorithms;
  std::vector<AlgorithmSpec> out;
  for (const char* name : defaults) {
    AlgorithmSpec a;
    a.name = name;
    out.push_back(a);
  }
  return out;
}

Index or_default(Index value, Index fallback) { return value > 0 ? value : fallback; }

}  // namespace

QuantileResult compute_quantile(const ExperimentConfig& config) {
  require_kind(config, ExperimentKind::quantile);
  const auto algorithms = algorithms_or(config, {"abnormal", "hedge", "normalhedge"});
  const auto& env = config.environment;
  const Index rounds = or_default(env.rounds, kHadamardRounds);
  const Index good = env.good_experts;
  if (env.replications.empty()) throw ConfigError("environment.replications: must not be empty");

  const std::size_t n_alg = algorithms.size();
  const std::size_t cells = env.replications.size() * n_alg;
  std::vector<QuantileRow> rows(cells);
  std::vector<double> residuals(cells, 0.0);
  const SolverOptions solver = solver_options(config);
  const double kl = std::log(static_cast<double>(kHadamardBaseExperts) / static_cast<double>(good));

  run_cells(cells, config.threads, [&](std::size_t cell) {
    const Index r = env.replications[cell / n_alg];
    const auto& spec = algorithms[cell % n_alg];
    const LossMatrix losses = hadamard_losses(good, r, rounds);
    auto learner = make_learner(spec, losses.experts(), solver);
    const auto result = play(*learner, losses);
    rows[cell] = QuantileRow{losses.experts(), spec.display_name(), good, r,
                             quantile_regret(result.trajectory, good * r),
                             bound_abnormal(static_cast<double>(rounds), kl)};
    residuals[cell] = result.max_residual;
  });

  QuantileResult out;
  out.rows = std::move(rows);
  out.max_residual = *std::max_element(residuals.begin(), residuals.end());
  check_residual(out.max_residual, config);
  return out;
}

SemiAdvResult compute_semiadv(const ExperimentConfig& config) {
  require_kind(config, ExperimentKind::semiadv);
  const auto algorithms = algorithms_or(config, {"carl", "hedge"});
  const auto& env = config.environment;
  const Index experts = or_default(env.experts, 1000);
  const Index rounds = or_default(env.rounds, 10000);
  if (env.variants.empty()) throw ConfigError("environment.variants: must not be empty");
  if (experts < 2) throw ConfigError("environment.experts: semiadv needs at least two experts");
  std::vector<Index> checkpoints = config.checkpoints.empty() ? default_checkpoints(rounds)
                                                              : config.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (checkpoints.back() > rounds) throw ConfigError("checkpoints: must not exceed the horizon");

  const std::size_t n_alg = algorithms.size();
  const std::size_t cells = env.variants.size() * n_alg;
  std::vector<std::vector<SemiAdvRow>> blocks(cells);
  std::vector<double> residuals(cells, 0.0);
  const SolverOptions solver = solver_options(config);

  run_cells(cells, config.threads, [&](std::size_t cell) {
    const auto variant = semiadv_variant_from_string(env.variants[cell / n_alg]);
    const auto& spec = algorithms[cell % n_alg];
    const LossMatrix losses = semiadv_losses(variant, experts, rounds);
    const SemiAdvProfile profile = semiadv_profile(variant, experts);
    auto learner = make_learner(spec, experts, solver);
    const auto result = play(*learner, losses);
    for (Index t : checkpoints) {
      const double td = static_cast<double>(t);
      blocks[cell].push_back(SemiAdvRow{std::string(to_string(variant)), spec.display_name(), t,
                                        result.trajectory.best_regret(t), bound_carl(td, experts),
                                        bound_carl_refined(td, profile)});
    }
    residuals[cell] = result.max_residual;
  });

  SemiAdvResult out;
  for (auto& b : blocks) out.rows.insert(out.rows.end(), b.begin(), b.end());
  out.max_residual = *std::max_element(residuals.begin(), residuals.end());
  check_residual(out.max_residual, config);
  return out;
}

LowerBoundResult compute_lowerbound(const ExperimentConfig& config) {
  require_kind(config, ExperimentKind::lowerbound);
  if (config.algorithms.size() > 1) throw ConfigError("algorithms: lowerbound runs a single player");
  const AlgorithmSpec spec = algorithms_or(config, {"hedge"}).front();
  const auto& env = config.environment;
  const Index experts = or_default(env.experts, 64);
  const Index rounds = or_default(env.rounds, 4096);
  const Index reps = env.repetitions;
  const Index i_eps = env.quantile_index;
  if (4 * i_eps > experts) throw ConfigError("environment.quantile_index: must be at most N/4");

  std::vector<double> regrets(static_cast<std::size_t>(reps));
  std::vector<double> residuals(static_cast<std::size_t>(reps), 0.0);
  const SolverOptions solver = solver_options(config);
  const auto block = static_cast<std::uint64_t>(rounds) * static_cast<std::uint64_t>(experts);

  run_cells(regrets.size(), config.threads, [&](std::size_t rep) {
    RngStream stream{env.seed, static_cast<std::uint64_t>(rep) * block};
    const LossMatrix losses = bernoulli_losses(experts, rounds, stream, env.bernoulli_p);
    auto learner = make_learner(spec, experts, solver);
    const auto result = play(*learner, losses);
    regrets[rep] = quantile_regret(result.trajectory, i_eps);
    residuals[rep] = result.max_residual;
  });

  double mean = 0.0;
  for (double r : regrets) mean += r;
  mean /= static_cast<double>(reps);
  double ss = 0.0;
  for (double r : regrets) ss += (r - mean) * (r - mean);
  const double stderr_ =
      reps > 1 ? std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps)) : 0.0;

  LowerBoundResult out;
  out.row = LowerBoundRow{experts, i_eps, rounds, reps, mean, stderr_,
                          bound_lower_quantile(static_cast<double>(rounds), experts, i_eps)};
  out.regrets = std::move(regrets);
  out.max_residual = *std::max_element(residuals.begin(), residuals.end());
  check_residual(out.max_residual, config);
  return out;
}

CustomResult compute_custom(const ExperimentConfig& config) {
  require_kind(config, ExperimentKind::custom);
  const auto& env = config.environment;
  if (env.csv_path.empty()) throw ConfigError("environment.csv_path: required for custom runs");
  const LossMatrix losses = load_csv(env.csv_path, env.lenient);
  const Index experts = losses.experts();
  const auto algorithms = algorithms_or(config, {"hedge"});
  std::vector<ComparatorSpec> comparators = config.comparators;
  if (comparators.empty()) comparators.push_back(ComparatorSpec{});

  Vector final_cumulative = Vector::Zero(experts);
  for (Index t = 0; t < losses.rounds(); ++t) final_cumulative += losses.row(t);

  // Fixed comparators are tracked inside the trajectory; "best" is read off
  // the running minimum.
  std::vector<WeightVector> tracked;
  std::vector<int> slot(comparators.size(), -1);
  CustomResult out;
  for (std::size_t k = 0; k < comparators.size(); ++k) {
    const auto& c = comparators[k];
    const std::string where = "comparators[" + std::to_string(k) + "]";
    std::string column = c.column_name();
    if (c.kind == "weights") column += "_" + std::to_string(k);
    out.comparator_columns.push_back(column);
    if (c.kind == "best") continue;
    if (c.kind == "quantile") {
      if (c.index > experts) throw ConfigError(where + ".index: exceeds the expert count");
      const auto order = ascending_order(final_cumulative);
      tracked.push_back(WeightVector::one_hot(experts, order[static_cast<std::size_t>(c.index - 1)]));
    } else if (c.kind == "uniform_top") {
      if (c.index > experts) throw ConfigError(where + ".index: exceeds the expert count");
      tracked.push_back(uniform_top(final_cumulative, c.index));
    } else if (c.kind == "expert") {
      if (c.index >= experts) throw ConfigError(where + ".index: exceeds the expert count");
      tracked.push_back(WeightVector::one_hot(experts, c.index));
    } else {
      if (static_cast<Index>(c.weights.size()) != experts) {
        throw ConfigError(where + ".weights: length must equal the expert count");
      }
      try {
        tracked.emplace_back(Eigen::Map<const Vector>(c.weights.data(), experts));
      } catch (const ContractError& err) {
        throw ConfigError(where + ".weights: " + err.what());
      }
    }
    slot[k] = static_cast<int>(tracked.size()) - 1;
  }

  const std::size_t n_alg = algorithms.size();
  std::vector<std::vector<CustomRow>> blocks(n_alg);
  std::vector<std::vector<WeightSnapshot>> snaps(n_alg);
  std::vector<double> residuals(n_alg, 0.0);
  const SolverOptions solver = solver_options(config);

  run_cells(n_alg, config.threads, [&](std::size_t a) {
    const auto& spec = algorithms[a];
    auto learner = make_learner(spec, experts, solver);
    std::vector<double> mixture;
    mixture.reserve(static_cast<std::size_t>(losses.rounds()));
    auto observer = [&](Index t, const WeightVector& w, const Vector& loss) {
      mixture.push_back(w.values().dot(loss));
      if (config.snapshot_every > 0 && t % config.snapshot_every == 0) {
        snaps[a].push_back(WeightSnapshot{spec.display_name(), t, w.values()});
      }
    };
    const auto result = play(*learner, losses, observer, tracked);
    for (Index t = 1; t <= losses.rounds(); ++t) {
      CustomRow row{spec.display_name(), t, mixture[static_cast<std::size_t>(t - 1)], {}};
      for (std::size_t k = 0; k < comparators.size(); ++k) {
        row.regrets.push_back(slot[k] < 0
                                  ? result.trajectory.best_regret(t)
                                  : result.trajectory.tracked_regret(static_cast<std::size_t>(slot[k]), t));
      }
      blocks[a].push_back(std::move(row));
    }
    residuals[a] = result.max_residual;
  });

  for (std::size_t a = 0; a < n_alg; ++a) {
    out.rows.insert(out.rows.end(), blocks[a].begin(), blocks[a].end());
    out.snapshots.insert(out.snapshots.end(), snaps[a].begin(), snaps[a].end());
  }
  out.max_residual = *std::max_element(residuals.begin(), residuals.end());
  check_residual(out.max_residual, config);
  return out;
}

// ---------------------------------------------------------------------------
// Output

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw NumericError("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string quantile_csv(const QuantileResult& result) {
  std::string out = "N,algorithm,K,r,quantile_regret,abnormal_bound\n";
  for (const auto& r : result.rows) {
    out += std::to_string(r.experts) + "," + r.algorithm + "," + std::to_string(r.good) + "," +
           std::to_string(r.replication) + "," + format_double(r.quantile_regret) + "," +
           format_double(r.abnormal_bound) + "\n";
  }
  return out;
}

std::string semiadv_csv(const SemiAdvResult& result) {
  std::string out = "variant,algorithm,t,regret,carl_bound,carl_refined_bound\n";
  for (const auto& r : result.rows) {
    out += r.variant + "," + r.algorithm + "," + std::to_string(r.t) + "," + format_double(r.regret) +
           "," + format_double(r.carl_bound) + "," + format_double(r.carl_refined_bound) + "\n";
  }
  return out;
}

std::string lowerbound_csv(const LowerBoundResult& result) {
  const auto& r = result.row;
  return "N,i_eps,T,reps,mean_regret,stderr,lower_bound\n" + std::to_string(r.experts) + "," +
         std::to_string(r.i_eps) + "," + std::to_string(r.rounds) + "," +
         std::to_string(r.repetitions) + "," + format_double(r.mean_regret) + "," +
         format_double(r.standard_error) + "," + format_double(r.lower_bound) + "\n";
}

std::string trajectory_csv(const CustomResult& result) {
  std::string out = "algorithm,t,mixture_loss";
  for (const auto& c : result.comparator_columns) out += "," + c;
  out += "\n";
  for (const auto& r : result.rows) {
    out += r.algorithm + "," + std::to_string(r.t) + "," + format_double(r.mixture_loss);
    for (double v : r.regrets) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::string weights_csv(const CustomResult& result) {
  std::string out = "algorithm,t";
  const Index n = result.snapshots.empty() ? 0 : result.snapshots.front().weights.size();
  for (Index i = 0; i < n; ++i) out += ",w" + std::to_string(i);
  out += "\n";
  for (const auto& s : result.snapshots) {
    out += s.algorithm + "," + std::to_string(s.t);
    for (Index i = 0; i < s.weights.size(); ++i) out += "," + format_double(s.weights(i));
    out += "\n";
  }
  return out;
}

namespace {

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
  return path;
}

// Series in first-appearance order of their names.
ChartSeries& series_named(std::vector<ChartSeries>& all, const std::string& name) {
  for (auto& s : all) {
    if (s.name == name) return s;
  }
  all.push_back(ChartSeries{name, {}, {}});
  return all.back();
}

}  // namespace

std::vector<std::filesystem::path> run_quantile_experiment(const ExperimentConfig& config) {
  const auto result = compute_quantile(config);
  std::vector<std::filesystem::path> written;
  written.push_back(write_file(config.output_dir, "quantile.csv", quantile_csv(result)));
  std::vector<ChartSeries> series;
  for (const auto& r : result.rows) {
    auto& s = series_named(series, r.algorithm);
    s.x.push_back(static_cast<double>(r.experts));
    s.y.push_back(r.quantile_regret);
  }
  written.push_back(write_file(config.output_dir, "quantile.svg",
                               line_chart_svg("Quantile regret at T", "N (experts)",
                                              "regret", series, true)));
  return written;
}

std::vector<std::filesystem::path> run_semiadv_experiment(const ExperimentConfig& config) {
  const auto result = compute_semiadv(config);
  std::vector<std::filesystem::path> written;
  written.push_back(write_file(config.output_dir, "semiadv.csv", semiadv_csv(result)));
  std::vector<std::string> variants;
  for (const auto& r : result.rows) {
    if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) {
      variants.push_back(r.variant);
    }
  }
  for (const auto& v : variants) {
    std::vector<ChartSeries> series;
    for (const auto& r : result.rows) {
      if (r.variant != v) continue;
      auto& s = series_named(series, r.algorithm);
      s.x.push_back(static_cast<double>(r.t));
      s.y.push_back(r.regret);
    }
    ChartSeries bound{"sqrt(2 t log N)", {}, {}};
    for (const auto& r : result.rows) {
      if (r.variant != v || r.algorithm != result.rows.front().algorithm) continue;
      bound.x.push_back(static_cast<double>(r.t));
      bound.y.push_back(r.carl_bound);
    }
    series.push_back(std::move(bound));
    written.push_back(write_file(config.output_dir, "semiadv_" + v + ".svg",
                                 line_chart_svg("Best-expert regret (" + v + ")", "t", "regret",
                                                series, true)));
  }
  return written;
}

std::vector<std::filesystem::path> run_lowerbound_experiment(const ExperimentConfig& config) {
  const auto result = compute_lowerbound(config);
  return {write_file(config.output_dir, "lowerbound.csv", lowerbound_csv(result))};
}

std::vector<std::filesystem::path> run_custom(const ExperimentConfig& config) {
  const auto result = compute_custom(config);
  std::vector<std::filesystem::path> written;
  written.push_back(write_file(config.output_dir, "trajectory.csv", trajectory_csv(result)));
  if (config.snapshot_every > 0) {
    written.push_back(write_file(config.output_dir, "weights.csv", weights_csv(result)));
  }
  std::vector<ChartSeries> series;
  for (const auto& r : result.rows) {
    auto& s = series_named(series, r.algorithm);
    s.x.push_back(static_cast<double>(r.t));
    s.y.push_back(r.regrets.front());
  }
  written.push_back(write_file(config.output_dir, "trajectory.svg",
                               line_chart_svg("Regret (" + result.comparator_columns.front() + ")",
                                              "t", "regret", series, false)));
  return written;
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::quantile: return run_quantile_experiment(config);
    case ExperimentKind::semiadv: return run_semiadv_experiment(config);
    case ExperimentKind::lowerbound: return run_lowerbound_experiment(config);
    case ExperimentKind::custom: return run_custom(config);
  }
  throw ConfigError("unknown experiment kind");
}

// ---------------------------------------------------------------------------
// SVG

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, digits);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("0");
}

std::string tick_label(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 4);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("?");
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series,
                           bool log_x) {
  constexpr double kWidth = 720, kHeight = 480;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                     "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if ((log_x && !(s.x[k] > 0.0)) || !std::isfinite(s.y[k])) continue;
      x_lo = std::min(x_lo, tx(s.x[k]));
      x_hi = std::max(x_hi, tx(s.x[k]));
      y_lo = std::min(y_lo, s.y[k]);
      y_hi = std::max(y_hi, s.y[k]);
    }
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  y_lo = std::min(y_lo, 0.0);
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  y_hi += 0.05 * (y_hi - y_lo);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(title) << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 5; ++k) {
    const double y = y_lo + (y_hi - y_lo) * k / 5.0;
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fixed(py(y), 2) << "\" x2=\"" << kLeft
        << "\" y2=\"" << fixed(py(y), 2) << "\" stroke=\"black\"/>"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(py(y) + 4, 2)
        << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
  }
  std::vector<double> x_ticks;
  if (log_x) {
    for (double d = std::ceil(x_lo); d <= x_hi + 1e-9; d += 1.0) x_ticks.push_back(std::pow(10.0, d));
  }
  if (x_ticks.size() < 2) {
    x_ticks.clear();
    for (int k = 0; k <= 5; ++k) {
      const double v = x_lo + (x_hi - x_lo) * k / 5.0;
      x_ticks.push_back(log_x ? std::pow(10.0, v) : v);
    }
  }
  for (double x : x_ticks) {
    svg << "<line x1=\"" << fixed(px(x), 2) << "\" y1=\"" << kTop + plot_h << "\" x2=\""
        << fixed(px(x), 2) << "\" y2=\"" << kTop + plot_h + 4 << "\" stroke=\"black\"/>"
        << "<text x=\"" << fixed(px(x), 2) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if ((log_x && !(s.x[i] > 0.0)) || !std::isfinite(s.y[i])) continue;
      svg << (first ? "" : " ") << fixed(px(s.x[i]), 2) << "," << fixed(py(s.y[i]), 2);
      first = false;
    }
    svg << "\"/>\n";
    const double ly = kTop + 14 + 16 * static_cast<double>(k);
    svg << "<line x1=\"" << kLeft + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + 30
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>"
        << "<text x=\"" << kLeft + 36 << "\" y=\"" << ly << "\">" << xml_escape(s.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace ftrl
