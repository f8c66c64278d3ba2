#include "bdp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "bdp/lognorm.hpp"
#include "bdp/verify.hpp"

namespace bdp {
namespace {

[[noreturn]] void config_fail(const std::string &field, const std::string &what) {
  throw Error(ErrorCode::config_error, "field '" + field + "': " + what);
}

std::string join(const std::string &path, const std::string &key) {
  return path.empty() ? key : path + "." + key;
}

void allow_keys(const Json &obj, const std::string &path, std::initializer_list<const char *> keys) {
  if (!obj.is_object())
    config_fail(path.empty() ? "<root>" : path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::none_of(keys.begin(), keys.end(), [&](const char *k) { return it.key() == k; }))
      config_fail(join(path, it.key()), "unknown key");
}

double get_number(const Json &obj, const std::string &path, const char *key, double fallback) {
  if (!obj.contains(key))
    return fallback;
  const Json &v = obj.at(key);
  if (!v.is_number())
    config_fail(join(path, key), "expected a number");
  return v.get<double>();
}

std::optional<double> get_optional(const Json &obj, const std::string &path, const char *key) {
  if (!obj.contains(key) || obj.at(key).is_null())
    return std::nullopt;
  return get_number(obj, path, key, 0.0);
}

long long get_integer(const Json &obj, const std::string &path, const char *key, long long fallback) {
  if (!obj.contains(key))
    return fallback;
  const Json &v = obj.at(key);
  if (!v.is_number_integer())
    config_fail(join(path, key), "expected an integer");
  return v.get<long long>();
}

std::string get_string(const Json &obj, const std::string &path, const char *key,
                       const std::string &fallback) {
  if (!obj.contains(key))
    return fallback;
  const Json &v = obj.at(key);
  if (!v.is_string())
    config_fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_numbers(const Json &obj, const std::string &path, const char *key) {
  std::vector<double> out;
  if (!obj.contains(key))
    return out;
  const Json &v = obj.at(key);
  if (!v.is_array())
    config_fail(join(path, key), "expected an array of numbers");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      config_fail(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<std::size_t> get_indices(const Json &obj, const std::string &path, const char *key,
                                     std::vector<std::size_t> fallback) {
  if (!obj.contains(key))
    return fallback;
  const Json &v = obj.at(key);
  if (!v.is_array())
    config_fail(join(path, key), "expected an array of state indices");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer() || v[i].get<long long>() < 0)
      config_fail(join(path, key) + "[" + std::to_string(i) + "]", "expected a nonnegative integer");
    out.push_back(v[i].get<std::size_t>());
  }
  return out;
}

VanishingForm parse_vanishing(const Json &j, const std::string &path) {
  allow_keys(j, path, {"form", "scale", "rate", "exponent"});
  const std::string form = get_string(j, path, "form", "none");
  if (form == "none")
    return NoDecay{};
  if (form == "exponential") {
    const double rate = get_number(j, path, "rate", 1.0);
    if (!(rate > 0.0))
      config_fail(join(path, "rate"), "must be positive");
    return ExponentialDecay{get_number(j, path, "scale", 0.0), rate};
  }
  if (form == "power") {
    const double ex = get_number(j, path, "exponent", 1.0);
    if (!(ex > 0.0))
      config_fail(join(path, "exponent"), "must be positive");
    return PowerDecay{get_number(j, path, "scale", 0.0), ex};
  }
  config_fail(join(path, "form"), "unknown vanishing form '" + form + "'");
}

std::string fmt(double x) { return format_double(x); }

const std::set<std::string> known_analyses{"feasibility", "bounds", "verify", "spectrum",
                                           "cesaro"};

std::set<std::string> resolve_analyses(Command cmd, const std::set<std::string> &configured) {
  std::set<std::string> out;
  switch (cmd) {
  case Command::run:
    out = configured;
    break;
  case Command::feasibility:
    out = {"feasibility"};
    break;
  case Command::bounds:
    out = {"bounds"};
    break;
  case Command::verify:
    out = {"verify"};
    break;
  case Command::spectrum:
    out = {"spectrum"};
    break;
  case Command::sweep:
    return {};
  }
  // Dependency closure: verify -> bounds -> feasibility.
  if (out.count("verify"))
    out.insert("bounds");
  if (out.count("bounds"))
    out.insert("feasibility");
  return out;
}

Json model_json(const BirthDeathSpec &spec) {
  Json j{{"preset", spec.preset().empty() ? Json(nullptr) : Json(spec.preset())},
         {"finite", spec.is_finite()},
         {"top_state", spec.top()},
         {"servers", spec.servers()},
         {"birth_limit", number(spec.birth_limit())},
         {"death_limit", number(spec.death_limit())},
         {"a_mean", number(spec.a().long_run_average())},
         {"b_mean", number(spec.b().long_run_average())}};
  return j;
}

Json header(const char *command) {
  return Json{{"schema_version", schema_version}, {"command", command}};
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width)
    s.append(width - s.size(), ' ');
  return s;
}

// Sweep row: preset weights for one parameter value, plus the auto search.
Json sweep_row(const RunConfig &config, double value) {
  RunConfig local = config;
  Json row{{"value", number(value)}};
  try {
    if (config.sweep.parameter == "rho") {
      const double s = std::max(1, local.model.params.servers);
      local.model.params.lambda =
          value * s * local.model.params.mu * local.b.long_run_average() / local.a.long_run_average();
    } else {
      local.weights.preset.epsilon = value;
    }
    const BirthDeathSpec spec = build_spec(local);
    const PresetWeights pw = preset_weights(spec, local.weights.preset);
    row["rho"] = number(traffic_intensity(spec));
    row["regime"] = pw.regime;
    row["direction"] = pw.direction == Direction::ergodic ? "ergodic" : "null";
    row["rate_a"] = number(pw.rate.a_coef);
    row["rate_b"] = number(pw.rate.b_coef);
    row["rate_mean"] = number(pw.rate.mean(spec.a(), spec.b()));
    try {
      if (pw.direction == Direction::ergodic)
        row["auto_mean"] = number(find_ergodic_weights(spec).feasibility.drift_mean);
      else
        row["auto_mean"] = number(find_null_weights(spec).feasibility.drift_mean);
    } catch (const Error &e) {
      row["auto_mean"] = "nan";
    }
    row["note"] = pw.notes.empty() ? "" : pw.notes.front();
  } catch (const Error &e) {
    row["regime"] = "error";
    row["note"] = e.what();
  }
  return row;
}

std::string csv_field(const Json &j) {
  if (j.is_number_float())
    return format_double(j.get<double>());
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char ch : s)
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
    return s;
  }
  if (j.is_null())
    return "";
  return j.dump();
}

} // namespace

RateFunction parse_rate(const Json &j, const std::string &field) {
  if (j.is_number())
    return RateFunction::constant(j.get<double>());
  allow_keys(j, field,
             {"form", "value", "mean", "amplitude", "cos", "sin", "knots", "breaks", "values",
              "period", "vanishing"});
  const std::string form = get_string(j, field, "form", "constant");
  const double period = get_number(j, field, "period", 1.0);
  if (!(period > 0.0))
    config_fail(join(field, "period"), "must be positive");
  VanishingForm vanishing = NoDecay{};
  if (j.contains("vanishing"))
    vanishing = parse_vanishing(j.at("vanishing"), join(field, "vanishing"));
  PeriodicForm periodic;
  if (form == "constant") {
    periodic = ConstantForm{get_number(j, field, "value", 0.0)};
  } else if (form == "sinusoid") {
    periodic = TrigSeriesForm{get_number(j, field, "mean", 0.0), {},
                              {get_number(j, field, "amplitude", 0.0)}};
  } else if (form == "trig") {
    periodic = TrigSeriesForm{get_number(j, field, "mean", 0.0), get_numbers(j, field, "cos"),
                              get_numbers(j, field, "sin")};
  } else if (form == "piecewise_linear") {
    periodic = PiecewiseLinearForm{get_numbers(j, field, "knots"), get_numbers(j, field, "values")};
  } else if (form == "piecewise_constant") {
    periodic =
        PiecewiseConstantForm{get_numbers(j, field, "breaks"), get_numbers(j, field, "values")};
  } else {
    config_fail(join(field, "form"), "unknown form '" + form + "'");
  }
  try {
    return RateFunction(periodic, period, vanishing);
  } catch (const Error &e) {
    if (e.code() == ErrorCode::invalid_parameter)
      config_fail(field, e.what());
    throw;
  }
}

RunConfig parse_config(const std::string &text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw Error(ErrorCode::config_error, std::string("malformed config: ") + e.what());
  }
  allow_keys(root, "",
             {"schema_version", "model", "a", "b", "weights", "analyses", "horizon", "grid_points",
              "tolerances", "output", "bounds", "spectrum", "cesaro", "sweep"});
  RunConfig cfg;
  const long long version = get_integer(root, "", "schema_version", schema_version);
  if (version != schema_version)
    config_fail("schema_version", "unsupported version " + std::to_string(version));

  if (!root.contains("model"))
    config_fail("model", "missing");
  const Json &m = root.at("model");
  allow_keys(m, "model", {"preset", "servers", "lambda", "mu", "truncation", "birth", "death"});
  if (m.contains("preset"))
    cfg.model.preset = get_string(m, "model", "preset", "");
  const long long servers = get_integer(m, "model", "servers", 1);
  if (servers < 1)
    config_fail("model.servers", "must be a positive integer (got " + std::to_string(servers) + ")");
  cfg.model.params.servers = static_cast<int>(servers);
  cfg.model.params.lambda = get_number(m, "model", "lambda", 1.0);
  cfg.model.params.mu = get_number(m, "model", "mu", 1.0);
  if (!(cfg.model.params.lambda > 0.0))
    config_fail("model.lambda", "must be positive");
  if (!(cfg.model.params.mu > 0.0))
    config_fail("model.mu", "must be positive");
  const long long trunc = get_integer(m, "model", "truncation", 200);
  if (trunc < 2)
    config_fail("model.truncation", "must be at least 2");
  cfg.model.params.truncation = static_cast<std::size_t>(trunc);
  cfg.model.birth = get_numbers(m, "model", "birth");
  cfg.model.death = get_numbers(m, "model", "death");
  const bool tables = !cfg.model.birth.empty() || !cfg.model.death.empty();
  if (cfg.model.preset && tables)
    config_fail("model", "give either a preset or explicit birth/death tables, not both");
  if (!cfg.model.preset && !tables)
    config_fail("model", "needs a preset or explicit birth/death tables");
  if (tables && cfg.model.birth.size() != cfg.model.death.size())
    config_fail("model.death", "must have the same length as model.birth");

  if (root.contains("a"))
    cfg.a = parse_rate(root.at("a"), "a");
  if (root.contains("b"))
    cfg.b = parse_rate(root.at("b"), "b");

  if (root.contains("weights")) {
    const Json &w = root.at("weights");
    allow_keys(w, "weights",
               {"strategy", "direction", "spread", "c", "choice", "loss_case", "epsilon", "kind",
                "ratios", "tail"});
    const std::string strategy = get_string(w, "weights", "strategy", "paper-preset");
    if (strategy == "auto")
      cfg.weights.strategy = WeightStrategy::auto_search;
    else if (strategy == "paper-preset")
      cfg.weights.strategy = WeightStrategy::paper_preset;
    else if (strategy == "explicit")
      cfg.weights.strategy = WeightStrategy::explicit_list;
    else
      config_fail("weights.strategy", "expected auto, paper-preset or explicit");
    const bool has_list = w.contains("ratios") || w.contains("tail");
    if (has_list != (cfg.weights.strategy == WeightStrategy::explicit_list))
      config_fail("weights.ratios", "ratios/tail belong to the explicit strategy only");
    const std::string dir = get_string(w, "weights", "direction", "ergodic");
    if (dir != "ergodic" && dir != "null")
      config_fail("weights.direction", "expected ergodic or null");
    cfg.weights.direction = dir == "null" ? Direction::null : Direction::ergodic;
    cfg.weights.search.spread = get_optional(w, "weights", "spread");
    cfg.weights.search.c = get_optional(w, "weights", "c");
    const std::string choice = get_string(w, "weights", "choice", "geometric");
    if (choice == "geometric")
      cfg.weights.search.choice = IntervalChoice::geometric;
    else if (choice == "lower")
      cfg.weights.search.choice = IntervalChoice::lower;
    else if (choice == "upper")
      cfg.weights.search.choice = IntervalChoice::upper;
    else
      config_fail("weights.choice", "expected geometric, lower or upper");
    const long long loss_case = get_integer(w, "weights", "loss_case", 1);
    if (loss_case != 1 && loss_case != 2)
      config_fail("weights.loss_case", "expected 1 or 2");
    cfg.weights.preset.loss_case = static_cast<int>(loss_case);
    cfg.weights.preset.epsilon = get_number(w, "weights", "epsilon", 0.5);
    const std::string kind = get_string(w, "weights", "kind", "triangular");
    if (kind != "triangular" && kind != "diagonal")
      config_fail("weights.kind", "expected triangular or diagonal");
    cfg.weights.kind = kind == "diagonal" ? TransformKind::diagonal : TransformKind::triangular;
    cfg.weights.ratios = get_numbers(w, "weights", "ratios");
    cfg.weights.tail = get_optional(w, "weights", "tail");
    for (std::size_t i = 0; i < cfg.weights.ratios.size(); ++i)
      if (!(cfg.weights.ratios[i] > 0.0))
        config_fail("weights.ratios[" + std::to_string(i) + "]", "must be positive");
  }

  if (root.contains("analyses")) {
    const Json &a = root.at("analyses");
    if (!a.is_array())
      config_fail("analyses", "expected an array of names");
    cfg.analyses.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_string() || !known_analyses.count(a[i].get<std::string>()))
        config_fail("analyses[" + std::to_string(i) + "]",
                    "expected one of feasibility, bounds, verify, spectrum, cesaro");
      cfg.analyses.insert(a[i].get<std::string>());
    }
  }
  cfg.analyses = resolve_analyses(Command::run, cfg.analyses);

  cfg.horizon = get_number(root, "", "horizon", 10.0);
  if (!(cfg.horizon > 0.0))
    config_fail("horizon", "must be positive");
  const long long gp = get_integer(root, "", "grid_points", 100);
  if (gp < 1)
    config_fail("grid_points", "must be positive");
  cfg.grid_points = static_cast<std::size_t>(gp);
  cfg.output = get_string(root, "", "output", "out");

  if (root.contains("tolerances")) {
    const Json &t = root.at("tolerances");
    allow_keys(t, "tolerances", {"ode", "truncation_threshold"});
    cfg.ode.tol = get_number(t, "tolerances", "ode", cfg.ode.tol);
    cfg.ode.truncation_threshold =
        get_number(t, "tolerances", "truncation_threshold", cfg.ode.truncation_threshold);
    if (!(cfg.ode.tol > 0.0))
      config_fail("tolerances.ode", "must be positive");
  }
  if (root.contains("bounds")) {
    const Json &b = root.at("bounds");
    allow_keys(b, "bounds", {"states", "starts", "eps", "tail_levels"});
    cfg.bounds.states = get_indices(b, "bounds", "states", cfg.bounds.states);
    cfg.bounds.starts = get_indices(b, "bounds", "starts", cfg.bounds.starts);
    cfg.bounds.eps = get_optional(b, "bounds", "eps");
    cfg.bounds.tail_levels = get_indices(b, "bounds", "tail_levels", {});
    if (!cfg.bounds.tail_levels.empty() && !cfg.bounds.eps)
      config_fail("bounds.tail_levels", "tail bounds need bounds.eps");
  }
  if (root.contains("spectrum")) {
    const Json &s = root.at("spectrum");
    allow_keys(s, "spectrum", {"times"});
    cfg.spectrum_times = get_numbers(s, "spectrum", "times");
  }
  if (root.contains("cesaro")) {
    const Json &c = root.at("cesaro");
    allow_keys(c, "cesaro", {"periods", "start"});
    cfg.cesaro_periods = get_numbers(c, "cesaro", "periods");
    cfg.cesaro_start = static_cast<std::size_t>(get_integer(c, "cesaro", "start", 0));
    if (cfg.cesaro_periods.empty())
      config_fail("cesaro.periods", "needs at least one period count");
  }
  if (root.contains("sweep")) {
    const Json &s = root.at("sweep");
    allow_keys(s, "sweep", {"parameter", "values"});
    cfg.sweep.parameter = get_string(s, "sweep", "parameter", "rho");
    if (cfg.sweep.parameter != "rho" && cfg.sweep.parameter != "epsilon")
      config_fail("sweep.parameter", "expected rho or epsilon");
    cfg.sweep.values = get_numbers(s, "sweep", "values");
  }
  return cfg;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::config_error, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

BirthDeathSpec build_spec(const RunConfig &config) {
  if (config.model.preset)
    return make_preset(*config.model.preset, config.model.params, config.a, config.b);
  return BirthDeathSpec::finite(config.model.birth, config.model.death, config.a, config.b);
}

Command parse_command(const std::string &name) {
  static const std::map<std::string, Command> table{
      {"run", Command::run},       {"feasibility", Command::feasibility},
      {"bounds", Command::bounds}, {"verify", Command::verify},
      {"sweep", Command::sweep},   {"spectrum", Command::spectrum}};
  auto it = table.find(name);
  if (it == table.end())
    throw Error(ErrorCode::config_error, "unknown subcommand '" + name + "'");
  return it->second;
}

WeightPlan plan_weights(const BirthDeathSpec &spec, const WeightConfig &config) {
  Json report{{"strategy", config.strategy == WeightStrategy::auto_search    ? "auto"
                           : config.strategy == WeightStrategy::paper_preset ? "paper-preset"
                                                                             : "explicit"}};
  switch (config.strategy) {
  case WeightStrategy::auto_search: {
    if (config.direction == Direction::ergodic) {
      ErgodicWeights ew = find_ergodic_weights(spec, config.search);
      report["feasibility"] = to_json(ew.feasibility);
      report["weights"] = to_json(ew.weights);
      WeightPlan plan{ew.weights, Direction::ergodic, ew.feasibility.drift,
                      ew.feasibility.drift_mean, ew.feasibility.conditions, report};
      return plan;
    }
    NullWeights nw = find_null_weights(spec, config.search);
    report["feasibility"] = to_json(nw.feasibility);
    report["weights"] = to_json(nw.weights);
    return {nw.weights, Direction::null, nw.feasibility.drift, nw.feasibility.drift_mean,
            nw.feasibility.conditions, report};
  }
  case WeightStrategy::paper_preset: {
    PresetWeights pw = preset_weights(spec, config.preset);
    report["preset"] = to_json(pw);
    const double mean = pw.rate.mean(spec.a(), spec.b());
    report["rate_mean"] = number(mean);
    std::vector<std::string> hyps{"preset weights, regime " + pw.regime};
    hyps.insert(hyps.end(), pw.notes.begin(), pw.notes.end());
    return {pw.weights, pw.direction, pw.rate, mean, hyps, report};
  }
  case WeightStrategy::explicit_list: {
    WeightSequence w = config.tail ? WeightSequence::unbounded(config.kind, config.ratios, *config.tail)
                                   : WeightSequence::finite(config.kind, config.ratios);
    const bool tri = config.kind == TransformKind::triangular;
    const LinearCoefficients lin =
        linear_coefficients(spec, w, tri ? SequenceKind::alpha : SequenceKind::alpha0);
    const RateCombination rate = lin.lower();
    const double mean = rate.mean(spec.a(), spec.b());
    report["weights"] = to_json(w);
    report["rate"] = to_json(rate);
    report["rate_mean"] = number(mean);
    return {w, tri ? Direction::ergodic : Direction::null, rate, mean,
            {std::string("explicit weights; rate = coefficientwise lower bound of ") +
             (tri ? "alpha" : "alpha0")},
            report};
  }
  }
  throw Error(ErrorCode::config_error, "unknown weight strategy");
}

std::vector<BoundCertificate> plan_certificates(const BirthDeathSpec &spec, const WeightPlan &plan,
                                                const BoundsConfig &config) {
  std::vector<BoundCertificate> out;
  auto append = [&out](std::vector<BoundCertificate> more) {
    out.insert(out.end(), more.begin(), more.end());
  };
  if (plan.direction == Direction::ergodic) {
    if (spec.is_finite()) {
      append(two_sided_certificate(spec, plan.weights, plan.rate, plan.hypotheses));
      if (spec.preset() == "mmss") {
        MeanBoundRequest req;
        req.relaxation_starts = config.starts;
        append(mean_bounds(spec, req));
      }
    } else {
      append(weak_ergodic_certificate(spec, plan.weights, plan.rate, plan.hypotheses));
      if (config.eps) {
        MeanBoundRequest req;
        req.eps = config.eps;
        req.rate = plan.rate;
        req.weights = &plan.weights;
        append(mean_bounds(spec, req));
        if (!config.tail_levels.empty())
          append(tail_certificate(spec, plan.weights, plan.rate, *config.eps, config.tail_levels));
      }
    }
  } else {
    std::vector<std::size_t> states;
    for (std::size_t s : config.states)
      if (s <= spec.top())
        states.push_back(s);
    append(null_ergodic_certificate(spec, plan.weights, plan.rate, states, config.starts,
                                    plan.hypotheses));
    MeanBoundRequest req;
    req.drift_starts = config.starts;
    append(mean_bounds(spec, req));
  }
  return out;
}

int exit_code_for(const Error &e) {
  switch (e.code()) {
  case ErrorCode::config_error:
    return 2;
  case ErrorCode::infeasible:
    return 3;
  case ErrorCode::step_failure:
  case ErrorCode::truncation_loss:
    return 5;
  default:
    return 4;
  }
}

RunOutcome run(const RunConfig &config, Command command) {
  RunOutcome outcome;
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output, ec);
  if (ec)
    throw Error(ErrorCode::config_error, "cannot create output directory " + config.output);
  auto out_path = [&](const std::string &name) {
    const std::string p = (fs::path(config.output) / name).string();
    outcome.artifacts.push_back(p);
    return p;
  };

  if (command == Command::sweep) {
    if (!config.model.preset)
      throw Error(ErrorCode::config_error, "field 'model.preset': sweep needs a preset model");
    if (config.sweep.values.empty())
      throw Error(ErrorCode::config_error, "field 'sweep.values': nothing to sweep");
    std::vector<std::future<Json>> jobs;
    for (double v : config.sweep.values)
      jobs.push_back(std::async(std::launch::async, [&config, v] { return sweep_row(config, v); }));
    Json rows = Json::array();
    for (auto &j : jobs)
      rows.push_back(j.get());
    const std::vector<std::string> cols{"value", "rho", "regime", "direction", "rate_a",
                                        "rate_b", "rate_mean", "auto_mean", "note"};
    std::ostringstream csv;
    for (std::size_t i = 0; i < cols.size(); ++i)
      csv << (i ? "," : "") << cols[i];
    csv << '\n';
    for (const auto &r : rows) {
      for (std::size_t i = 0; i < cols.size(); ++i)
        csv << (i ? "," : "") << (r.contains(cols[i]) ? csv_field(r.at(cols[i])) : "");
      csv << '\n';
      outcome.lines.push_back(config.sweep.parameter + " = " + csv_field(r.at("value")) + ": " +
                              (r.contains("rate_mean") ? "rate mean " + csv_field(r.at("rate_mean"))
                                                       : csv_field(r.at("note"))));
    }
    write_text(out_path("sweep.csv"), csv.str());
    Json doc = header("sweep");
    doc["parameter"] = config.sweep.parameter;
    doc["rows"] = rows;
    write_json(out_path("sweep.json"), doc);
    return outcome;
  }

  const std::set<std::string> analyses = resolve_analyses(command, config.analyses);
  const BirthDeathSpec spec = build_spec(config);
  const std::vector<double> grid = time_grid(0.0, config.horizon, config.grid_points);

  std::optional<WeightPlan> plan;
  if (analyses.count("feasibility")) {
    plan = plan_weights(spec, config.weights);
    Json doc = header("feasibility");
    doc["model"] = model_json(spec);
    doc["direction"] = plan->direction == Direction::ergodic ? "ergodic" : "null";
    doc["rate"] = to_json(plan->rate);
    doc["rate_mean"] = number(plan->rate_mean);
    doc["weights"] = plan->report;
    write_json(out_path("feasibility.json"), doc);
    outcome.lines.push_back(std::string("weights: ") +
                            (plan->direction == Direction::ergodic ? "ergodic" : "null") +
                            ", rate mean " + fmt(plan->rate_mean));
  }

  std::vector<BoundCertificate> certs;
  const auto [p1, p2] = standard_pair(spec);
  if (analyses.count("bounds")) {
    certs = plan_certificates(spec, *plan, config.bounds);
    Json doc = header("bounds");
    doc["model"] = model_json(spec);
    Json list = Json::array();
    for (const auto &c : certs) {
      list.push_back(to_json(c));
      const Eigen::VectorXd start =
          c.start_state ? point_mass(spec.top() + 1, *c.start_state) : p1;
      const double init = c.pair ? initial_term(c, plan->weights, p1, &p2)
                                 : initial_term(c, plan->weights, start);
      write_envelope_csv(out_path("envelope_" + c.id + ".csv"), c, spec.a(), spec.b(), grid, init);
    }
    doc["certificates"] = list;
    write_json(out_path("certificates.json"), doc);
    outcome.lines.push_back(std::to_string(certs.size()) + " certificates");
  }

  if (analyses.count("verify")) {
    // Pair bounds share the standard pair; its tail sums are ordered by construction.
    bool any_pair = false;
    std::map<std::size_t, std::size_t> slot;
    std::vector<Eigen::VectorXd> starts;
    for (const auto &c : certs) {
      if (c.pair) {
        any_pair = true;
        continue;
      }
      const std::size_t k = c.start_state.value_or(0);
      if (!slot.count(k)) {
        slot[k] = starts.size();
        starts.push_back(point_mass(spec.top() + 1, k));
      }
    }
    std::vector<Eigen::VectorXd> all = starts;
    if (any_pair) {
      all.push_back(p1);
      all.push_back(p2);
    }
    std::vector<std::future<Trajectory>> jobs;
    for (const auto &p : all)
      jobs.push_back(std::async(std::launch::async, [&spec, &grid, &config, p] {
        return integrate_kolmogorov(spec, p, grid, config.ode);
      }));
    std::vector<Trajectory> trajs;
    for (auto &j : jobs)
      trajs.push_back(j.get());
    if (plan->direction == Direction::null)
      for (const auto &tr : trajs)
        if (tr.truncation_flagged)
          throw Error(ErrorCode::truncation_loss,
                      "probability mass reached the top band (max " +
                          fmt(tr.max_truncation_loss()) + "); raise the truncation level");

    std::vector<VerificationReport> reports;
    for (const auto &c : certs) {
      if (c.pair)
        reports.push_back(evaluate(c, spec, plan->weights, trajs[starts.size()],
                                   &trajs[starts.size() + 1], config.ode.tol, "pair"));
      else
        reports.push_back(evaluate(c, spec, plan->weights, trajs[slot[c.start_state.value_or(0)]],
                                   nullptr, config.ode.tol, "single"));
    }
    for (const auto &[k, i] : slot)
      write_trajectory_csv(out_path("trajectory_from_" + std::to_string(k) + ".csv"), trajs[i]);
    if (any_pair) {
      write_trajectory_csv(out_path("trajectory_pair_first.csv"), trajs[starts.size()]);
      write_trajectory_csv(out_path("trajectory_pair_second.csv"), trajs[starts.size() + 1]);
    }

    const bool ok = all_pass(reports);
    Json doc = header("verify");
    doc["model"] = model_json(spec);
    doc["direction"] = plan->direction == Direction::ergodic ? "ergodic" : "null";
    doc["rate"] = to_json(plan->rate);
    doc["l_mean"] = number(plan->rate_mean);
    doc["tol_ode"] = number(config.ode.tol);
    doc["truncation_threshold"] = number(config.ode.truncation_threshold);
    doc["all_pass"] = ok;
    Json list = Json::array();
    for (const auto &r : reports)
      list.push_back(to_json(r));
    doc["reports"] = list;
    write_json(out_path("report.json"), doc);

    outcome.lines.push_back(pad("certificate", 32) + pad("pass", 6) + pad("min_slack", 26) +
                            "tolerance");
    for (const auto &r : reports)
      outcome.lines.push_back(pad(r.certificate_id, 32) + pad(r.pass ? "yes" : "NO", 6) +
                              pad(fmt(r.min_slack), 26) + fmt(r.tolerance));
    outcome.lines.push_back(std::string("l_mean = ") + fmt(plan->rate_mean) +
                            (ok ? ", all bounds hold" : ", VERIFICATION FAILED"));
    if (!ok)
      outcome.exit_code = 1;
  }

  if (analyses.count("spectrum")) {
    Json doc = header("spectrum");
    doc["model"] = model_json(spec);
    Json rows = Json::array();
    std::vector<CoefficientProfile> profiles;
    for (double t : config.spectrum_times) {
      auto ev = frozen_spectrum(spec, t);
      std::sort(ev.begin(), ev.end(), [](auto x, auto y) { return x.real() > y.real(); });
      Json re = Json::array(), im = Json::array();
      for (const auto &v : ev) {
        re.push_back(number(v.real()));
        im.push_back(number(v.imag()));
      }
      Json row{{"t", number(t)}, {"gap", number(spectral_gap(spec, t))}, {"real", re}, {"imag", im}};
      if (plan && plan->weights.kind() == TransformKind::triangular) {
        const auto alpha = coefficient_profile(spec, plan->weights, t, SequenceKind::alpha);
        const auto zeta = coefficient_profile(spec, plan->weights, t, SequenceKind::zeta);
        row["alpha_inf"] = number(alpha.inf);
        row["zeta_sup"] = number(zeta.sup);
        profiles.push_back(alpha);
      }
      outcome.lines.push_back("t = " + fmt(t) + ": spectral gap " + fmt(row["gap"].get<double>()));
      rows.push_back(row);
    }
    doc["times"] = rows;
    write_json(out_path("spectrum.json"), doc);
    if (!profiles.empty())
      write_profile_csv(out_path("profile_alpha.csv"), profiles);
  }

  if (analyses.count("cesaro")) {
    const double T = spec.a().period();
    const double k_max = *std::max_element(config.cesaro_periods.begin(), config.cesaro_periods.end());
    const auto n = static_cast<std::size_t>(std::ceil(k_max * 20.0));
    const std::vector<double> cgrid = time_grid(0.0, k_max * T, n);
    if (config.cesaro_start > spec.top())
      throw Error(ErrorCode::out_of_range, "cesaro.start beyond the state space");
    const Trajectory tr =
        integrate_kolmogorov(spec, point_mass(spec.top() + 1, config.cesaro_start), cgrid, config.ode);
    Json doc = header("cesaro");
    doc["period"] = number(T);
    Json rows = Json::array();
    std::optional<Eigen::VectorXd> prev;
    for (double k : config.cesaro_periods) {
      const Eigen::VectorXd avg = cesaro_average(tr, k * T);
      Json row{{"periods", number(k)}};
      row["l1_change"] = prev ? number((avg - *prev).lpNorm<1>()) : Json(nullptr);
      Json vals = Json::array();
      for (Eigen::Index i = 0; i < avg.size() && i < 20; ++i)
        vals.push_back(number(avg[i]));
      row["average_head"] = vals;
      if (prev)
        outcome.lines.push_back("cesaro k = " + fmt(k) + ": l1 change " +
                                fmt((avg - *prev).lpNorm<1>()));
      prev = avg;
      rows.push_back(row);
    }
    doc["rows"] = rows;
    write_json(out_path("cesaro.json"), doc);
  }
  return outcome;
}

} // namespace bdp
