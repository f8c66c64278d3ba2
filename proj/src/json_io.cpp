#include "bdp/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bdp/error.hpp"

namespace bdp {
namespace {

void emit(const Json &j, std::ostringstream &os, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth + 1), ' ');
  const std::string close(2 * static_cast<std::size_t>(depth), ' ');
  switch (j.type()) {
  case Json::value_t::object: {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first)
        os << ",\n";
      first = false;
      os << pad << Json(it.key()).dump() << ": ";
      emit(it.value(), os, depth + 1);
    }
    os << "\n" << close << "}";
    return;
  }
  case Json::value_t::array: {
    if (j.empty()) {
      os << "[]";
      return;
    }
    // Flat numeric arrays on one line.
    const bool flat = std::all_of(j.begin(), j.end(), [](const Json &e) { return e.is_primitive(); });
    if (flat) {
      os << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i)
          os << ", ";
        emit(j[i], os, depth + 1);
      }
      os << "]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i)
        os << ",\n";
      os << pad;
      emit(j[i], os, depth + 1);
    }
    os << "\n" << close << "]";
    return;
  }
  case Json::value_t::number_float:
    os << format_double(j.get<double>());
    return;
  default:
    os << j.dump();
  }
}

Json conditions_json(const std::vector<std::string> &c) { return Json(c); }

Json intervals_json(const std::vector<Interval> &v, std::size_t head) {
  Json out = Json::array();
  for (std::size_t i = 0; i < v.size() && i < head; ++i)
    out.push_back(to_json(v[i]));
  return out;
}

} // namespace

std::string format_double(double x) {
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_json(const Json &j) {
  std::ostringstream os;
  emit(j, os, 0);
  os << "\n";
  return os.str();
}

Json number(double x) {
  if (std::isfinite(x))
    return x;
  return format_double(x);
}

Json to_json(const RateCombination &r) {
  return Json{{"a_coef", number(r.a_coef)}, {"b_coef", number(r.b_coef)},
              {"constant", number(r.constant)}};
}

Json to_json(const Interval &i) { return Json{{"lo", number(i.lo)}, {"hi", number(i.hi)}}; }

Json to_json(const WeightSequence &w, std::size_t head) {
  Json deltas = Json::array();
  for (std::size_t k = 1; k <= head && (!w.is_finite() || k <= w.stored()); ++k)
    deltas.push_back(number(w.delta(k)));
  Json j{{"kind", to_string(w.kind())},
         {"finite", w.is_finite()},
         {"stored", w.stored()},
         {"delta", deltas}};
  if (w.tail())
    j["tail_rule"] = "delta_k = " + format_double(*w.tail()) + " for k > " +
                     std::to_string(w.stored());
  else
    j["tail_rule"] = "none";
  j["g"] = number(w.min_weight());
  j["G"] = number(w.max_weight());
  if (w.kind() == TransformKind::triangular)
    j["W"] = number(w.w_constant());
  return j;
}

Json to_json(const ErgodicFeasibility &f) {
  Json j{{"direction", "ergodic"},
         {"spread", number(f.spread)},
         {"c", number(f.c)},
         {"f_inf", number(f.f)},
         {"drift", to_json(f.drift)},
         {"drift_mean", number(f.drift_mean)},
         {"conditions", conditions_json(f.conditions)},
         {"intervals", intervals_json(f.intervals, 20)}};
  if (f.tail_interval)
    j["tail_interval"] = to_json(*f.tail_interval);
  return j;
}

Json to_json(const NullFeasibility &f) {
  Json j{{"direction", "null"},
         {"spread", number(f.spread)},
         {"c", number(f.c)},
         {"h_inf", number(f.h)},
         {"drift", to_json(f.drift)},
         {"drift_mean", number(f.drift_mean)},
         {"conditions", conditions_json(f.conditions)},
         {"intervals", intervals_json(f.intervals, 20)}};
  if (f.tail_interval)
    j["tail_interval"] = to_json(*f.tail_interval);
  return j;
}

Json to_json(const PresetWeights &p) {
  Json j{{"direction", p.direction == Direction::ergodic ? "ergodic" : "null"},
         {"regime", p.regime},
         {"rate", to_json(p.rate)}};
  j["spread"] = p.spread ? number(*p.spread) : Json(nullptr);
  j["c"] = p.c ? number(*p.c) : Json(nullptr);
  j["notes"] = p.notes;
  j["weights"] = to_json(p.weights);
  return j;
}

Json to_json(const BoundCertificate &c) {
  Json j{{"id", c.id},
         {"statement", c.statement},
         {"shape", to_string(c.shape)},
         {"direction", to_string(c.direction)},
         {"observable", to_string(c.observable)},
         {"initial_term", to_string(c.initial)},
         {"rate", to_json(c.rate)}};
  if (c.shape == Shape::relaxation)
    j["source"] = to_json(c.source);
  j["prefactor"] = number(c.prefactor);
  j["level"] = number(c.level);
  j["index"] = c.index ? Json(*c.index) : Json(nullptr);
  j["start_state"] = c.start_state ? Json(*c.start_state) : Json(nullptr);
  j["pair"] = c.pair;
  j["requires_ordered"] = c.requires_ordered;
  j["hypotheses"] = c.hypotheses;
  Json params = Json::object();
  for (const auto &[k, v] : c.parameters)
    params[k] = number(v);
  j["parameters"] = params;
  return j;
}

Json to_json(const VerificationReport &r, bool with_samples) {
  Json j{{"certificate", r.certificate_id},
         {"check", r.check},
         {"direction", to_string(r.direction)},
         {"pass", r.pass},
         {"min_slack", number(r.min_slack)},
         {"worst_time", number(r.worst_time)},
         {"tolerance", number(r.tolerance)},
         {"tol_ode", number(r.tol_ode)},
         {"truncation_loss", number(r.truncation_loss)},
         {"caveats", r.caveats}};
  if (with_samples) {
    Json rows = Json::array();
    for (const auto &s : r.samples)
      rows.push_back(Json{number(s.t), number(s.lhs), number(s.rhs), number(s.slack)});
    j["samples_columns"] = Json{"t", "lhs", "rhs", "slack"};
    j["samples"] = rows;
  }
  return j;
}

Json to_json(const CoefficientProfile &p) {
  Json vals = Json::array();
  for (double v : p.values)
    vals.push_back(number(v));
  Json j{{"t", number(p.t)}, {"kind", to_string(p.kind)}, {"values", vals}};
  j["limit"] = p.limit ? number(*p.limit) : Json(nullptr);
  j["inf"] = number(p.inf);
  j["sup"] = number(p.sup);
  return j;
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::config_error, "cannot write " + path);
  out << text;
}

void write_json(const std::string &path, const Json &j) { write_text(path, dump_json(j)); }

void write_trajectory_csv(const std::string &path, const Trajectory &traj) {
  std::ostringstream os;
  const Eigen::Index dim = traj.states.empty() ? 0 : traj.states.front().size();
  os << "t";
  for (Eigen::Index i = 0; i < dim; ++i)
    os << ",p_" << i;
  os << ",mass,truncation_loss\n";
  for (std::size_t m = 0; m < traj.times.size(); ++m) {
    os << format_double(traj.times[m]);
    for (Eigen::Index i = 0; i < dim; ++i)
      os << ',' << format_double(traj.states[m][i]);
    os << ',' << format_double(traj.states[m].sum());
    os << ',' << format_double(m < traj.truncation_loss.size() ? traj.truncation_loss[m] : 0.0)
       << '\n';
  }
  write_text(path, os.str());
}

void write_envelope_csv(const std::string &path, const BoundCertificate &cert,
                        const RateFunction &a, const RateFunction &b,
                        const std::vector<double> &grid, double initial_value) {
  std::ostringstream os;
  os << "t,envelope_value\n";
  for (double t : grid)
    os << format_double(t) << ','
       << format_double(cert.envelope(a, b, grid.front(), t, initial_value)) << '\n';
  write_text(path, os.str());
}

void write_profile_csv(const std::string &path, const std::vector<CoefficientProfile> &rows) {
  std::ostringstream os;
  os << "t,k,value\n";
  for (const auto &p : rows) {
    for (std::size_t k = 0; k < p.values.size(); ++k)
      os << format_double(p.t) << ',' << k << ',' << format_double(p.values[k]) << '\n';
    if (p.limit)
      os << format_double(p.t) << ",-1," << format_double(*p.limit) << '\n';
  }
  write_text(path, os.str());
}

} // namespace bdp
