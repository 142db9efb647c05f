#pragma once

#include "gsample/core.hpp"
#include "gsample/solver.hpp"

#include "json.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace gsample {

using json = nlohmann::json;

inline json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Vector vector_from_json(const json& a) {
  if (!a.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

inline json to_json(const GsParams& p) {
  return json{{"eps_opt", p.eps_opt},
              {"nu_opt", p.nu_opt},
              {"eps0", p.eps0},
              {"nu0", p.nu0},
              {"m", p.m},
              {"beta", p.beta},
              {"gamma", p.gamma},
              {"theta_eps", p.theta_eps},
              {"theta_nu", p.theta_nu},
              {"max_iter", p.max_iter},
              {"max_backtracks", p.max_backtracks},
              {"max_perturb_attempts", p.max_perturb_attempts},
              {"seed", p.seed},
              {"divergence_floor", p.divergence_floor},
              {"resample_outside_domain", p.resample_outside_domain}};
}

//! Overwrites the fields of `p` present in `j`; unknown keys are an error.
inline void update_params_from_json(GsParams& p, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("params must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "eps_opt") p.eps_opt = value.get<double>();
    else if (key == "nu_opt") p.nu_opt = value.get<double>();
    else if (key == "eps0") p.eps0 = value.get<double>();
    else if (key == "nu0") p.nu0 = value.get<double>();
    else if (key == "m") p.m = value.get<std::size_t>();
    else if (key == "beta") p.beta = value.get<double>();
    else if (key == "gamma") p.gamma = value.get<double>();
    else if (key == "theta_eps") p.theta_eps = value.get<double>();
    else if (key == "theta_nu") p.theta_nu = value.get<double>();
    else if (key == "max_iter") p.max_iter = value.get<std::size_t>();
    else if (key == "max_backtracks") p.max_backtracks = value.get<std::size_t>();
    else if (key == "max_perturb_attempts") p.max_perturb_attempts = value.get<std::size_t>();
    else if (key == "seed") p.seed = value.get<std::uint64_t>();
    else if (key == "divergence_floor") p.divergence_floor = value.get<double>();
    else if (key == "resample_outside_domain") p.resample_outside_domain = value.get<bool>();
    else throw std::invalid_argument("unknown parameter: " + key);
  }
}

inline json to_json(const IterationRecord& r) {
  return json{{"k", r.k},
              {"x", to_json(r.x)},
              {"f", r.f_val},
              {"eps", r.eps_k},
              {"nu", r.nu_k},
              {"g", to_json(r.g)},
              {"g_norm", r.g_norm},
              {"step_kind", std::string(to_string(r.step_kind))},
              {"t", r.t_k},
              {"perturbed", r.perturbed},
              {"sample_count", r.sample_count}};
}

inline IterationRecord record_from_json(const json& j) {
  IterationRecord r;
  r.k = j.at("k").get<std::size_t>();
  r.x = vector_from_json(j.at("x"));
  r.f_val = j.at("f").get<double>();
  r.eps_k = j.at("eps").get<double>();
  r.nu_k = j.at("nu").get<double>();
  r.g = j.contains("g") ? vector_from_json(j.at("g")) : Vector();
  r.g_norm = j.at("g_norm").get<double>();
  r.step_kind = step_kind_from_string(j.at("step_kind").get<std::string>());
  r.t_k = j.at("t").get<double>();
  r.perturbed = j.at("perturbed").get<bool>();
  r.sample_count = j.value("sample_count", std::size_t{0});
  return r;
}

//! Header line, one line per record, then a status line.
inline void write_trace(std::ostream& os, const RunTrace& trace, const json& header) {
  json h = header;
  h["type"] = "header";
  os << h.dump() << '\n';
  for (const auto& r : trace.records) os << to_json(r).dump() << '\n';
  json s{{"type", "status"},
         {"status", std::string(to_string(trace.status))},
         {"final_x", to_json(trace.final_x)},
         {"final_f", trace.final_f},
         {"initial_f", trace.initial_f},
         {"divergence_floor", trace.divergence_floor},
         {"iterations", trace.records.size()},
         {"wall_time_s", trace.wall_time.count()}};
  os << s.dump() << '\n';
}

struct TraceFile {
  json header;
  RunTrace trace;
};

inline TraceFile read_trace(std::istream& is) {
  TraceFile tf;
  std::string line;
  bool have_status = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const auto type = j.value("type", std::string{});
    if (type == "header") {
      tf.header = j;
    } else if (type == "status") {
      tf.trace.status = status_from_string(j.at("status").get<std::string>());
      tf.trace.final_x = vector_from_json(j.at("final_x"));
      tf.trace.final_f = j.at("final_f").get<double>();
      tf.trace.initial_f = j.value("initial_f", 0.0);
      tf.trace.divergence_floor = j.value("divergence_floor", 0.0);
      tf.trace.wall_time = std::chrono::duration<double>(j.value("wall_time_s", 0.0));
      have_status = true;
    } else {
      tf.trace.records.push_back(record_from_json(j));
    }
  }
  if (!have_status) throw std::runtime_error("trace has no status line");
  return tf;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_vector(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += format_double(v(i));
  }
  return s + "]";
}

//! One-line run summary. Depends only on data stored in the trace file.
inline std::string summarize(const RunTrace& trace) {
  std::ostringstream os;
  os << "status=" << to_string(trace.status) << " iterations=" << trace.records.size()
     << " final_f=" << format_double(trace.final_f) << " final_x=" << format_vector(trace.final_x)
     << " sum_t_gnorm=" << format_double(weighted_step_sum(trace.records));
  return os.str();
}

//! Plot data: k, f, g_norm, eps, nu, t.
inline void write_plot_csv(std::ostream& os, const RunTrace& trace) {
  os << "k,f,g_norm,eps,nu,t\n";
  for (const auto& r : trace.records)
    os << r.k << ',' << format_double(r.f_val) << ',' << format_double(r.g_norm) << ','
       << format_double(r.eps_k) << ',' << format_double(r.nu_k) << ',' << format_double(r.t_k)
       << '\n';
}

}  // namespace gsample
