#pragma once

#include "gsample/analysis.hpp"
#include "gsample/solver.hpp"
#include "gsample/testbed.hpp"
#include "gsample/trace_io.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

namespace gsample {

struct BenchCell {
  std::string fn;
  Vector x0;
  json params = json::object();
  std::vector<std::uint64_t> seeds;
  bool fixed_radius = false;
  double perturb_start = 0;
};

struct BenchRow {
  std::string fn;
  std::uint64_t seed = 0;
  std::string status;  // TerminationStatus name, or "error"
  std::size_t iters = 0;
  double final_f = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> dist_to_known_min;
  std::string outcome;
  std::string error;
};

//! Suite file: either {"cells": [...]} or a bare array of cells, each
//! {"fn": str, "x0": [..], "params": {..}, "seeds": [..], "fixed_radius": bool,
//!  "perturb_start": radius}.
inline std::vector<BenchCell> parse_suite(const json& j) {
  const json& cells = j.is_array() ? j : j.at("cells");
  if (!cells.is_array()) throw std::invalid_argument("suite cells must be an array");
  std::vector<BenchCell> out;
  for (const auto& c : cells) {
    BenchCell cell;
    cell.fn = c.at("fn").get<std::string>();
    cell.x0 = vector_from_json(c.at("x0"));
    if (c.contains("params")) cell.params = c.at("params");
    if (!cell.params.is_object()) throw std::invalid_argument("cell params must be an object");
    if (c.contains("seeds")) {
      cell.seeds = c.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
      cell.seeds = {0};
    }
    cell.fixed_radius = c.value("fixed_radius", false);
    cell.perturb_start = c.value("perturb_start", 0.0);
    out.push_back(std::move(cell));
  }
  return out;
}

//! Runs every (cell, seed) pair, `jobs` at a time. Rows come back in suite
//! order regardless of scheduling. `overrides` are applied on top of each
//! cell's params. When trace_dir is set each run writes its own trace file.
inline std::vector<BenchRow> run_bench(const std::vector<BenchCell>& cells,
                                       const json& overrides = json::object(),
                                       unsigned jobs = 1,
                                       const std::optional<std::filesystem::path>& trace_dir = {}) {
  struct Task {
    const BenchCell* cell;
    std::size_t cell_index;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (auto s : cells[i].seeds) tasks.push_back({&cells[i], i, s});

  std::vector<BenchRow> rows(tasks.size());
  auto run_one = [&](std::size_t t) {
    const auto& task = tasks[t];
    BenchRow& row = rows[t];
    row.fn = task.cell->fn;
    row.seed = task.seed;
    try {
      const auto f = make_test_function(task.cell->fn);
      GsParams p;
      update_params_from_json(p, task.cell->params);
      update_params_from_json(p, overrides);
      p.seed = task.seed;
      const Vector x0 = differentiable_start(f, task.cell->x0, task.cell->perturb_start, p.seed);
      const auto trace =
          task.cell->fixed_radius ? gs_solve_fixed_radius(f, x0, p) : gs_solve(f, x0, p);
      row.status = std::string(to_string(trace.status));
      row.iters = trace.records.size();
      row.final_f = trace.final_f;
      for (const auto& m : f.known_minimizers()) {
        const double d = (trace.final_x - m).norm();
        if (!row.dist_to_known_min || d < *row.dist_to_known_min) row.dist_to_known_min = d;
      }
      row.outcome = std::string(to_string(classify_outcome(trace)));
      if (trace_dir) {
        std::ofstream os(*trace_dir / ("cell" + std::to_string(task.cell_index) + "_seed" +
                                       std::to_string(task.seed) + ".jsonl"));
        write_trace(os, trace,
                    json{{"fn", f.name()}, {"x0", to_json(x0)}, {"params", to_json(p)},
                         {"mode", task.cell->fixed_radius ? "fixed_radius" : "standard"}});
      }
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_one(t);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) run_one(t);
    });
  for (auto& th : pool) th.join();
  return rows;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "fn,seed,status,iters,final_f,dist_to_known_min,outcome\n";
  for (const auto& r : rows) {
    os << '"' << r.fn << '"' << ',' << r.seed << ',' << r.status << ',';
    if (r.status == "error") {
      os << ",,,\n";
      continue;
    }
    os << r.iters << ',' << format_double(r.final_f) << ','
       << (r.dist_to_known_min ? format_double(*r.dist_to_known_min) : std::string{}) << ','
       << r.outcome << '\n';
  }
}

}  // namespace gsample
