#include "clrpod/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <sstream>
#include <thread>

#include "clrpod/generate.hpp"

namespace clrpod::experiment {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

Stat stat_of(const std::vector<double>& v) {
  Stat s;
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  return s;
}

InstanceRow solve_one(const GridSpec& spec, int n_d, int n_t, int index) {
  InstanceRow row;
  row.n_d = n_d;
  row.n_t = n_t;
  row.index = index;
  row.seed = instance_seed(spec.seed, n_d, n_t, index);
  try {
    const model::Instance inst =
        generate::random_instance(n_d, n_t, row.seed, spec.n_v);
    framework::SolveConfig cfg = spec.solve;
    cfg.seed = row.seed;
    cfg.on_iteration = nullptr;
    const framework::SolveReport rep =
        framework::alternate(inst, framework::initial_placement(inst, cfg), cfg);
    row.outcome = framework::to_string(rep.outcome);
    row.solved = rep.outcome != framework::Outcome::InfeasibleInitialGuess;
    row.initial_emleo = rep.initial_emleo;
    row.final_emleo = rep.final_emleo;
    row.reduction_pct = row.solved ? rep.reduction_pct() : 0.0;
    row.iterations = rep.iterations;
    row.wall_s = rep.wall_s;
    row.monotone = rep.monotone();
  } catch (const std::exception& e) {
    row.outcome = "error";
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::uint64_t instance_seed(std::uint64_t base, int n_d, int n_t, int index) {
  return base * 1000003ULL + static_cast<std::uint64_t>(n_d) * 100003ULL +
         static_cast<std::uint64_t>(n_t) * 1009ULL +
         static_cast<std::uint64_t>(index);
}

std::vector<InstanceRow> run_grid(const GridSpec& spec) {
  struct Task {
    int n_d, n_t, index;
  };
  std::vector<Task> tasks;
  for (int nd : spec.n_d) {
    for (int nt : spec.n_t) {
      for (int i = 0; i < spec.count; ++i) tasks.push_back({nd, nt, i});
    }
  }
  std::vector<InstanceRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      rows[t] = solve_one(spec, tasks[t].n_d, tasks[t].n_t, tasks[t].index);
    }
  };
  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

std::vector<CellSummary> summarize(const std::vector<InstanceRow>& rows) {
  std::vector<CellSummary> cells;
  for (std::size_t b = 0; b < rows.size();) {
    std::size_t e = b;
    while (e < rows.size() && rows[e].n_d == rows[b].n_d &&
           rows[e].n_t == rows[b].n_t) {
      ++e;
    }
    CellSummary c;
    c.n_d = rows[b].n_d;
    c.n_t = rows[b].n_t;
    c.count = static_cast<int>(e - b);
    std::vector<double> red, it, wall;
    for (std::size_t r = b; r < e; ++r) {
      if (!rows[r].solved) continue;
      ++c.solved;
      red.push_back(rows[r].reduction_pct);
      it.push_back(rows[r].iterations);
      wall.push_back(rows[r].wall_s);
    }
    c.success_pct = c.count > 0 ? 100.0 * c.solved / c.count : 0.0;
    c.reduction_pct = stat_of(red);
    c.iterations = stat_of(it);
    c.wall_s = stat_of(wall);
    cells.push_back(c);
    b = e;
  }
  return cells;
}

std::string rows_csv(const std::vector<InstanceRow>& rows) {
  std::ostringstream out;
  out << "n_d,n_t,index,seed,solved,outcome,initial_emleo_kg,final_emleo_kg,"
         "reduction_pct,iterations,wall_s,monotone,error\n";
  for (const InstanceRow& r : rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << r.n_d << ',' << r.n_t << ',' << r.index << ',' << r.seed << ','
        << (r.solved ? 1 : 0) << ',' << r.outcome << ',' << fmt(r.initial_emleo)
        << ',' << fmt(r.final_emleo) << ',' << fmt(r.reduction_pct) << ','
        << r.iterations << ',' << fmt(r.wall_s) << ',' << (r.monotone ? 1 : 0)
        << ',' << err << '\n';
  }
  return out.str();
}

std::string summary_csv(const std::vector<CellSummary>& cells) {
  std::ostringstream out;
  out << "n_d,n_t,count,solved,success_pct,reduction_min,reduction_max,"
         "reduction_mean,iter_min,iter_max,iter_mean,time_min_s,time_max_s,"
         "time_mean_s\n";
  for (const CellSummary& c : cells) {
    out << c.n_d << ',' << c.n_t << ',' << c.count << ',' << c.solved << ','
        << fmt(c.success_pct) << ',' << fmt(c.reduction_pct.min) << ','
        << fmt(c.reduction_pct.max) << ',' << fmt(c.reduction_pct.mean) << ','
        << fmt(c.iterations.min) << ',' << fmt(c.iterations.max) << ','
        << fmt(c.iterations.mean) << ',' << fmt(c.wall_s.min) << ','
        << fmt(c.wall_s.max) << ',' << fmt(c.wall_s.mean) << '\n';
  }
  return out.str();
}

}  // namespace clrpod::experiment
