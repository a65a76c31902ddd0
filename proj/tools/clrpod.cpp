// Command-line front end: solve | gen | experiment | sweep-raan | oracle.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "clrpod/experiment.hpp"
#include "clrpod/framework.hpp"
#include "clrpod/generate.hpp"
#include "clrpod/io.hpp"
#include "clrpod/oracle.hpp"
#include "clrpod/report.hpp"
#include "clrpod/routing.hpp"

namespace fs = std::filesystem;
using namespace clrpod;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;

struct SolveArgs {
  std::string instance;
  std::uint64_t seed = 1;
  double time_limit = 100.0;
  int max_iter = 20;
  double tol = 1e-6;
  bool dump_model = false;
  std::string out = "results";
  bool quiet = false;
};

struct GenArgs {
  int n_d = 1;
  int n_t = 5;
  int n_v = 2;
  std::uint64_t seed = 1;
  int count = 1;
  std::string out = "results/instances";
};

struct ExperimentArgs {
  std::vector<int> n_d{2};
  std::vector<int> n_t{5};
  int n_v = 2;
  int count = 10;
  std::uint64_t seed = 1;
  int jobs = 0;
  double time_limit = 100.0;
  int max_iter = 20;
  std::string out = "results";
};

struct SweepArgs {
  std::string instance;
  std::string result;
  int depot = 0;
  double span = 180.0;
  int steps = 73;
  std::string out = "results/sweep_raan.csv";
};

struct OracleArgs {
  std::string instance;
  std::string placement;
  bool compare = false;
};

void print_depots(const model::Instance& inst, const model::DepotPlacement& p) {
  for (int k = 0; k < p.size(); ++k) {
    const auto& d = p.depots[k];
    std::printf("  depot %d: a %.2f km  i %.2f deg  raan %.2f deg\n", k,
                inst.scale.to_km(d.a()), d.inclination() * 180.0 / astro::kPi,
                d.raan() * 180.0 / astro::kPi);
  }
}

void print_routes(const std::vector<model::Route>& routes) {
  for (const auto& r : routes) {
    if (r.satellites.empty()) continue;
    std::printf("  depot %d:", r.depot);
    for (int j : r.satellites) std::printf(" %d", j);
    std::printf("\n");
  }
}

int cmd_solve(const SolveArgs& a) {
  const model::Instance inst = io::read_instance(a.instance);
  framework::SolveConfig cfg;
  cfg.seed = a.seed;
  cfg.milp_time_limit_s = a.time_limit;
  cfg.max_outer_iter = a.max_iter;
  cfg.tolerance = a.tol;
  if (!a.quiet) {
    cfg.on_iteration = [](const framework::IterationRecord& r) {
      std::printf("iter %d  routing %.3f kg (%s)", r.index, r.routing_objective,
                  routing::to_string(r.milp_status));
      if (r.has_nlp) {
        std::printf("  placement %.3f kg (%s, step %.3g)", r.nlp_objective,
                    locate::to_string(r.nlp_exit), r.step);
      }
      std::printf("  %.1f s\n", r.wall_s);
      std::fflush(stdout);
    };
  }
  const model::DepotPlacement initial = framework::initial_placement(inst, cfg);
  if (a.dump_model) {
    std::ostringstream dump;
    routing::dump_model(routing::build_milp(inst, initial, cfg.milp), dump);
    io::write_atomic(fs::path(a.out) / "model.txt", dump.str());
  }
  const framework::SolveReport rep = framework::alternate(inst, initial, cfg);
  report::write_solve_outputs(a.out, inst, rep);

  std::printf("outcome: %s\n", framework::to_string(rep.outcome));
  if (rep.outcome == framework::Outcome::InfeasibleInitialGuess) {
    std::printf("no routing satisfies the launch cap at the initial depots\n");
    return kExitInfeasible;
  }
  std::printf("iterations: %d\n", rep.iterations);
  std::printf("total propellant EMLEO: initial %.3f kg, final %.3f kg (%.3f%% reduction)\n",
              rep.initial_emleo, rep.final_emleo, rep.reduction_pct());
  std::printf("final depots:\n");
  print_depots(inst, rep.final_placement);
  std::printf("routes:\n");
  if (rep.final_routing) print_routes(rep.final_routing->routes);
  std::printf("wall time: %.1f s; results in %s\n", rep.wall_s, a.out.c_str());
  return kExitOk;
}

int cmd_gen(const GenArgs& a) {
  if (a.n_d < 1 || a.n_t < 1 || a.n_v < 1 || a.count < 1) {
    throw CLI::ValidationError("counts must be positive");
  }
  for (int c = 0; c < a.count; ++c) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(c);
    const model::Instance inst =
        generate::random_instance(a.n_d, a.n_t, seed, a.n_v);
    const fs::path path = fs::path(a.out) /
                          ("nd" + std::to_string(a.n_d) + "_nt" +
                           std::to_string(a.n_t) + "_s" + std::to_string(seed) +
                           ".json");
    io::write_instance(path, inst);
    std::printf("%s\n", path.string().c_str());
  }
  return kExitOk;
}

int cmd_experiment(const ExperimentArgs& a) {
  experiment::GridSpec spec;
  spec.n_d = a.n_d;
  spec.n_t = a.n_t;
  spec.n_v = a.n_v;
  spec.count = a.count;
  spec.seed = a.seed;
  spec.jobs = a.jobs > 0 ? a.jobs
                         : std::max(1u, std::thread::hardware_concurrency());
  spec.solve.milp_time_limit_s = a.time_limit;
  spec.solve.max_outer_iter = a.max_iter;
  const auto rows = experiment::run_grid(spec);
  const auto cells = experiment::summarize(rows);
  io::write_atomic(fs::path(a.out) / "experiment_raw.csv", experiment::rows_csv(rows));
  io::write_atomic(fs::path(a.out) / "experiment_summary.csv",
                   experiment::summary_csv(cells));
  std::printf("%s", experiment::summary_csv(cells).c_str());
  return kExitOk;
}

int cmd_sweep(const SweepArgs& a) {
  const model::Instance inst = io::read_instance(a.instance);
  const report::Solved solved = report::read_summary(a.result, inst);
  const auto rows = report::sweep_raan(inst, solved.placement, solved.routes,
                                       a.depot, a.span, a.steps);
  io::write_atomic(a.out, report::sweep_csv(rows));
  double worst = 0.0, sum = 0.0;
  for (const auto& r : rows) {
    worst = std::max(worst, std::abs(r.change_pct));
    sum += std::abs(r.change_pct);
  }
  std::printf("%zu offsets written to %s; mean |change| %.3f%%, max %.3f%%\n",
              rows.size(), a.out.c_str(), sum / rows.size(), worst);
  return kExitOk;
}

int cmd_oracle(const OracleArgs& a) {
  const model::Instance inst = io::read_instance(a.instance);
  model::DepotPlacement placement;
  if (!a.placement.empty()) {
    placement = report::read_summary(a.placement, inst).placement;
  } else {
    framework::SolveConfig cfg;
    placement = framework::initial_placement(inst, cfg);
  }
  const oracle::OracleResult res = oracle::enumerate_optimal(inst, placement);
  std::printf("routes priced: %ld\n", res.evaluated);
  if (res.infeasible) {
    std::printf("oracle: infeasible under the launch cap\n");
  } else {
    std::printf("oracle objective: %.9f kg\n", res.objective);
    print_routes(res.routing->routes);
  }
  if (a.compare) {
    routing::BnbOptions o;
    o.time_limit_s = 0.0;
    const auto br = routing::solve_bnb(routing::build_milp(inst, placement),
                                       nullptr, o);
    std::printf("branch-and-bound: %s", routing::to_string(br.status));
    if (br.incumbent) std::printf(" %.9f kg", br.incumbent->objective_emleo);
    std::printf(" (%ld nodes)\n", br.nodes);
    const bool agree =
        res.infeasible ? br.status == routing::BnbStatus::Infeasible
                       : br.incumbent &&
                             std::abs(br.incumbent->objective_emleo - res.objective) <= 1e-6;
    std::printf("agreement: %s\n", agree ? "yes" : "NO");
    if (!agree) return kExitInput;
  }
  return res.infeasible ? kExitInfeasible : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbital depot location-routing solver"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Alternate routing and depot placement on an instance");
  s->add_option("instance", solve.instance, "Instance JSON")->required();
  s->add_option("--seed", solve.seed, "Seed for k-means and the route search");
  s->add_option("--time-limit", solve.time_limit, "Seconds per routing solve (0 = none)");
  s->add_option("--max-iter", solve.max_iter, "Routing/placement pairs (0 = initial guess only)")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--tol", solve.tol, "Placement change that ends the alternation")
      ->check(CLI::PositiveNumber);
  s->add_flag("--dump-model", solve.dump_model, "Write the initial routing model to model.txt");
  s->add_option("--out", solve.out, "Output directory");
  s->add_flag("--quiet", solve.quiet, "No per-iteration progress");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate random instances");
  g->add_option("--n-d", gen.n_d, "Depots");
  g->add_option("--n-t", gen.n_t, "Satellites");
  g->add_option("--n-v", gen.n_v, "Routes per depot");
  g->add_option("--seed", gen.seed, "Seed of the first instance");
  g->add_option("--count", gen.count, "Number of instances");
  g->add_option("--out", gen.out, "Output directory");

  ExperimentArgs ex;
  auto* e = app.add_subcommand("experiment", "Solve a grid of random instances");
  e->add_option("--n-d-list", ex.n_d, "Depot counts")->delimiter(',');
  e->add_option("--n-t-list", ex.n_t, "Satellite counts")->delimiter(',');
  e->add_option("--n-v", ex.n_v, "Routes per depot");
  e->add_option("--count", ex.count, "Instances per cell")->check(CLI::PositiveNumber);
  e->add_option("--seed", ex.seed, "Base seed");
  e->add_option("--jobs", ex.jobs, "Worker threads (0 = all cores)");
  e->add_option("--time-limit", ex.time_limit, "Seconds per routing solve");
  e->add_option("--max-iter", ex.max_iter, "Routing/placement pairs per instance");
  e->add_option("--out", ex.out, "Output directory");

  SweepArgs sw;
  auto* r = app.add_subcommand(
      "sweep-raan",
      "Shift one depot's RAAN with routes fixed. Each offset is a static "
      "change of the depot plane, so departure and return legs are both "
      "re-priced.");
  r->add_option("instance", sw.instance, "Instance JSON")->required();
  r->add_option("result", sw.result, "summary.json of a solve")->required();
  r->add_option("--depot", sw.depot, "Depot index (0-based)");
  r->add_option("--span-deg", sw.span, "Largest offset in degrees");
  r->add_option("--steps", sw.steps, "Number of offsets (made odd so 0 is included)");
  r->add_option("--out", sw.out, "Output CSV");

  OracleArgs orc;
  auto* o = app.add_subcommand("oracle", "Exhaustive routing for instances of up to 7 satellites");
  o->add_option("instance", orc.instance, "Instance JSON")->required();
  o->add_option("--placement", orc.placement,
                "summary.json whose final depots to use (default: initial depots)");
  o->add_flag("--compare", orc.compare, "Also run branch-and-bound and compare");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*g) return cmd_gen(gen);
    if (*e) return cmd_experiment(ex);
    if (*r) return cmd_sweep(sw);
    if (*o) return cmd_oracle(orc);
  } catch (const io::FormatError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitInput;
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitInput;
  } catch (const CLI::ValidationError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitInput;
  }
  return kExitInput;
}
