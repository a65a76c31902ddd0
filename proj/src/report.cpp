#include "clrpod/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "clrpod/io.hpp"
#include "clrpod/locate.hpp"

namespace clrpod::report {

using nlohmann::json;

namespace {

constexpr double kDeg = astro::kPi / 180.0;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double stage_total(const framework::IterationRecord& r) {
  return r.has_nlp ? r.nlp_objective : r.routing_objective;
}

json depots_json(const Instance& inst, const DepotPlacement& p) {
  json arr = json::array();
  for (const auto& d : p.depots) arr.push_back(io::orbit_to_json(d, inst.scale));
  return arr;
}

struct RouteLine {
  model::Route route;
  int ordinal = 0;
  double propellant = 0.0;
  double emleo = 0.0;
};

std::vector<RouteLine> route_lines(const Instance& inst, const DepotPlacement& p,
                                   const RoutingSolution& routing) {
  std::vector<RouteLine> out;
  std::vector<int> seen(p.depots.size(), 0);
  for (const model::Route& r : routing.routes) {
    if (r.satellites.empty()) continue;
    RouteLine line;
    line.route = r;
    line.ordinal = seen.at(r.depot)++;
    const model::MassProfile prof = model::route_mass_profile(r, p, inst);
    line.propellant = prof.propellant;
    line.emleo = model::route_emleo(
        prof, astro::emleo_factor(p.depots[r.depot].a(), inst.r0, inst.prop,
                                  inst.scale));
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace

std::string iterations_csv(const SolveReport& rep) {
  std::ostringstream out;
  out << "iter,routing_emleo_kg,total_emleo_kg,milp_status,milp_gap,"
         "milp_nodes,nlp_exit,nlp_iterations,step,wall_s\n";
  for (const auto& r : rep.records) {
    out << r.index << ',' << fmt(r.routing_objective) << ','
        << fmt(stage_total(r)) << ',' << routing::to_string(r.milp_status) << ','
        << fmt_g(r.milp_gap) << ',' << r.milp_nodes << ','
        << (r.has_nlp ? locate::to_string(r.nlp_exit) : "none") << ','
        << r.nlp_iterations << ',' << fmt_g(r.step) << ',' << fmt(r.wall_s)
        << '\n';
  }
  return out.str();
}

std::string depots_csv(const Instance& inst, const DepotPlacement& p) {
  std::ostringstream out;
  out << "depot,a_km,i_deg,raan_deg\n";
  for (int k = 0; k < p.size(); ++k) {
    const auto& d = p.depots[k];
    out << k << ',' << fmt_g(inst.scale.to_km(d.a())) << ','
        << fmt_g(d.inclination() / kDeg) << ',' << fmt_g(d.raan() / kDeg) << '\n';
  }
  return out.str();
}

std::string routes_csv(const Instance& inst, const DepotPlacement& p,
                       const RoutingSolution& routing) {
  std::ostringstream out;
  out << "depot,route_ordinal,satellites,propellant_kg,emleo_kg\n";
  for (const RouteLine& l : route_lines(inst, p, routing)) {
    out << l.route.depot << ',' << l.ordinal << ',';
    for (std::size_t n = 0; n < l.route.satellites.size(); ++n) {
      out << (n ? " " : "") << l.route.satellites[n];
    }
    out << ',' << fmt(l.propellant) << ',' << fmt(l.emleo) << '\n';
  }
  return out.str();
}

json summary_json(const Instance& inst, const SolveReport& rep) {
  json s;
  s["outcome"] = framework::to_string(rep.outcome);
  s["iterations"] = rep.iterations;
  s["iteration_convention"] =
      "placement updates that moved the depots by at least the tolerance; "
      "record 0 is the routing at the initial guess";
  s["records_count"] = rep.records.size();
  s["initial_emleo_kg"] = rep.initial_emleo;
  s["final_emleo_kg"] = rep.final_emleo;
  s["reduction_pct"] = rep.reduction_pct();
  s["monotone"] = rep.monotone();
  s["wall_s"] = rep.wall_s;
  s["initial_depots"] = depots_json(inst, rep.initial_placement);
  s["final_depots"] = depots_json(inst, rep.final_placement);
  json routes = json::array();
  if (rep.final_routing) {
    for (const RouteLine& l :
         route_lines(inst, rep.final_placement, *rep.final_routing)) {
      routes.push_back({{"depot", l.route.depot},
                        {"route_ordinal", l.ordinal},
                        {"satellites", l.route.satellites},
                        {"propellant_kg", l.propellant},
                        {"emleo_kg", l.emleo}});
    }
  }
  s["routes"] = std::move(routes);
  json recs = json::array();
  for (const auto& r : rep.records) {
    json j{{"iter", r.index},
           {"routing_emleo_kg", r.routing_objective},
           {"total_emleo_kg", stage_total(r)},
           {"milp_status", routing::to_string(r.milp_status)},
           {"milp_gap", std::isfinite(r.milp_gap) ? json(r.milp_gap) : json()},
           {"milp_nodes", r.milp_nodes},
           {"nlp_exit", r.has_nlp ? locate::to_string(r.nlp_exit) : "none"},
           {"nlp_iterations", r.nlp_iterations},
           {"step", r.step},
           {"launch_backtrack", r.launch_backtrack},
           {"wall_s", r.wall_s},
           {"depots", depots_json(inst, r.placement)}};
    if (r.has_nlp) j["depots_after"] = depots_json(inst, r.placement_after);
    recs.push_back(std::move(j));
  }
  s["records"] = std::move(recs);
  return s;
}

void write_solve_outputs(const std::filesystem::path& dir, const Instance& inst,
                         const SolveReport& rep) {
  io::write_atomic(dir / "iterations.csv", iterations_csv(rep));
  io::write_atomic(dir / "depots.csv", depots_csv(inst, rep.final_placement));
  io::write_atomic(dir / "routes.csv",
                   rep.final_routing
                       ? routes_csv(inst, rep.final_placement, *rep.final_routing)
                       : routes_csv(inst, rep.final_placement, {}));
  io::write_atomic(dir / "summary.json", summary_json(inst, rep).dump(2) + "\n");
}

Solved read_summary(const std::filesystem::path& path, const Instance& inst) {
  std::ifstream in(path);
  if (!in) throw io::FormatError(path.string() + ": cannot open");
  json s;
  try {
    s = json::parse(in);
  } catch (const json::parse_error& e) {
    throw io::FormatError(path.string() + ": " + e.what());
  }
  Solved out;
  try {
    for (const json& d : s.at("final_depots")) {
      out.placement.depots.emplace_back(inst.scale.to_du(d.at("a_km").get<double>()),
                                        d.at("i_deg").get<double>() * kDeg,
                                        d.at("raan_deg").get<double>() * kDeg);
    }
    for (const json& r : s.at("routes")) {
      model::Route route;
      route.depot = r.at("depot").get<int>();
      route.satellites = r.at("satellites").get<std::vector<int>>();
      out.routes.push_back(std::move(route));
    }
    out.total_emleo_kg = s.at("final_emleo_kg").get<double>();
  } catch (const json::exception& e) {
    throw io::FormatError(path.string() + ": " + e.what());
  }
  if (out.placement.size() != inst.n_d) {
    throw io::FormatError(path.string() + ": final_depots does not match n_d");
  }
  for (const model::Route& r : out.routes) {
    if (r.depot < 0 || r.depot >= inst.n_d) {
      throw io::FormatError(path.string() + ": route depot out of range");
    }
    for (int j : r.satellites) {
      if (j < 0 || j >= inst.n_t()) {
        throw io::FormatError(path.string() + ": route satellite out of range");
      }
    }
  }
  return out;
}

std::vector<SweepRow> sweep_raan(const Instance& inst,
                                 const DepotPlacement& placement,
                                 const std::vector<model::Route>& routes,
                                 int depot, double span_deg, int steps) {
  if (depot < 0 || depot >= placement.size()) {
    throw std::invalid_argument("depot index " + std::to_string(depot) +
                                " out of range");
  }
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  if (!(span_deg >= 0.0)) throw std::invalid_argument("span must be >= 0");
  const int half = steps / 2;
  RoutingSolution fixed;
  fixed.routes = routes;
  const double base = locate::total_emleo(placement, fixed, inst);
  std::vector<SweepRow> rows;
  for (int s = -half; s <= half; ++s) {
    SweepRow row;
    row.offset_deg = half == 0 ? 0.0 : span_deg * s / half;
    DepotPlacement p = placement;
    if (s != 0) {
      const auto& d = placement.depots[depot];
      p.depots[depot] = astro::CircularOrbit(d.a(), d.inclination(),
                                             d.raan() + row.offset_deg * kDeg);
    }
    row.total_emleo_kg = locate::total_emleo(p, fixed, inst);
    row.change_pct = base != 0.0 ? 100.0 * (row.total_emleo_kg - base) / base : 0.0;
    try {
      const RoutingSolution sol = model::make_solution(routes, p, inst);
      row.launch_ok = model::validate_solution(sol, p, inst).empty();
    } catch (const std::invalid_argument&) {
      row.launch_ok = false;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "offset_deg,total_emleo_kg,change_pct,launch_ok\n";
  for (const SweepRow& r : rows) {
    out << fmt_g(r.offset_deg) << ',' << fmt(r.total_emleo_kg) << ','
        << fmt_g(r.change_pct) << ',' << (r.launch_ok ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace clrpod::report
