#include "clrpod/routing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace clrpod::routing {

std::string to_string(RowRole r) {
  switch (r) {
    case RowRole::RouteUse: return "route-use";
    case RowRole::VisitOnce: return "visit-once";
    case RowRole::FlowContinuity: return "flow-continuity";
    case RowRole::StartMass: return "start-mass";
    case RowRole::TransferMass: return "transfer-mass";
    case RowRole::ReturnMass: return "return-mass";
    case RowRole::LaunchMass: return "launch-mass";
    case RowRole::Symmetry: return "symmetry";
    case RowRole::FlowLink: return "flow-link";
    case RowRole::FlowBalance: return "flow-balance";
    case RowRole::FlowCover: return "flow-cover";
  }
  return "unknown";
}

MilpCounts closed_form_counts(int n_d, int n_v, int n_t, bool flow_cuts) {
  const long s = static_cast<long>(n_d) * n_v;
  const long t = n_t;
  MilpCounts c;
  c.binaries = s * t * (t + 1);
  c.masses = s + t;
  c.rows = s + t + 3 * s * t + t * (t - 1) + n_d + static_cast<long>(n_d) * (n_v - 1);
  if (flow_cuts) {
    c.auxiliary = s * t + t * (t - 1);
    c.rows += 2 * (s * t + t * (t - 1)) + t + s + t;
  }
  return c;
}

double MilpModel::largest_big_m() const {
  double m = 0.0;
  for (double v : big_m) m = std::max(m, v);
  return m;
}

std::string MilpModel::var_name(int var) const {
  const int nt = n_t();
  if (var < num_binaries()) {
    const int k = var / block();
    const int r = var % block();
    if (r < nt) return "zs[" + std::to_string(k) + "," + std::to_string(r) + "]";
    if (r >= nt * nt) {
      return "ze[" + std::to_string(k) + "," + std::to_string(r - nt * nt) + "]";
    }
    const int off = r - nt;
    const int i = off / (nt - 1);
    int j = off % (nt - 1);
    if (j >= i) ++j;
    return "zx[" + std::to_string(k) + "," + std::to_string(i) + "," +
           std::to_string(j) + "]";
  }
  int v = var - num_binaries();
  if (v < n_start()) return "u[" + std::to_string(v) + "]";
  v -= n_start();
  if (v < nt) return "u[t" + std::to_string(v) + "]";
  v -= nt;
  if (v < n_start() * nt) {
    return "ys[" + std::to_string(v / nt) + "," + std::to_string(v % nt) + "]";
  }
  v -= n_start() * nt;
  const int i = v / (nt - 1);
  int j = v % (nt - 1);
  if (j >= i) ++j;
  return "yx[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

namespace {

struct RowBuilder {
  MilpModel& m;
  lp::LinearProgram::Row row;

  RowBuilder& add(int var, double coef) {
    row.index.push_back(var);
    row.value.push_back(coef);
    return *this;
  }
  void commit(RowRole role, double lo, double hi, double big_m = 0.0) {
    row.lower = lo;
    row.upper = hi;
    m.lp.add_row(std::move(row));
    m.role.push_back(role);
    m.big_m.push_back(big_m);
    row = {};
  }
};

}  // namespace

MilpModel build_milp(const Instance& inst, const DepotPlacement& placement,
                     const MilpOptions& options) {
  inst.validate();
  if (placement.size() != inst.n_d) {
    throw std::invalid_argument("placement must have one orbit per depot");
  }
  for (int k = 0; k < inst.n_d; ++k) {
    if (placement.depots[k].a() < inst.r_min * (1.0 - 1e-12)) {
      throw std::invalid_argument("depot " + std::to_string(k) +
                                  " lies below the minimum radius");
    }
  }
  MilpModel m;
  m.inst = inst;
  m.placement = placement;
  m.options = options;
  m.table = model::build_transfer_table(inst, placement);
  m.sets = model::build_index_sets(inst.n_d, inst.n_v, inst.n_t());
  const auto& T = m.table;
  const int nt = inst.n_t();
  const int ns = inst.n_start();
  const int nd = inst.n_d;
  auto payload = [&](int j) { return inst.satellites[j].payload_kg; };

  m.start_cap.resize(ns);
  double cap_all = 0.0;
  for (int k = 0; k < ns; ++k) {
    const int d = k % nd;
    m.start_cap[k] =
        std::max(0.0, inst.max_launch_kg / T.phi[d] - inst.depot_dry(d));
    cap_all = std::max(cap_all, m.start_cap[k]);
  }

  // Cheapest mass a servicer can carry after leaving satellite i: a
  // shortest-path fixpoint over "go home now" and "serve j next".
  m.sat_floor.assign(nt, lp::kInf);
  for (int i = 0; i < nt; ++i) {
    for (int d = 0; d < nd; ++d) {
      m.sat_floor[i] =
          std::min(m.sat_floor[i], inst.servicer_dry(d) * T.arrival(d, i));
    }
  }
  for (int pass = 0; pass < nt; ++pass) {
    bool changed = false;
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < nt; ++j) {
        if (i == j) continue;
        const double v = (m.sat_floor[j] + payload(j)) * T.between(i, j);
        if (v < m.sat_floor[i] - 1e-12) {
          m.sat_floor[i] = v;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  std::vector<double> sat_cap(nt);
  for (int j = 0; j < nt; ++j) {
    sat_cap[j] = std::max(m.sat_floor[j], cap_all - payload(j));
  }

  // Columns.
  auto& lp = m.lp;
  for (int k = 0; k < ns; ++k) {
    const int d = k % nd;
    const double phi = T.phi[d];
    const double dry = inst.servicer_dry(d);
    for (int j = 0; j < nt; ++j) {
      const bool reachable =
          (m.sat_floor[j] + payload(j)) * T.departure(d, j) <=
          m.start_cap[k] * (1.0 + 1e-12);
      lp.add_var(-phi * dry, 0.0, reachable ? 1.0 : 0.0);
    }
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < nt; ++j) {
        if (i != j) lp.add_var(0.0, 0.0, 1.0);
      }
    }
    for (int i = 0; i < nt; ++i) lp.add_var(0.0, 0.0, 1.0);
  }
  for (int k = 0; k < ns; ++k) {
    lp.add_var(T.phi[k % nd], 0.0, m.start_cap[k]);
  }
  for (int i = 0; i < nt; ++i) lp.add_var(0.0, m.sat_floor[i], sat_cap[i]);
  if (options.flow_cuts) {
    for (int k = 0; k < ns; ++k) {
      for (int j = 0; j < nt; ++j) lp.add_var(0.0, 0.0, m.start_cap[k]);
    }
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < nt; ++j) {
        if (i != j) lp.add_var(0.0, 0.0, sat_cap[i]);
      }
    }
  }

  RowBuilder rb{m, {}};
  for (int k = 0; k < ns; ++k) {
    for (int j = 0; j < nt; ++j) rb.add(m.zs(k, j), 1.0);
    rb.commit(RowRole::RouteUse, -lp::kInf, 1.0);
  }
  for (int j = 0; j < nt; ++j) {
    for (int k = 0; k < ns; ++k) {
      rb.add(m.zs(k, j), 1.0);
      for (int i = 0; i < nt; ++i) {
        if (i != j) rb.add(m.zx(k, i, j), 1.0);
      }
    }
    rb.commit(RowRole::VisitOnce, 1.0, 1.0);
  }
  for (int k = 0; k < ns; ++k) {
    for (int j = 0; j < nt; ++j) {
      rb.add(m.zs(k, j), 1.0).add(m.ze(k, j), -1.0);
      for (int i = 0; i < nt; ++i) {
        if (i == j) continue;
        rb.add(m.zx(k, i, j), 1.0).add(m.zx(k, j, i), -1.0);
      }
      rb.commit(RowRole::FlowContinuity, 0.0, 0.0);
    }
  }
  // u_k - e u_j - M zs >= e m_j - M, with M the largest value the right
  // side can take.
  for (int k = 0; k < ns; ++k) {
    const int d = k % nd;
    for (int j = 0; j < nt; ++j) {
      const double e = T.departure(d, j);
      const double big = e * (sat_cap[j] + payload(j));
      rb.add(m.u_start(k), 1.0).add(m.u_sat(j), -e).add(m.zs(k, j), -big);
      rb.commit(RowRole::StartMass, e * payload(j) - big, lp::kInf, big);
    }
  }
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < nt; ++j) {
      if (i == j) continue;
      const double e = T.between(i, j);
      const double big =
          std::max(0.0, e * (sat_cap[j] + payload(j)) - m.sat_floor[i]);
      rb.add(m.u_sat(i), 1.0).add(m.u_sat(j), -e);
      for (int k = 0; k < ns; ++k) rb.add(m.zx(k, i, j), -big);
      rb.commit(RowRole::TransferMass, e * payload(j) - big, lp::kInf, big);
    }
  }
  for (int k = 0; k < ns; ++k) {
    const int d = k % nd;
    for (int i = 0; i < nt; ++i) {
      const double need = inst.servicer_dry(d) * T.arrival(d, i);
      const double big = std::max(0.0, need - m.sat_floor[i]);
      rb.add(m.u_sat(i), 1.0).add(m.ze(k, i), -big);
      rb.commit(RowRole::ReturnMass, need - big, lp::kInf, big);
    }
  }
  for (int d = 0; d < nd; ++d) {
    const double dry = inst.servicer_dry(d);
    for (int k : m.sets.group(d)) {
      rb.add(m.u_start(k), 1.0);
      for (int j = 0; j < nt; ++j) rb.add(m.zs(k, j), -dry);
    }
    rb.commit(RowRole::LaunchMass, -lp::kInf,
              inst.max_launch_kg / T.phi[d] - dry - inst.depot_dry(d));
  }
  for (int k = nd; k < ns; ++k) {
    for (int j = 0; j < nt; ++j) {
      rb.add(m.zs(k, j), 1.0).add(m.zs(k - nd, j), -1.0);
    }
    rb.commit(RowRole::Symmetry, -lp::kInf, 0.0);
  }

  if (options.flow_cuts) {
    // An arc carries nothing unless used, and when used at least the
    // cheapest mass that can still finish the route behind it.
    for (int k = 0; k < ns; ++k) {
      for (int j = 0; j < nt; ++j) {
        const double least =
            (m.sat_floor[j] + payload(j)) * T.departure(k % nd, j);
        rb.add(m.ys(k, j), 1.0).add(m.zs(k, j), -m.start_cap[k]);
        rb.commit(RowRole::FlowLink, -lp::kInf, 0.0, m.start_cap[k]);
        rb.add(m.ys(k, j), 1.0).add(m.zs(k, j), -least);
        rb.commit(RowRole::FlowLink, 0.0, lp::kInf);
      }
    }
    for (int i = 0; i < nt; ++i) {
      for (int j = 0; j < nt; ++j) {
        if (i == j) continue;
        const double least = (m.sat_floor[j] + payload(j)) * T.between(i, j);
        rb.add(m.yx(i, j), 1.0);
        for (int k = 0; k < ns; ++k) rb.add(m.zx(k, i, j), -sat_cap[i]);
        rb.commit(RowRole::FlowLink, -lp::kInf, 0.0, sat_cap[i]);
        rb.add(m.yx(i, j), 1.0);
        for (int k = 0; k < ns; ++k) rb.add(m.zx(k, i, j), -least);
        rb.commit(RowRole::FlowLink, 0.0, lp::kInf);
      }
    }
    // What arrives at j, net of the transfer, covers the payload plus what
    // leaves j.
    for (int j = 0; j < nt; ++j) {
      for (int k = 0; k < ns; ++k) {
        rb.add(m.ys(k, j), 1.0 / T.departure(k % nd, j));
        rb.add(m.ze(k, j),
               -inst.servicer_dry(k % nd) * T.arrival(k % nd, j));
      }
      for (int i = 0; i < nt; ++i) {
        if (i == j) continue;
        rb.add(m.yx(i, j), 1.0 / T.between(i, j));
        rb.add(m.yx(j, i), -1.0);
      }
      rb.commit(RowRole::FlowBalance, payload(j), lp::kInf);
    }
    for (int k = 0; k < ns; ++k) {
      rb.add(m.u_start(k), 1.0);
      for (int j = 0; j < nt; ++j) rb.add(m.ys(k, j), -1.0);
      rb.commit(RowRole::FlowCover, 0.0, lp::kInf);
    }
    for (int i = 0; i < nt; ++i) {
      rb.add(m.u_sat(i), 1.0);
      for (int j = 0; j < nt; ++j) {
        if (j != i) rb.add(m.yx(i, j), -1.0);
      }
      rb.commit(RowRole::FlowCover, 0.0, lp::kInf);
    }
  }

  m.counts = closed_form_counts(nd, inst.n_v, nt, options.flow_cuts);
  return m;
}

void dump_model(const MilpModel& m, std::ostream& out) {
  out << "# vars " << m.lp.num_vars() << " rows " << m.lp.num_rows() << "\n";
  out << "min";
  for (int j = 0; j < m.lp.num_vars(); ++j) {
    if (m.lp.cost[j] != 0.0) out << " " << m.lp.cost[j] << " " << m.var_name(j);
  }
  out << "\n";
  for (int r = 0; r < m.lp.num_rows(); ++r) {
    const auto& row = m.lp.rows[r];
    out << to_string(m.role[r]) << " r" << r << ":";
    if (std::isfinite(row.lower)) out << " " << row.lower << " <=";
    for (std::size_t t = 0; t < row.index.size(); ++t) {
      out << " " << (row.value[t] >= 0 ? "+" : "") << row.value[t] << " "
          << m.var_name(row.index[t]);
    }
    if (std::isfinite(row.upper)) out << " <= " << row.upper;
    if (m.big_m[r] > 0.0) out << "  [M=" << m.big_m[r] << "]";
    out << "\n";
  }
  for (int j = 0; j < m.lp.num_vars(); ++j) {
    out << "bound " << m.var_name(j) << " " << m.lp.lower[j] << " "
        << m.lp.upper[j] << (m.is_binary(j) ? " binary" : "") << "\n";
  }
}

std::vector<double> encode(const MilpModel& m, const RoutingSolution& sol) {
  std::vector<double> x(m.lp.num_vars(), 0.0);
  for (const Route& r : sol.routes) {
    const auto& seq = r.satellites;
    if (seq.empty()) continue;
    const int k = r.start_node;
    x[m.zs(k, seq.front())] = 1.0;
    for (std::size_t n = 0; n + 1 < seq.size(); ++n) {
      x[m.zx(k, seq[n], seq[n + 1])] = 1.0;
    }
    x[m.ze(k, seq.back())] = 1.0;
    x[m.u_start(k)] = sol.u_start[k];
    if (m.options.flow_cuts) {
      x[m.ys(k, seq.front())] = sol.u_start[k];
      for (std::size_t n = 0; n + 1 < seq.size(); ++n) {
        x[m.yx(seq[n], seq[n + 1])] = sol.u_sat[seq[n]];
      }
    }
  }
  for (int i = 0; i < m.n_t(); ++i) x[m.u_sat(i)] = sol.u_sat[i];
  return x;
}

Decoded decode(const MilpModel& m, const std::vector<double>& x) {
  const int nt = m.n_t();
  const int nd = m.sets.n_d;
  auto on = [&](int var) { return x[var] > 0.5; };
  Decoded out;
  std::vector<char> reached(nt, 0);
  for (int k = 0; k < m.n_start(); ++k) {
    int cur = -1;
    for (int j = 0; j < nt && cur < 0; ++j) {
      if (on(m.zs(k, j))) cur = j;
    }
    if (cur < 0) continue;
    Route r{k % nd, k, {}};
    while (cur >= 0 && !reached[cur]) {
      reached[cur] = 1;
      r.satellites.push_back(cur);
      int next = -1;
      for (int j = 0; j < nt && next < 0; ++j) {
        if (j != cur && on(m.zx(k, cur, j))) next = j;
      }
      cur = next;
    }
    out.routes.push_back(std::move(r));
  }
  // Anything left over sits on cycles of inter-satellite arcs.
  for (int s = 0; s < nt; ++s) {
    if (reached[s]) continue;
    std::vector<int> cycle;
    int cur = s;
    while (!reached[cur]) {
      reached[cur] = 1;
      int next = -1;
      int var = -1;
      for (int k = 0; k < m.n_start() && next < 0; ++k) {
        for (int j = 0; j < nt; ++j) {
          if (j != cur && on(m.zx(k, cur, j))) {
            next = j;
            var = m.zx(k, cur, j);
            break;
          }
        }
      }
      if (next < 0) break;
      cycle.push_back(var);
      cur = next;
    }
    if (!cycle.empty()) out.cycles.push_back(std::move(cycle));
  }
  return out;
}

}  // namespace clrpod::routing
