#include "clrpod/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace clrpod::io {

using nlohmann::json;

namespace {

constexpr double kDeg = astro::kPi / 180.0;

const json& field(const json& obj, const std::string& key,
                  const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw FormatError(where + key + ": missing");
  }
  return obj.at(key);
}

double number(const json& obj, const std::string& key,
              const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw FormatError(where + key + ": expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback,
                 const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number(obj, key, where);
}

int integer(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) {
    throw FormatError(where + key + ": expected an integer");
  }
  return v.get<int>();
}

// A per-depot mass given as one number for all depots or as a list.
std::vector<double> per_depot(const json& params, const std::string& key,
                              int n_d, double fallback) {
  const std::string where = "params.";
  if (!params.contains(key)) return std::vector<double>(n_d, fallback);
  const json& v = params.at(key);
  if (v.is_number()) return std::vector<double>(n_d, v.get<double>());
  if (!v.is_array()) throw FormatError(where + key + ": expected number or list");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number()) {
      throw FormatError(where + key + "[" + std::to_string(k) +
                        "]: expected a number");
    }
    out.push_back(v[k].get<double>());
  }
  if (static_cast<int>(out.size()) != n_d) {
    throw FormatError(where + key + ": expected " + std::to_string(n_d) +
                      " entries");
  }
  return out;
}

astro::CircularOrbit orbit_from_json(const json& o, const std::string& where,
                                     const astro::CanonicalScale& scale) {
  const double a = number(o, "a_km", where);
  const double i = number(o, "i_deg", where);
  const double raan = number(o, "raan_deg", where);
  if (!(a > 0.0)) throw FormatError(where + "a_km: must be positive");
  if (i < 0.0 || i > 180.0) {
    throw FormatError(where + "i_deg: must lie in [0, 180]");
  }
  return astro::CircularOrbit(scale.to_du(a), i * kDeg, raan * kDeg);
}

// Writes the exact per-depot list, or one number when all entries agree.
json depot_masses(const std::vector<double>& v) {
  bool uniform = !v.empty();
  for (double x : v) uniform = uniform && x == v.front();
  if (uniform) return round15(v.front());
  json arr = json::array();
  for (double x : v) arr.push_back(round15(x));
  return arr;
}

}  // namespace

double round15(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

json orbit_to_json(const astro::CircularOrbit& o,
                   const astro::CanonicalScale& scale) {
  return json{{"a_km", round15(scale.to_km(o.a()))},
              {"i_deg", round15(o.inclination() / kDeg)},
              {"raan_deg", round15(o.raan() / kDeg)}};
}

model::Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("document: expected an object");
  model::Instance inst;
  if (doc.contains("scale")) {
    const json& s = doc.at("scale");
    inst.scale.du_km = number_or(s, "du_km", inst.scale.du_km, "scale.");
    inst.scale.mu_km3s2 = number_or(s, "mu_km3s2", inst.scale.mu_km3s2, "scale.");
  }
  try {
    inst.scale.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("scale: ") + e.what());
  }
  inst.n_d = integer(doc, "n_d", "");
  inst.n_v = integer(doc, "n_v", "");
  if (inst.n_d < 1) throw FormatError("n_d: must be at least 1");
  if (inst.n_v < 1) throw FormatError("n_v: must be at least 1");

  const json params = doc.contains("params") ? doc.at("params") : json::object();
  if (!params.is_object()) throw FormatError("params: expected an object");
  const std::string p = "params.";
  inst.max_launch_kg = number_or(params, "max_launch_kg", 12950.0, p);
  inst.r0 = inst.scale.to_du(number_or(params, "r0_km", 7000.0, p));
  inst.r_min = inst.scale.to_du(number_or(params, "r_min_km", 7000.0, p));
  inst.prop.g0 = number_or(params, "g0", inst.prop.g0, p);
  inst.prop.isp_launch = number_or(params, "isp_launch", inst.prop.isp_launch, p);
  inst.prop.isp_depot = number_or(params, "isp_depot", inst.prop.isp_depot, p);
  inst.prop.isp_servicer =
      number_or(params, "isp_servicer", inst.prop.isp_servicer, p);
  inst.servicer_dry_kg = per_depot(params, "servicer_dry_kg", inst.n_d, 500.0);
  inst.depot_dry_kg = per_depot(params, "depot_dry_kg", inst.n_d, 1500.0);

  const json& sats = field(doc, "satellites", "");
  if (!sats.is_array()) throw FormatError("satellites: expected a list");
  for (std::size_t j = 0; j < sats.size(); ++j) {
    const std::string where = "satellites[" + std::to_string(j) + "].";
    model::Satellite s;
    s.orbit = orbit_from_json(sats[j], where, inst.scale);
    s.payload_kg = number(sats[j], "payload_kg", where);
    inst.satellites.push_back(s);
  }
  if (doc.contains("depots_initial") && !doc.at("depots_initial").is_null()) {
    const json& deps = doc.at("depots_initial");
    if (!deps.is_array()) throw FormatError("depots_initial: expected a list");
    for (std::size_t k = 0; k < deps.size(); ++k) {
      inst.depots_initial.push_back(orbit_from_json(
          deps[k], "depots_initial[" + std::to_string(k) + "].", inst.scale));
    }
  }
  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return inst;
}

json instance_to_json(const model::Instance& inst) {
  json doc;
  doc["scale"] = {{"du_km", inst.scale.du_km},
                  {"mu_km3s2", inst.scale.mu_km3s2}};
  doc["params"] = {
      {"max_launch_kg", round15(inst.max_launch_kg)},
      {"r0_km", round15(inst.scale.to_km(inst.r0))},
      {"r_min_km", round15(inst.scale.to_km(inst.r_min))},
      {"g0", inst.prop.g0},
      {"isp_launch", inst.prop.isp_launch},
      {"isp_depot", inst.prop.isp_depot},
      {"isp_servicer", inst.prop.isp_servicer},
      {"servicer_dry_kg", depot_masses(inst.servicer_dry_kg)},
      {"depot_dry_kg", depot_masses(inst.depot_dry_kg)},
  };
  doc["n_d"] = inst.n_d;
  doc["n_v"] = inst.n_v;
  json sats = json::array();
  for (const model::Satellite& s : inst.satellites) {
    json o = orbit_to_json(s.orbit, inst.scale);
    o["payload_kg"] = round15(s.payload_kg);
    sats.push_back(std::move(o));
  }
  doc["satellites"] = std::move(sats);
  if (!inst.depots_initial.empty()) {
    json deps = json::array();
    for (const auto& d : inst.depots_initial) {
      deps.push_back(orbit_to_json(d, inst.scale));
    }
    doc["depots_initial"] = std::move(deps);
  }
  return doc;
}

model::Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return instance_from_json(doc);
}

void write_instance(const std::filesystem::path& path,
                    const model::Instance& inst) {
  write_atomic(path, instance_to_json(inst).dump(2) + "\n");
}

void write_atomic(const std::filesystem::path& path,
                  const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot write");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error(tmp.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace clrpod::io
