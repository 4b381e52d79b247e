#pragma once

// Experiment harness: parses a JSON experiment description, runs the
// numbered diagnostics over a scale grid, and writes a deterministic report
// (report.json plus CSV tables). Cell failures are isolated per grid cell;
// outputs carry no timestamps, paths, or thread-count dependence, so two
// runs of the same configuration are byte-identical.

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "core.hpp"
#include "models.hpp"
#include "nuclearity.hpp"
#include "onep.hpp"
#include "sectors.hpp"
#include "states.hpp"
#include "theta.hpp"

namespace scalelab::harness {

using nlohmann::json;

// ---------------------------------------------------------------------------
// configuration

struct ScaleGrid {
  double lam_min = 1e-3;
  double lam_max = 1.0;
  int per_decade = 4;

  double decades() const { return std::log10(lam_max / lam_min); }

  void validate() const {
    if (!(lam_min > 0) || !(lam_max > lam_min))
      throw ConfigError("grid: need 0 < lam_min < lam_max");
    if (per_decade < 1 || per_decade > 64)
      throw ConfigError("grid: per_decade out of range");
    if (decades() < 2.0 - 1e-12)
      throw ConfigError("grid: need at least two decades of scales");
    double steps = decades() * per_decade;
    if (std::abs(steps - std::round(steps)) > 1e-9)
      throw ConfigError("grid: endpoints must lie on the decade lattice");
  }

  std::vector<double> points() const {  // descending, endpoints included
    validate();
    int n = static_cast<int>(std::llround(decades() * per_decade));
    std::vector<double> out;
    for (int k = 0; k <= n; ++k)
      out.push_back(lam_max * std::pow(10.0, -double(k) / per_decade));
    return out;
  }
};

struct SectorCase {
  std::string name;
  std::string group;                    // empty for the torus case
  std::vector<int> normal;              // element ids
  bool normal_is_center = false;
  long long torus_order = 0;            // > 0 selects the U(1) case
  long long box = 0;
  int expected_preserved = -1;          // -1: check against the quotient only
  std::vector<long long> expected_weights;
};

struct ExperimentConfig {
  std::string experiment = "default";
  Dims dims{};
  ScaleGrid grid;
  QuadOptions quad;

  double weyl_width = 1.0;
  double local_width = 0.2;
  std::vector<double> covariance_masses{0.5, 1.0, 2.0};
  std::vector<double> energy_masses{0.0, 0.5, 1.0, 2.0};

  std::vector<double> family_widths{0.12, 0.16, 0.2};
  double region_radius = 2.0;

  int damped_m1 = 1, damped_p1 = 1;
  std::string schedule_name = "log2_squared";
  double lambda0 = 1.0;

  std::string free_group = "Z4";
  std::vector<std::string> free_charges{"chi0"};
  double free_mass = 1.0;

  double beta = 1.0;
  std::vector<double> p_list{0.5, 1.0};
  double tail_q = 0.5;
  double tail_tol = 1e-3;
  std::vector<double> decay_grid{1.0, 0.1, 0.01};
  std::vector<double> proxy_grid{1.0, 0.1, 0.01, 0.001};

  std::vector<SectorCase> sector_cases;

  int ortho_maps = 200;
  int tensor_pairs = 50;
  double content_eps = 0.4;
  double window_p = 0.1;

  std::uint64_t master_seed = 0;
  int threads = 0;  // execution detail: excluded from the canonical echo

  json canonical() const;
  std::uint64_t hash() const {
    std::string s = canonical().dump();
    return detail::fnv1a64(std::string_view(s));
  }

  static ExperimentConfig from_json(const json& j);
  static ExperimentConfig from_file(const std::string& path);
};

namespace detail_h {

inline void reject_unknown(const json& j, const char* where,
                           std::initializer_list<const char*> keys) {
  if (!j.is_object())
    throw ConfigError(std::string(where) + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known)
      throw ConfigError(std::string(where) + ": unknown key '" + it.key() +
                        "'");
  }
}

template <class T>
inline T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0)) throw ConfigError(std::string(what) + " must be positive");
}

}  // namespace detail_h

inline ExperimentConfig ExperimentConfig::from_json(const json& j) {
  using detail_h::get_or;
  detail_h::reject_unknown(
      j, "config",
      {"experiment", "dims", "grid", "quadrature", "probes", "family",
       "damped", "free", "theta", "proxy_grid", "sectors", "appendix",
       "seeds", "threads"});
  ExperimentConfig c;
  c.experiment = get_or<std::string>(j, "experiment", c.experiment);
  c.dims.s = get_or<int>(j, "dims", 3);
  c.dims.validate();

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    detail_h::reject_unknown(g, "grid", {"lam_min", "lam_max", "per_decade"});
    c.grid.lam_min = get_or<double>(g, "lam_min", c.grid.lam_min);
    c.grid.lam_max = get_or<double>(g, "lam_max", c.grid.lam_max);
    c.grid.per_decade = get_or<int>(g, "per_decade", c.grid.per_decade);
  }
  c.grid.validate();

  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    detail_h::reject_unknown(q, "quadrature",
                             {"radial_per_panel", "radial_octaves",
                              "angular_nodes", "mass_per_panel",
                              "mass_window_panels", "tail_tol"});
    c.quad.radial_per_panel =
        get_or<int>(q, "radial_per_panel", c.quad.radial_per_panel);
    c.quad.radial_octaves =
        get_or<int>(q, "radial_octaves", c.quad.radial_octaves);
    c.quad.angular_nodes =
        get_or<int>(q, "angular_nodes", c.quad.angular_nodes);
    c.quad.mass_per_panel =
        get_or<int>(q, "mass_per_panel", c.quad.mass_per_panel);
    c.quad.mass_window_panels =
        get_or<int>(q, "mass_window_panels", c.quad.mass_window_panels);
    c.quad.tail_tol = get_or<double>(q, "tail_tol", c.quad.tail_tol);
    if (c.quad.radial_per_panel < 2 || c.quad.radial_octaves < 4 ||
        c.quad.angular_nodes < 2 || c.quad.mass_per_panel < 2 ||
        c.quad.mass_window_panels < 2)
      throw ConfigError("quadrature: resolution parameters too small");
    detail_h::require_positive(c.quad.tail_tol, "quadrature.tail_tol");
  }

  if (j.contains("probes")) {
    const json& p = j.at("probes");
    detail_h::reject_unknown(p, "probes",
                             {"weyl_width", "local_width",
                              "covariance_masses", "energy_masses"});
    c.weyl_width = get_or<double>(p, "weyl_width", c.weyl_width);
    c.local_width = get_or<double>(p, "local_width", c.local_width);
    c.covariance_masses = get_or<std::vector<double>>(p, "covariance_masses",
                                                      c.covariance_masses);
    c.energy_masses =
        get_or<std::vector<double>>(p, "energy_masses", c.energy_masses);
  }
  detail_h::require_positive(c.weyl_width, "probes.weyl_width");
  detail_h::require_positive(c.local_width, "probes.local_width");
  if (c.covariance_masses.empty())
    throw ConfigError("probes.covariance_masses: need at least one mass");
  for (double m : c.covariance_masses)
    detail_h::require_positive(m, "probes.covariance_masses entry");
  for (double m : c.energy_masses)
    if (m < 0) throw ConfigError("probes.energy_masses: negative mass");

  if (j.contains("family")) {
    const json& f = j.at("family");
    detail_h::reject_unknown(f, "family", {"widths", "region_radius"});
    c.family_widths =
        get_or<std::vector<double>>(f, "widths", c.family_widths);
    c.region_radius = get_or<double>(f, "region_radius", c.region_radius);
  }
  if (c.family_widths.empty())
    throw ConfigError("family.widths: need at least one width");
  for (double w : c.family_widths)
    detail_h::require_positive(w, "family.widths entry");
  detail_h::require_positive(c.region_radius, "family.region_radius");

  if (j.contains("damped")) {
    const json& d = j.at("damped");
    detail_h::reject_unknown(d, "damped", {"m1", "p1", "schedule", "lambda0"});
    c.damped_m1 = get_or<int>(d, "m1", c.damped_m1);
    c.damped_p1 = get_or<int>(d, "p1", c.damped_p1);
    c.schedule_name = get_or<std::string>(d, "schedule", c.schedule_name);
    c.lambda0 = get_or<double>(d, "lambda0", c.lambda0);
  }
  if (c.damped_m1 < 0 || c.damped_p1 < 0 || c.damped_m1 + c.damped_p1 < 1)
    throw ConfigError("damped: need m1 + p1 >= 1");
  if (c.schedule_name != "log2_squared" && c.schedule_name != "log2_linear" &&
      c.schedule_name != "zero")
    throw ConfigError("damped.schedule: unknown schedule '" +
                      c.schedule_name + "'");
  detail_h::require_positive(c.lambda0, "damped.lambda0");

  if (j.contains("free")) {
    const json& f = j.at("free");
    detail_h::reject_unknown(f, "free", {"group", "charges", "mass"});
    c.free_group = get_or<std::string>(f, "group", c.free_group);
    c.free_charges =
        get_or<std::vector<std::string>>(f, "charges", c.free_charges);
    c.free_mass = get_or<double>(f, "mass", c.free_mass);
  }
  if (c.free_charges.empty())
    throw ConfigError("free.charges: need at least one irrep name");
  if (c.free_mass < 0) throw ConfigError("free.mass: negative mass");

  if (j.contains("theta")) {
    const json& t = j.at("theta");
    detail_h::reject_unknown(
        t, "theta", {"beta", "p_list", "tail_q", "tail_tol", "decay_grid"});
    c.beta = get_or<double>(t, "beta", c.beta);
    c.p_list = get_or<std::vector<double>>(t, "p_list", c.p_list);
    c.tail_q = get_or<double>(t, "tail_q", c.tail_q);
    c.tail_tol = get_or<double>(t, "tail_tol", c.tail_tol);
    c.decay_grid = get_or<std::vector<double>>(t, "decay_grid", c.decay_grid);
  }
  detail_h::require_positive(c.beta, "theta.beta");
  if (c.p_list.empty()) throw ConfigError("theta.p_list: empty");
  for (double p : c.p_list)
    if (!(p > 0) || p > 1)
      throw ConfigError("theta.p_list: entries must be in (0, 1]");
  if (!(c.tail_q > 0) || c.tail_q > 1)
    throw ConfigError("theta.tail_q: must be in (0, 1]");
  detail_h::require_positive(c.tail_tol, "theta.tail_tol");
  if (c.decay_grid.empty()) throw ConfigError("theta.decay_grid: empty");
  for (double l : c.decay_grid)
    detail_h::require_positive(l, "theta.decay_grid entry");

  c.proxy_grid = get_or<std::vector<double>>(j, "proxy_grid", c.proxy_grid);
  if (c.proxy_grid.empty()) throw ConfigError("proxy_grid: empty");
  for (double l : c.proxy_grid)
    detail_h::require_positive(l, "proxy_grid entry");

  if (j.contains("sectors")) {
    if (!j.at("sectors").is_array())
      throw ConfigError("sectors: expected an array of cases");
    for (const json& s : j.at("sectors")) {
      detail_h::reject_unknown(s, "sectors entry",
                               {"name", "group", "normal", "torus_order",
                                "box", "expected_preserved",
                                "expected_weights"});
      SectorCase sc;
      sc.name = get_or<std::string>(s, "name", "");
      if (sc.name.empty()) throw ConfigError("sectors entry: missing name");
      sc.torus_order = get_or<long long>(s, "torus_order", 0);
      if (sc.torus_order > 0) {
        sc.box = get_or<long long>(s, "box", 4);
        if (sc.box < 1) throw ConfigError("sectors entry: box must be >= 1");
        sc.expected_weights = get_or<std::vector<long long>>(
            s, "expected_weights", sc.expected_weights);
      } else {
        sc.group = get_or<std::string>(s, "group", "");
        if (sc.group.empty())
          throw ConfigError("sectors entry '" + sc.name +
                            "': need a group or torus_order");
        if (s.contains("normal") && s.at("normal").is_string()) {
          if (s.at("normal").get<std::string>() != "center")
            throw ConfigError("sectors entry: normal must be ids or 'center'");
          sc.normal_is_center = true;
        } else {
          sc.normal = get_or<std::vector<int>>(s, "normal", {});
          if (sc.normal.empty())
            throw ConfigError("sectors entry '" + sc.name +
                              "': missing normal subgroup");
        }
      }
      sc.expected_preserved = get_or<int>(s, "expected_preserved", -1);
      c.sector_cases.push_back(std::move(sc));
    }
  }

  if (j.contains("appendix")) {
    const json& a = j.at("appendix");
    detail_h::reject_unknown(
        a, "appendix",
        {"ortho_maps", "tensor_pairs", "content_eps", "window_p"});
    c.ortho_maps = get_or<int>(a, "ortho_maps", c.ortho_maps);
    c.tensor_pairs = get_or<int>(a, "tensor_pairs", c.tensor_pairs);
    c.content_eps = get_or<double>(a, "content_eps", c.content_eps);
    c.window_p = get_or<double>(a, "window_p", c.window_p);
  }
  if (c.ortho_maps < 1 || c.tensor_pairs < 1)
    throw ConfigError("appendix: counts must be >= 1");
  detail_h::require_positive(c.content_eps, "appendix.content_eps");
  if (!(c.window_p > 0) || c.window_p > 1)
    throw ConfigError("appendix.window_p: must be in (0, 1]");

  if (!j.contains("seeds") || !j.at("seeds").is_object() ||
      !j.at("seeds").contains("master"))
    throw ConfigError("seeds.master: required (explicit seeding only)");
  detail_h::reject_unknown(j.at("seeds"), "seeds", {"master"});
  c.master_seed = j.at("seeds").at("master").get<std::uint64_t>();

  c.threads = get_or<int>(j, "threads", 0);
  if (c.threads < 0 || c.threads > 256)
    throw ConfigError("threads: out of range");
  return c;
}

inline ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return from_json(j);
}

inline json ExperimentConfig::canonical() const {
  json j;
  j["experiment"] = experiment;
  j["dims"] = dims.s;
  j["grid"] = {{"lam_min", grid.lam_min},
               {"lam_max", grid.lam_max},
               {"per_decade", grid.per_decade}};
  j["quadrature"] = {{"radial_per_panel", quad.radial_per_panel},
                     {"radial_octaves", quad.radial_octaves},
                     {"angular_nodes", quad.angular_nodes},
                     {"mass_per_panel", quad.mass_per_panel},
                     {"mass_window_panels", quad.mass_window_panels},
                     {"tail_tol", quad.tail_tol}};
  j["probes"] = {{"weyl_width", weyl_width},
                 {"local_width", local_width},
                 {"covariance_masses", covariance_masses},
                 {"energy_masses", energy_masses}};
  j["family"] = {{"widths", family_widths}, {"region_radius", region_radius}};
  j["damped"] = {{"m1", damped_m1},
                 {"p1", damped_p1},
                 {"schedule", schedule_name},
                 {"lambda0", lambda0}};
  j["free"] = {{"group", free_group},
               {"charges", free_charges},
               {"mass", free_mass}};
  j["theta"] = {{"beta", beta},
                {"p_list", p_list},
                {"tail_q", tail_q},
                {"tail_tol", tail_tol},
                {"decay_grid", decay_grid}};
  j["proxy_grid"] = proxy_grid;
  json cases = json::array();
  for (const auto& sc : sector_cases) {
    json s;
    s["name"] = sc.name;
    if (sc.torus_order > 0) {
      s["torus_order"] = sc.torus_order;
      s["box"] = sc.box;
      if (!sc.expected_weights.empty())
        s["expected_weights"] = sc.expected_weights;
    } else {
      s["group"] = sc.group;
      if (sc.normal_is_center)
        s["normal"] = "center";
      else
        s["normal"] = sc.normal;
    }
    if (sc.expected_preserved >= 0)
      s["expected_preserved"] = sc.expected_preserved;
    cases.push_back(std::move(s));
  }
  j["sectors"] = std::move(cases);
  j["appendix"] = {{"ortho_maps", ortho_maps},
                   {"tensor_pairs", tensor_pairs},
                   {"content_eps", content_eps},
                   {"window_p", window_p}};
  j["seeds"] = {{"master", master_seed}};
  return j;
}

// ---------------------------------------------------------------------------
// reports

struct Claim {
  std::string id;
  std::string anchor;  // experiment the claim belongs to
  bool pass = false;
  bool proxy = false;  // finite-generator stand-in, not a theorem check
  bool error = false;  // evaluation failed; details carry the message
  std::string details;
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // preformatted cells
};

struct RunReport {
  std::string experiment;
  std::uint64_t config_hash = 0;
  std::vector<Claim> claims;
  std::vector<Table> tables;
  std::vector<std::string> cell_errors;
  json config_echo;

  bool all_pass() const {
    for (const auto& c : claims)
      if (!c.pass || c.error) return false;
    return true;
  }

  void merge(RunReport&& other) {
    for (auto& c : other.claims) claims.push_back(std::move(c));
    for (auto& t : other.tables) tables.push_back(std::move(t));
    for (auto& e : other.cell_errors) cell_errors.push_back(std::move(e));
  }

  json to_json() const {
    json j;
    j["experiment"] = experiment;
    j["config_hash"] = detail::hex16(config_hash);
    j["config"] = config_echo;
    json cl = json::array();
    for (const auto& c : claims)
      cl.push_back({{"id", c.id},
                    {"anchor", c.anchor},
                    {"pass", c.pass},
                    {"proxy", c.proxy},
                    {"error", c.error},
                    {"details", c.details}});
    j["claims"] = std::move(cl);
    json tb = json::array();
    for (const auto& t : tables)
      tb.push_back({{"name", t.name},
                    {"header", t.header},
                    {"rows", t.rows.size()},
                    {"path", "tables/" + t.name + ".csv"}});
    j["tables"] = std::move(tb);
    j["cell_errors"] = cell_errors;
    return j;
  }
};

// ---------------------------------------------------------------------------
// execution helpers

namespace detail_h {

inline int thread_count(int requested) {
  if (requested > 0) return std::min(requested, 256);
  unsigned hw = std::thread::hardware_concurrency();
  return std::max(1, std::min<int>(static_cast<int>(hw ? hw : 1), 16));
}

// index-sharded loop; the body must not throw (cells catch internally) and
// must write only to its own slot, which keeps results order-independent
inline void parallel_for(int n, int threads,
                         const std::function<void(int)>& body) {
  if (n <= 0) return;
  int t = std::min(thread_count(threads), n);
  if (t <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int k = 0; k < t; ++k)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

template <class F>
inline std::optional<std::string> guarded(F&& f) {
  try {
    f();
    return std::nullopt;
  } catch (const std::exception& e) {
    return std::string(e.what());
  }
}

inline std::string fmt(double v) { return detail::sci12(v); }
inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(long long v) { return std::to_string(v); }

inline std::shared_ptr<const sectors::FiniteGroup> make_group(
    const std::string& name) {
  using sectors::FiniteGroup;
  if (name == "S3")
    return std::make_shared<FiniteGroup>(FiniteGroup::symmetric3());
  if (name == "D4")
    return std::make_shared<FiniteGroup>(FiniteGroup::dihedral4());
  if (name == "Q8")
    return std::make_shared<FiniteGroup>(FiniteGroup::quaternion8());
  if (name == "Z2xZ2")
    return std::make_shared<FiniteGroup>(FiniteGroup::product(
        FiniteGroup::cyclic(2), FiniteGroup::cyclic(2)));
  if (name.size() > 1 && name[0] == 'Z') {
    int n = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
      if (name[i] < '0' || name[i] > '9') { n = -1; break; }
      n = n * 10 + (name[i] - '0');
    }
    if (n >= 1 && n <= 64)
      return std::make_shared<FiniteGroup>(FiniteGroup::cyclic(n));
  }
  throw ConfigError("unknown group name: " + name);
}

inline NSchedule make_schedule(const std::string& name, double lambda0) {
  if (name == "log2_squared") return NSchedule::log2_squared(lambda0);
  if (name == "log2_linear") return NSchedule::log2_linear(lambda0);
  if (name == "zero") return NSchedule::zero();
  throw ConfigError("unknown schedule: " + name);
}

inline TestFunction gauss_fn(Dims d, Domain dom, double width) {
  GaussianSpec g;
  g.width = width;
  return TestFunction::gaussian(d, dom, g);
}

inline FreeMultipletFactor make_free_factor(const ExperimentConfig& cfg) {
  auto G = make_group(cfg.free_group);
  auto reps = sectors::irreps(*G);
  std::vector<int> delta2;
  std::map<int, double> mass_of;
  for (const std::string& nm : cfg.free_charges) {
    int idx = -1;
    for (std::size_t i = 0; i < reps.size(); ++i)
      if (reps[i].name == nm) idx = static_cast<int>(i);
    if (idx < 0)
      throw ConfigError("free.charges: no irrep named '" + nm + "' in " +
                        cfg.free_group);
    delta2.push_back(idx);
    mass_of[idx] = cfg.free_mass;
  }
  return build_free_factor(cfg.dims, G, reps, delta2, mass_of);
}

inline FreeMultipletFactor make_singleton_factor(Dims dims, double mass) {
  auto G = std::make_shared<sectors::FiniteGroup>(
      sectors::FiniteGroup::cyclic(1));
  auto reps = sectors::irreps(*G);
  return build_free_factor(dims, G, reps, {0}, {{0, mass}});
}

inline DampedFactor make_damped_factor(const ExperimentConfig& cfg) {
  return build_damped_factor(cfg.dims,
                             make_schedule(cfg.schedule_name, cfg.lambda0),
                             cfg.damped_m1, cfg.damped_p1);
}

inline RunReport init_report(const ExperimentConfig& cfg,
                             const std::string& name) {
  RunReport rep;
  rep.experiment = name;
  rep.config_echo = cfg.canonical();
  rep.config_hash = cfg.hash();
  return rep;
}

inline std::size_t find_scale(const std::vector<double>& grid, double lam) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i] / lam - 1.0) < 1e-9) return i;
  throw ValidationError("scale " + std::to_string(lam) + " not on the grid");
}

}  // namespace detail_h

// ---------------------------------------------------------------------------
// experiment: scaling-limit

inline RunReport run_scaling_limit(const ExperimentConfig& cfg) {
  using detail_h::fmt;
  RunReport rep = detail_h::init_report(cfg, "scaling-limit");
  const std::vector<double> grid = cfg.grid.points();

  TestFunction g = detail_h::gauss_fn(cfg.dims, Domain::Spatial,
                                      cfg.weyl_width);
  TestFunction z = TestFunction::zero(cfg.dims, Domain::Spatial);
  struct Probe {
    std::string name;
    CauchyDatum d;
  };
  const std::vector<Probe> probes = {{"g", CauchyDatum::make(g, z)},
                                     {"h", CauchyDatum::make(z, g)},
                                     {"gh", CauchyDatum::make(g, g)}};

  // --- mass-scaling covariance: q_m(dilated by lam) vs q_{lam m}
  {
    struct Cell {
      double q_dil = 0, q_tgt = 0, rel = 0;
    };
    const int nl = static_cast<int>(grid.size());
    const int nm = static_cast<int>(cfg.covariance_masses.size());
    const int np = static_cast<int>(probes.size());
    std::vector<Cell> cells(nl * nm * np);
    std::vector<std::string> errs(cells.size());
    detail_h::parallel_for(
        static_cast<int>(cells.size()), cfg.threads, [&](int i) {
          auto e = detail_h::guarded([&] {
            int il = i / (nm * np), im = (i / np) % nm, ip = i % np;
            double lam = grid[il], m = cfg.covariance_masses[im];
            const CauchyDatum& d = probes[ip].d;
            Cell& c = cells[i];
            c.q_dil = vacuum_form(d.dilated(lam), m, cfg.quad).q;
            c.q_tgt = vacuum_form(d, lam * m, cfg.quad).q;
            c.rel = std::abs(c.q_dil - c.q_tgt) / c.q_tgt;
          });
          if (e) errs[i] = *e;
        });
    Table t;
    t.name = "covariance";
    t.header = {"lam", "mass", "probe", "q_dilated", "q_target", "rel_err"};
    double worst = 0;
    bool cell_err = false;
    for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
      int il = i / (nm * np), im = (i / np) % nm, ip = i % np;
      if (!errs[i].empty()) {
        cell_err = true;
        rep.cell_errors.push_back("covariance[" + fmt(grid[il]) + "," +
                                  fmt(cfg.covariance_masses[im]) + "," +
                                  probes[ip].name + "]: " + errs[i]);
        continue;
      }
      const Cell& c = cells[i];
      worst = std::max(worst, c.rel);
      t.rows.push_back({fmt(grid[il]), fmt(cfg.covariance_masses[im]),
                        probes[ip].name, fmt(c.q_dil), fmt(c.q_tgt),
                        fmt(c.rel)});
    }
    rep.tables.push_back(std::move(t));
    rep.claims.push_back({"mass-scaling-covariance", "scaling-limit",
                          !cell_err && worst < 1e-6, false, cell_err,
                          "max rel err " + fmt(worst) + " (tol 1e-06) over " +
                              fmt(static_cast<int>(cells.size())) + " cells"});
  }

  // --- massless dilation invariance
  {
    const int nl = static_cast<int>(grid.size());
    const int np = static_cast<int>(probes.size());
    std::vector<double> base(np, 0.0);
    std::vector<double> qv(nl * np, 0.0);
    std::vector<std::string> errs(nl * np);
    for (int ip = 0; ip < np; ++ip)
      base[ip] = vacuum_form(probes[ip].d, 0.0, cfg.quad).q;
    detail_h::parallel_for(nl * np, cfg.threads, [&](int i) {
      auto e = detail_h::guarded([&] {
        int il = i / np, ip = i % np;
        qv[i] = vacuum_form(probes[ip].d.dilated(grid[il]), 0.0, cfg.quad).q;
      });
      if (e) errs[i] = *e;
    });
    Table t;
    t.name = "massless_invariance";
    t.header = {"lam", "probe", "q", "rel_dev"};
    double worst = 0;
    bool cell_err = false;
    for (int i = 0; i < nl * np; ++i) {
      int il = i / np, ip = i % np;
      if (!errs[i].empty()) {
        cell_err = true;
        rep.cell_errors.push_back("massless[" + fmt(grid[il]) + "," +
                                  probes[ip].name + "]: " + errs[i]);
        continue;
      }
      double dev = std::abs(qv[i] - base[ip]) / base[ip];
      worst = std::max(worst, dev);
      t.rows.push_back(
          {fmt(grid[il]), probes[ip].name, fmt(qv[i]), fmt(dev)});
    }
    rep.tables.push_back(std::move(t));
    rep.claims.push_back({"massless-dilation-invariance", "scaling-limit",
                          !cell_err && worst < 1e-8, false, cell_err,
                          "max rel deviation " + fmt(worst) + " (tol 1e-08)"});
  }

  // --- approach to the massless limit along the orbit
  {
    const int nl = static_cast<int>(grid.size());
    const int nm = static_cast<int>(cfg.covariance_masses.size());
    const int np = 2;  // the pure (g, 0) and (0, h) probes are monotone
    std::vector<double> gap(nl * nm * np, 0.0);
    std::vector<std::string> errs(gap.size());
    std::vector<double> target(np, 0.0);
    for (int ip = 0; ip < np; ++ip)
      target[ip] = vacuum_form(probes[ip].d, 0.0, cfg.quad).weyl();
    detail_h::parallel_for(
        static_cast<int>(gap.size()), cfg.threads, [&](int i) {
          auto e = detail_h::guarded([&] {
            int il = i / (nm * np), im = (i / np) % nm, ip = i % np;
            double w = vacuum_form(probes[ip].d.dilated(grid[il]),
                                   cfg.covariance_masses[im], cfg.quad)
                           .weyl();
            gap[i] = std::abs(w - target[ip]);
          });
          if (e) errs[i] = *e;
        });
    Table t;
    t.name = "limit_gap";
    t.header = {"lam", "mass", "probe", "gap"};
    bool cell_err = false;
    for (std::size_t i = 0; i < gap.size(); ++i)
      if (!errs[i].empty()) {
        cell_err = true;
        rep.cell_errors.push_back("limit_gap: " + errs[i]);
      }
    bool pass = !cell_err;
    double worst_ratio = 0;
    for (int im = 0; im < nm && !cell_err; ++im)
      for (int ip = 0; ip < np; ++ip) {
        auto at = [&](int il) { return gap[(il * nm + im) * np + ip]; };
        for (int il = 0; il < nl; ++il)
          t.rows.push_back({fmt(grid[il]), fmt(cfg.covariance_masses[im]),
                            probes[ip].name, fmt(at(il))});
        worst_ratio = std::max(worst_ratio, at(nl - 1) / at(0));
        pass = pass && at(nl - 1) < 1e-2 * at(0);
        for (int il = 0; il < nl; ++il)
          for (int jl = il + 1; jl < nl; ++jl)
            if (std::abs(grid[il] / grid[jl] - 10.0) < 1e-9)
              pass = pass && at(jl) < at(il);
      }
    rep.tables.push_back(std::move(t));
    rep.claims.push_back(
        {"massive-limit-approach", "scaling-limit", pass, false, cell_err,
         "max end/start gap ratio " + fmt(worst_ratio) +
             " (tol 1e-02), decade steps strictly decreasing"});
  }

  // --- factorization across independent factors
  {
    const double mA = cfg.covariance_masses.front();
    const double mB = cfg.covariance_masses.back();
    ModelContext ctxA{cfg.dims, MassMeasure::point(mA), cfg.quad};
    ModelContext ctxB{cfg.dims, MassMeasure::point(mB), cfg.quad};
    const std::vector<std::pair<int, int>> pairs = {{0, 1}, {0, 2}, {1, 2}};
    const int nl = static_cast<int>(grid.size());
    std::vector<FactorizationCheck> cells(nl * pairs.size());
    std::vector<std::string> errs(cells.size());
    detail_h::parallel_for(
        static_cast<int>(cells.size()), cfg.threads, [&](int i) {
          auto e = detail_h::guarded([&] {
            int il = i / static_cast<int>(pairs.size());
            int ik = i % static_cast<int>(pairs.size());
            ScalingFamily FA =
                ScalingFamily::cauchy_orbit(probes[pairs[ik].first].d);
            ScalingFamily FB =
                ScalingFamily::cauchy_orbit(probes[pairs[ik].second].d);
            cells[i] = product_factorization(ctxA, ctxB, FA, FB, grid[il]);
          });
          if (e) errs[i] = *e;
        });
    Table t;
    t.name = "factorization";
    t.header = {"lam", "pair", "lhs", "rhs", "defect"};
    double worst = 0;
    bool cell_err = false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      int il = static_cast<int>(i) / static_cast<int>(pairs.size());
      int ik = static_cast<int>(i) % static_cast<int>(pairs.size());
      std::string pname =
          probes[pairs[ik].first].name + "*" + probes[pairs[ik].second].name;
      if (!errs[i].empty()) {
        cell_err = true;
        rep.cell_errors.push_back("factorization[" + pname + "]: " + errs[i]);
        continue;
      }
      worst = std::max(worst, cells[i].defect);
      t.rows.push_back({fmt(grid[il]), pname, fmt(cells[i].lhs),
                        fmt(cells[i].rhs), fmt(cells[i].defect)});
    }
    rep.tables.push_back(std::move(t));
    rep.claims.push_back({"product-factorization", "scaling-limit",
                          !cell_err && worst < 1e-12, false, cell_err,
                          "max defect " + fmt(worst) + " (tol 1e-12)"});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// experiment: nuclearity (damped inclusion spectra)

inline RunReport run_nuclearity(const ExperimentConfig& cfg) {
  using detail_h::fmt;
  RunReport rep = detail_h::init_report(cfg, "nuclearity");
  const std::vector<double> grid = cfg.grid.points();

  std::vector<TestFunction> fns;
  for (double w : cfg.family_widths)
    fns.push_back(detail_h::gauss_fn(cfg.dims, Domain::Spacetime, w));

  ThetaOptions topt;
  topt.quad = cfg.quad;
  topt.p_list = cfg.p_list;

  // --- free factor: p-norms stay bounded along the orbit
  {
    GeneratorFamily gen = make_generator_family(
        detail_h::make_free_factor(cfg), fns, cfg.region_radius);
    const int nl = static_cast<int>(grid.size());
    std::vector<NuclearitySpectrum> specs(nl);
    std::vector<std::string> errs(nl);
    detail_h::parallel_for(nl, cfg.threads, [&](int il) {
      auto e = detail_h::guarded([&] {
        specs[il] = theta_spectrum(gen, grid[il], cfg.beta, topt);
      });
      if (e) errs[il] = *e;
    });
    Table t;
    t.name = "free_theta";
    t.header = {"lam", "top"};
    for (double p : cfg.p_list) t.header.push_back("pnorm_" + fmt(p));
    t.header.push_back("trunc_rank");
    bool cell_err = false;
    for (int il = 0; il < nl; ++il)
      if (!errs[il].empty()) {
        cell_err = true;
        rep.cell_errors.push_back("free_theta[" + fmt(grid[il]) +
                                  "]: " + errs[il]);
      }
    bool pass = !cell_err;
    double worst = 0;
    if (!cell_err) {
      for (int il = 0; il < nl; ++il) {
        std::vector<std::string> row{fmt(grid[il]),
                                     fmt(specs[il].sv.size()
                                             ? specs[il].sv[0]
                                             : 0.0)};
        for (double p : cfg.p_list) {
          double ratio = specs[il].p_norms.at(p) / specs[0].p_norms.at(p);
          worst = std::max(worst, ratio);
          pass = pass && ratio <= 2.0;
          row.push_back(fmt(specs[il].p_norms.at(p)));
        }
        row.push_back(
            fmt(truncation_rank(specs[il], cfg.tail_tol, cfg.tail_q)));
        t.rows.push_back(std::move(row));
      }
    }
    rep.tables.push_back(std::move(t));
    rep.claims.push_back({"free-p-norm-bounded", "nuclearity", pass, true,
                          cell_err,
                          "max p-norm ratio vs lam=1 is " + fmt(worst) +
                              " (tol 2)"});
  }

  // --- damped factor: top value collapses along the orbit
  {
    GeneratorFamily gen = make_generator_family(
        detail_h::make_damped_factor(cfg), fns, cfg.region_radius);
    SpectrumDecayReport dec;
    auto e = detail_h::guarded([&] {
      dec = damped_spectrum_decay(gen, cfg.decay_grid, cfg.beta, topt);
    });
    Table t;
    t.name = "damped_theta";
    t.header = {"lam", "n_box", "top"};
    for (double p : cfg.p_list) t.header.push_back("pnorm_" + fmt(p));
    t.header.push_back("floor_hits");
    bool pass = false, cell_err = false;
    std::string details;
    if (e) {
      cell_err = true;
      rep.cell_errors.push_back("damped_theta: " + *e);
      details = *e;
    } else {
      for (const auto& r : dec.rows) {
        std::vector<std::string> row{fmt(r.lam), fmt(r.n_box), fmt(r.top)};
        for (double p : cfg.p_list) row.push_back(fmt(r.p_norms.at(p)));
        row.push_back(fmt(r.floor_hits));
        t.rows.push_back(std::move(row));
      }
      std::size_t i0 = detail_h::find_scale(cfg.decay_grid, cfg.lambda0);
      std::size_t i2 =
          detail_h::find_scale(cfg.decay_grid, cfg.lambda0 / 100.0);
      double drop = dec.rows[i2].top / dec.rows[i0].top;
      pass = dec.decade_decreasing && drop < 0.1 && dec.beta_monotone;
      details = "two-decade top ratio " + fmt(drop) +
                " (tol 1e-01), decade steps strictly decreasing, hotter "
                "damping smaller: " +
                (dec.beta_monotone ? "yes" : "no");
    }
    rep.tables.push_back(std::move(t));
    rep.claims.push_back(
        {"damped-top-decay", "nuclearity", pass, true, cell_err, details});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// experiment: charge-energy

inline RunReport run_charge_energy(const ExperimentConfig& cfg) {
  using detail_h::fmt;
  RunReport rep = detail_h::init_report(cfg, "charge-energy");
  const std::vector<double> grid = cfg.grid.points();
  TestFunction probe =
      detail_h::gauss_fn(cfg.dims, Domain::Spacetime, cfg.local_width);

  // --- free factors: lam * <H> stays within a fixed band
  {
    const int nm = static_cast<int>(cfg.energy_masses.size());
    std::vector<ChargeEnergyTable> tabs(nm);
    std::vector<std::string> errs(nm);
    detail_h::parallel_for(nm, cfg.threads, [&](int im) {
      auto e = detail_h::guarded([&] {
        FreeMultipletFactor F = detail_h::make_singleton_factor(
            cfg.dims, cfg.energy_masses[im]);
        tabs[im] = charge_energy_diagnostic(F, 0, probe, grid, cfg.quad);
      });
      if (e) errs[im] = *e;
    });
    Table t;
    t.name = "energy_free";
    t.header = {"lam", "mass", "H", "lamH"};
    bool cell_err = false, pass = true;
    double worst = 0;
    for (int im = 0; im < nm; ++im) {
      if (!errs[im].empty()) {
        cell_err = true;
        rep.cell_errors.push_back("energy_free[" +
                                  fmt(cfg.energy_masses[im]) +
                                  "]: " + errs[im]);
        continue;
      }
      double lo = std::numeric_limits<double>::infinity(), hi = 0;
      for (const auto& r : tabs[im].rows) {
        lo = std::min(lo, r.lamH);
        hi = std::max(hi, r.lamH);
        t.rows.push_back({fmt(r.lam), fmt(cfg.energy_masses[im]), fmt(r.H),
                          fmt(r.lamH)});
      }
      worst = std::max(worst, hi / lo);
      pass = pass && hi / lo < 1.5;
    }
    rep.tables.push_back(std::move(t));
    rep.claims.push_back({"free-energy-bounded", "charge-energy",
                          pass && !cell_err, false, cell_err,
                          "max spread of lam*<H> is " + fmt(worst) +
                              " (tol 1.5)"});
  }

  // --- damped factor: lam * <H> grows without bound along the orbit
  {
    DampedFactor F = detail_h::make_damped_factor(cfg);
    ChargeEnergyTable tab;
    auto e = detail_h::guarded(
        [&] { tab = charge_energy_diagnostic(F, 0, probe, grid, cfg.quad); });
    Table t;
    t.name = "energy_damped";
    t.header = {"lam", "n_box", "H", "lamH"};
    bool pass = false, cell_err = false;
    std::string details;
    if (e) {
      cell_err = true;
      rep.cell_errors.push_back("energy_damped: " + *e);
      details = *e;
    } else {
      for (const auto& r : tab.rows)
        t.rows.push_back({fmt(r.lam), fmt(r.n_box), fmt(r.H), fmt(r.lamH)});
      std::size_t i0 = detail_h::find_scale(grid, cfg.lambda0);
      std::size_t i2 = detail_h::find_scale(grid, cfg.lambda0 / 100.0);
      double growth = tab.rows[i2].lamH / tab.rows[i0].lamH;
      pass = growth > 10.0;
      details = "two-decade growth of lam*<H> is " + fmt(growth) +
                " (needs > 10)";
    }
    rep.tables.push_back(std::move(t));
    rep.claims.push_back({"damped-energy-growth", "charge-energy", pass,
                          false, cell_err, details});
  }

  // --- preservation proxy distances
  {
    DampedFactor F = detail_h::make_damped_factor(cfg);
    NSchedule sched = detail_h::make_schedule(cfg.schedule_name, cfg.lambda0);
    CandidateOrbit own{probe, [sched](double l) { return sched(l); },
                       std::nullopt};
    CandidateOrbit fixed{probe, [](double) { return 0; }, std::nullopt};
    PreservationProxy p_own, p_fixed;
    auto e = detail_h::guarded([&] {
      p_own = preservation_proxy(F, 0, probe, own, cfg.proxy_grid, cfg.quad);
      p_fixed =
          preservation_proxy(F, 0, probe, fixed, cfg.proxy_grid, cfg.quad);
    });
    Table t;
    t.name = "proxy";
    t.header = {"lam", "dist_own", "dist_fixed"};
    bool pass_own = false, pass_fixed = false, cell_err = false;
    std::string details;
    if (e) {
      cell_err = true;
      rep.cell_errors.push_back("proxy: " + *e);
      details = *e;
    } else {
      double own_max = 0;
      for (std::size_t i = 0; i < p_own.lam.size(); ++i) {
        own_max = std::max(own_max, p_own.distance[i]);
        t.rows.push_back({fmt(p_own.lam[i]), fmt(p_own.distance[i]),
                          fmt(p_fixed.distance[i])});
      }
      pass_own = own_max < 1e-10;
      pass_fixed = p_fixed.distance.back() > 0.9;
      details = "own-family max distance " + fmt(own_max) +
                " (tol 1e-10); fixed-orbit distance at the smallest scale " +
                fmt(p_fixed.distance.back()) + " (needs > 0.9)";
    }
    rep.tables.push_back(std::move(t));
    rep.claims.push_back({"proxy-family-distances", "charge-energy",
                          pass_own && pass_fixed, true, cell_err, details});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// experiment: sectors

inline RunReport run_sectors(const ExperimentConfig& cfg) {
  using detail_h::fmt;
  RunReport rep = detail_h::init_report(cfg, "sectors");
  for (const auto& sc : cfg.sector_cases) {
    auto e = detail_h::guarded([&] {
      if (sc.torus_order > 0) {
        sectors::TorusGroup T{1};
        sectors::TorusSubgroup N{{sc.torus_order}};
        auto tab = sectors::torus_sector_table(T, N, sc.box);
        Table t;
        t.name = "sectors_" + sc.name;
        t.header = {"irrep", "k", "trivial_on_N", "preserved"};
        std::vector<long long> kept;
        for (const auto& r : tab.rows) {
          t.rows.push_back({r.irrep, fmt(r.k[0]),
                            r.trivial_on_N ? "1" : "0",
                            r.preserved ? "1" : "0"});
          if (r.preserved) kept.push_back(r.k[0]);
        }
        rep.tables.push_back(std::move(t));
        bool pass = sc.expected_weights.empty() || kept == sc.expected_weights;
        if (sc.expected_preserved >= 0)
          pass = pass && tab.preserved_count == sc.expected_preserved;
        std::string kept_str;
        for (long long k : kept)
          kept_str += (kept_str.empty() ? "" : " ") + std::to_string(k);
        rep.claims.push_back({"sectors/" + sc.name, "sectors", pass, false,
                              false,
                              "preserved weights {" + kept_str + "}"});
      } else {
        auto G = detail_h::make_group(sc.group);
        auto reps = sectors::irreps(*G);
        std::vector<int> N =
            sc.normal_is_center ? G->center() : sc.normal;
        N = G->generated_subgroup(N);
        std::vector<int> delta;
        for (std::size_t i = 0; i < reps.size(); ++i)
          delta.push_back(static_cast<int>(i));
        auto tab = sectors::sector_table(*G, reps, N, delta);
        auto Q = sectors::quotient(*G, N);
        auto qreps = sectors::irreps(Q.group);
        Table t;
        t.name = "sectors_" + sc.name;
        t.header = {"irrep", "dim", "trivial_on_N", "preserved",
                    "assignment"};
        for (const auto& r : tab.rows)
          t.rows.push_back({r.irrep, fmt(r.dim), r.trivial_on_N ? "1" : "0",
                            r.preserved ? "1" : "0", fmt(r.assignment)});
        rep.tables.push_back(std::move(t));
        bool pass =
            tab.preserved_count == static_cast<int>(qreps.size());
        if (sc.expected_preserved >= 0)
          pass = pass && tab.preserved_count == sc.expected_preserved;
        rep.claims.push_back(
            {"sectors/" + sc.name, "sectors", pass, false, false,
             "preserved " + fmt(tab.preserved_count) + " of " +
                 fmt(static_cast<int>(reps.size())) +
                 "; quotient has " + fmt(static_cast<int>(qreps.size())) +
                 " classes of sectors"});
      }
    });
    if (e) {
      rep.cell_errors.push_back("sectors[" + sc.name + "]: " + *e);
      rep.claims.push_back(
          {"sectors/" + sc.name, "sectors", false, false, true, *e});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// experiment: appendix (finite-rank calculus)

inline RunReport run_appendix(const ExperimentConfig& cfg) {
  using detail_h::fmt;
  using namespace nuclearity;
  RunReport rep = detail_h::init_report(cfg, "appendix");

  // --- exponent windows
  {
    auto e = detail_h::guarded([&] {
      ExponentWindows w = exponent_windows(cfg.window_p);
      Table t;
      t.name = "windows";
      t.header = {"window", "admissible", "q_min"};
      auto row = [&](const char* name, const WindowStatus& s) {
        t.rows.push_back({name, s.admissible ? "1" : "0",
                          s.admissible ? fmt(s.q_min) : "nan"});
      };
      row("limit_maps", w.limit_maps);
      row("damped_tail", w.damped_tail);
      row("charged_tail", w.charged_tail);
      row("orthonormalization", w.orthonormalization);
      row("content_premise", w.content_premise);
      rep.tables.push_back(std::move(t));
      bool pass = true;
      // each admissible window must be a nonempty subinterval of (0, 1]
      for (const WindowStatus* s :
           {&w.limit_maps, &w.damped_tail, &w.charged_tail,
            &w.orthonormalization, &w.content_premise})
        if (s->admissible) pass = pass && s->q_min >= 0 && s->q_min < 1;
      rep.claims.push_back({"exponent-windows", "appendix", pass, false,
                            false,
                            "p = " + fmt(cfg.window_p) +
                                ": admissible windows are nonempty"});
    });
    if (e) {
      rep.cell_errors.push_back("windows: " + *e);
      rep.claims.push_back(
          {"exponent-windows", "appendix", false, false, true, *e});
    }
  }

  // --- epsilon content of a rank-one contraction
  {
    auto e = detail_h::guarded([&] {
      Eigen::VectorXd one(1);
      one << 1.0;
      auto T = FiniteRankMap::hilbert(1, 1, {{one, one}});
      auto exact = eps_content(T, cfg.content_eps);
      auto greedy =
          eps_content(T, cfg.content_eps, ContentMethod::GreedyPacking);
      long long expected = 1;
      while (double(expected) * cfg.content_eps < 2.0) ++expected;
      bool pass = exact.exact && exact.value == expected &&
                  greedy.value <= exact.value;
      Table t;
      t.name = "content";
      t.header = {"eps", "exact", "greedy_lower_bound"};
      t.rows.push_back(
          {fmt(cfg.content_eps), fmt(exact.value), fmt(greedy.value)});
      rep.tables.push_back(std::move(t));
      rep.claims.push_back({"content-rank-one", "appendix", pass, false,
                            false,
                            "packing count " + fmt(exact.value) +
                                " (expected " + fmt(expected) +
                                "), greedy bound " + fmt(greedy.value)});
    });
    if (e) {
      rep.cell_errors.push_back("content: " + *e);
      rep.claims.push_back(
          {"content-rank-one", "appendix", false, false, true, *e});
    }
  }

  // --- seeded re-orthonormalization stability
  {
    auto e = detail_h::guarded([&] {
      std::mt19937_64 rng(
          scalelab::detail::derive_seed(cfg.master_seed, "appendix-ortho"));
      std::normal_distribution<double> gauss(0.0, 1.0);
      double worst_rec = 0, worst_orth = 0;
      for (int k = 0; k < cfg.ortho_maps; ++k) {
        int dd = 2 + static_cast<int>(rng() % 7);
        int dt = 2 + static_cast<int>(rng() % 7);
        int terms = 1 + static_cast<int>(rng() % 6);
        std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> fy;
        for (int s = 0; s < terms; ++s) {
          Eigen::VectorXd f(dd), y(dt);
          for (int i = 0; i < dd; ++i) f[i] = gauss(rng);
          for (int i = 0; i < dt; ++i) y[i] = gauss(rng);
          fy.push_back({f, y});
        }
        if (k % 3 == 0 && !fy.empty())  // force a dependent target
          fy.push_back({fy.front().first.reverse().eval(),
                        (0.5 * fy.front().second).eval()});
        auto T = FiniteRankMap::hilbert(dd, dt, fy);
        double q = 0.3 + 0.7 * double(k % 8) / 7.0;
        auto dec = orthonormalize_decomposition(T, q);
        worst_rec = std::max(worst_rec, reconstruction_defect(T, dec));
        for (std::size_t a = 0; a < dec.xi.size(); ++a)
          for (std::size_t b = 0; b <= a; ++b) {
            double want = a == b ? 1.0 : 0.0;
            worst_orth = std::max(
                worst_orth, std::abs(dec.xi[a].dot(dec.xi[b]) - want));
          }
      }
      bool pass = worst_rec < 1e-9 && worst_orth < 1e-10;
      rep.claims.push_back({"orthonormalize-stability", "appendix", pass,
                            false, false,
                            fmt(cfg.ortho_maps) + " maps: max reconstruction " +
                                fmt(worst_rec) +
                                " (tol 1e-09), max orthonormality defect " +
                                fmt(worst_orth) + " (tol 1e-10)"});
    });
    if (e) {
      rep.cell_errors.push_back("orthonormalize: " + *e);
      rep.claims.push_back(
          {"orthonormalize-stability", "appendix", false, false, true, *e});
    }
  }

  // --- tensor multiplicativity of the p-norm
  {
    auto e = detail_h::guarded([&] {
      std::mt19937_64 rng(
          scalelab::detail::derive_seed(cfg.master_seed, "appendix-tensor"));
      std::normal_distribution<double> gauss(0.0, 1.0);
      double worst = 0;
      for (int k = 0; k < cfg.tensor_pairs; ++k) {
        auto rand_map = [&](int dd, int dt) {
          std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> fy;
          int terms = 1 + static_cast<int>(rng() % 3);
          for (int s = 0; s < terms; ++s) {
            Eigen::VectorXd f(dd), y(dt);
            for (int i = 0; i < dd; ++i) f[i] = gauss(rng);
            for (int i = 0; i < dt; ++i) y[i] = gauss(rng);
            fy.push_back({f, y});
          }
          return FiniteRankMap::hilbert(dd, dt, fy);
        };
        auto A = rand_map(2 + int(rng() % 3), 2 + int(rng() % 3));
        auto B = rand_map(2 + int(rng() % 3), 2 + int(rng() % 3));
        auto AB = tensor_product(A, B);
        for (double p : {0.5, 1.0}) {
          double lhs = p_nuclear_norm(AB, p).best();
          double rhs =
              p_nuclear_norm(A, p).best() * p_nuclear_norm(B, p).best();
          worst = std::max(worst,
                           std::abs(lhs - rhs) / std::max(1.0, rhs));
        }
      }
      bool pass = worst < 1e-10;
      rep.claims.push_back({"tensor-multiplicativity", "appendix", pass,
                            false, false,
                            fmt(cfg.tensor_pairs) +
                                " pairs: max deviation " + fmt(worst) +
                                " (tol 1e-10)"});
    });
    if (e) {
      rep.cell_errors.push_back("tensor: " + *e);
      rep.claims.push_back(
          {"tensor-multiplicativity", "appendix", false, false, true, *e});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// dispatch and output

inline RunReport run_all(const ExperimentConfig& cfg) {
  RunReport rep = detail_h::init_report(cfg, "all");
  rep.merge(run_scaling_limit(cfg));
  rep.merge(run_nuclearity(cfg));
  rep.merge(run_charge_energy(cfg));
  rep.merge(run_sectors(cfg));
  rep.merge(run_appendix(cfg));
  return rep;
}

inline RunReport run_subcommand(const std::string& name,
                                const ExperimentConfig& cfg) {
  if (name == "scaling-limit") return run_scaling_limit(cfg);
  if (name == "nuclearity") return run_nuclearity(cfg);
  if (name == "charge-energy") return run_charge_energy(cfg);
  if (name == "sectors") return run_sectors(cfg);
  if (name == "appendix") return run_appendix(cfg);
  if (name == "all") return run_all(cfg);
  throw ConfigError("unknown experiment: " + name);
}

inline void emit(const RunReport& rep, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::path root(out_dir);
  fs::create_directories(root / "tables");
  {
    std::ofstream out(root / "report.json", std::ios::binary);
    if (!out) throw Error("cannot write " + (root / "report.json").string());
    out << rep.to_json().dump(2) << '\n';
  }
  for (const auto& t : rep.tables) {
    std::ofstream csv(root / "tables" / (t.name + ".csv"), std::ios::binary);
    if (!csv) throw Error("cannot write table " + t.name);
    for (std::size_t i = 0; i < t.header.size(); ++i)
      csv << (i ? "," : "") << t.header[i];
    csv << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        csv << (i ? "," : "") << row[i];
      csv << '\n';
    }
  }
}

}  // namespace scalelab::harness
