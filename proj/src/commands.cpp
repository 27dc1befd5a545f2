#include "g2flow/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "g2flow/acceptance.hpp"
#include "g2flow/errors.hpp"
#include "g2flow/report.hpp"
#include "g2flow/seeds.hpp"
#include "g2flow/shooter.hpp"

namespace g2flow {

namespace {

using nlohmann::json;

const std::vector<std::string> kFamilies = {"b7", "d7", "kmn", "k11", "cs", "cone", "ac"};

std::string norm_key(std::string k) {
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

json num_or_auto(double v) { return std::isnan(v) ? json("auto") : json(v); }

double read_num_or_auto(const json& v, const std::string& key) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "auto") return std::nan("");
    try {
      std::size_t pos = 0;
      const double d = std::stod(s, &pos);
      if (pos == s.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': expected a number or \"auto\", got \"" + s + "\"");
  }
  if (v.is_null()) return std::nan("");
  if (!v.is_number()) throw ConfigError("key '" + key + "': expected a number");
  return v.get<double>();
}

double read_num(const json& v, const std::string& key) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      std::size_t pos = 0;
      const double d = std::stod(s, &pos);
      if (pos == s.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': expected a number, got \"" + s + "\"");
  }
  if (!v.is_number()) throw ConfigError("key '" + key + "': expected a number");
  return v.get<double>();
}

int read_int(const json& v, const std::string& key) {
  const double d = read_num(v, key);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("key '" + key + "': expected an integer");
  return int(d);
}

bool read_bool(const json& v, const std::string& key) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
  }
  if (v.is_number_integer()) return v.get<int>() != 0;
  throw ConfigError("key '" + key + "': expected a boolean");
}

template <class T, class F>
std::vector<T> read_list(const json& v, const std::string& key, F conv) {
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(conv(e, key));
  } else if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(conv(json(tok), key));
  } else {
    out.push_back(conv(v, key));
  }
  return out;
}

double cube(double v) { return v * v * v; }

FullState cone_state(double t) {
  FullState s;
  const double a = kConeC * cube(t), d = 3 * kConeC * t * t;
  s.y = {a, a, a};
  s.x = {d * d, d * d, d * d};
  return s;
}

ChamberSet flags_at(const TrajectorySample& s, const ModelParams& mp, double cushion) {
  try {
    return chamber_membership(to_arc_length(s.state, mp), mp, cushion);
  } catch (const Error&) {
    return {};
  }
}

// First sample at which each chamber holds, as log entries.
json chamber_entries(const Trajectory& tr, double cushion) {
  json out = json::array();
  bool seen[4] = {false, false, false, false};
  const Chamber order[4] = {Chamber::alc_chamber, Chamber::alc_strict, Chamber::death_quadrant,
                            Chamber::ac_backward};
  for (const auto& s : tr.samples) {
    const ChamberSet ch = flags_at(s, tr.params, cushion);
    for (int i = 0; i < 4; ++i) {
      if (!seen[i] && ch.contains(order[i])) {
        seen[i] = true;
        out.push_back({{"kind", std::string("enters_") + to_string(order[i])},
                       {"param", s.param},
                       {"t", s.t},
                       {"a", s.state.a},
                       {"b", s.state.b}});
      }
    }
  }
  return out;
}

std::string join_path(const std::string& dir, const std::string& file) {
  if (dir.empty()) return file;
  return dir.back() == '/' ? dir + file : dir + "/" + file;
}

std::string csv_of(const Trajectory& tr, double cushion) {
  std::ostringstream os;
  write_trajectory_csv(os, tr, cushion);
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void RunConfig::validate() const {
  if (std::find(kFamilies.begin(), kFamilies.end(), family) == kFamilies.end())
    throw ConfigError("unknown family '" + family + "' (b7, d7, kmn, k11, cs, cone, ac)");
  for (auto [name, v] : {std::pair{"rtol", rtol}, {"atol", atol}, {"event_tol", event_tol},
                         {"cushion", cushion}, {"t_max", t_max}, {"c_tol", c_tol},
                         {"beta_tol", beta_tol}})
    if (!(v > 0)) throw ConfigError(std::string(name) + " must be > 0");
  if (!(r0 > 0)) throw ConstraintError("r0 must be positive");
  if (t_switch < 0 || T_switch < 0 || t0 < 0 || t1 < 0) throw ConfigError("switch and end times must be >= 0");
  if (!(k > 1 && k < 2)) throw ConfigError("k must lie in (1, 2)");
  if (m <= 0 || n <= 0) throw ConstraintError("m, n must be positive integers");
  if (std::gcd(m, n) != 1) throw ConstraintError("m and n must be coprime");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (count < 0) throw ConfigError("count must be >= 0");
  if (family == "kmn" || family == "k11")
    if (!(beta > 0)) throw ConstraintError("beta must be positive");
  if (family == "k11" && !(std::abs(alpha) < 1)) throw ConstraintError("|alpha| must be < 1");
  if (family == "b7" || family == "d7") {
    if (std::isnan(alpha3)) throw ConfigError("alpha3 is required for " + family);
    if (std::isnan(alpha1) && !std::isnan(alpha2)) throw ConfigError("alpha2 given without alpha1");
  }
  for (int id : only)
    if (id < 1 || id > 12) throw ConfigError("only: criterion ids are 1..12");
}

json RunConfig::to_json() const {
  return {{"family", family},
          {"m", m},
          {"n", n},
          {"r0", r0},
          {"alpha1", num_or_auto(alpha1)},
          {"alpha2", num_or_auto(alpha2)},
          {"alpha3", num_or_auto(alpha3)},
          {"alpha", alpha},
          {"beta", beta},
          {"c", c},
          {"p", num_or_auto(p)},
          {"q", num_or_auto(q)},
          {"t0", t0},
          {"t1", t1},
          {"t_switch", t_switch},
          {"T_switch", T_switch},
          {"rtol", rtol},
          {"atol", atol},
          {"event_tol", event_tol},
          {"cushion", cushion},
          {"t_max", t_max},
          {"confirm_blowup", confirm_blowup},
          {"k", k},
          {"c_tol", c_tol},
          {"beta_tol", beta_tol},
          {"sweep_param", sweep_param},
          {"values", values},
          {"from", from},
          {"to", to},
          {"count", count},
          {"threads", threads},
          {"out", out},
          {"seed", seed},
          {"quick", quick},
          {"only", only}};
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  for (const auto& [raw, v] : j.items()) {
    const std::string key = norm_key(raw);
    if (key == "family") c.family = v.get<std::string>();
    else if (key == "m") c.m = read_int(v, key);
    else if (key == "n") c.n = read_int(v, key);
    else if (key == "r0") c.r0 = read_num(v, key);
    else if (key == "alpha1") c.alpha1 = read_num_or_auto(v, key);
    else if (key == "alpha2") c.alpha2 = read_num_or_auto(v, key);
    else if (key == "alpha3") c.alpha3 = read_num_or_auto(v, key);
    else if (key == "alpha") c.alpha = read_num(v, key);
    else if (key == "beta") c.beta = read_num(v, key);
    else if (key == "c") c.c = read_num(v, key);
    else if (key == "p") c.p = read_num_or_auto(v, key);
    else if (key == "q") c.q = read_num_or_auto(v, key);
    else if (key == "t0") c.t0 = read_num(v, key);
    else if (key == "t1") c.t1 = read_num(v, key);
    else if (key == "t_switch") c.t_switch = read_num(v, key);
    else if (key == "T_switch") c.T_switch = read_num(v, key);
    else if (key == "rtol") c.rtol = read_num(v, key);
    else if (key == "atol") c.atol = read_num(v, key);
    else if (key == "event_tol") c.event_tol = read_num(v, key);
    else if (key == "cushion") c.cushion = read_num(v, key);
    else if (key == "t_max") c.t_max = read_num(v, key);
    else if (key == "confirm_blowup") c.confirm_blowup = read_bool(v, key);
    else if (key == "k") c.k = read_num(v, key);
    else if (key == "c_tol") c.c_tol = read_num(v, key);
    else if (key == "beta_tol") c.beta_tol = read_num(v, key);
    else if (key == "sweep_param") c.sweep_param = v.get<std::string>();
    else if (key == "values") c.values = read_list<double>(v, key, read_num);
    else if (key == "from") c.from = read_num(v, key);
    else if (key == "to") c.to = read_num(v, key);
    else if (key == "count") c.count = read_int(v, key);
    else if (key == "threads") c.threads = read_int(v, key);
    else if (key == "out") c.out = v.get<std::string>();
    else if (key == "seed") {
      const double d = read_num(v, key);
      if (d < 0 || d != std::floor(d)) throw ConfigError("seed must be a non-negative integer");
      c.seed = std::uint64_t(d);
    } else if (key == "quick") c.quick = read_bool(v, key);
    else if (key == "only") c.only = read_list<int>(v, key, read_int);
    else throw ConfigError("unknown configuration key '" + raw + "'");
  }
  c.validate();
  return c;
}

std::string RunConfig::hash() const { return fnv1a_hex(to_json().dump()); }

IntegratorOptions RunConfig::integrator() const {
  IntegratorOptions o;
  o.rtol = rtol;
  o.atol = atol;
  o.event_tol = event_tol;
  return o;
}

ClassifyOptions RunConfig::classify_options() const {
  ClassifyOptions o;
  o.t_max = t_max;
  o.cushion = cushion;
  o.confirm_blowup = confirm_blowup;
  o.integ = integrator();
  return o;
}

json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

RunConfig merge_config(const json& file, const json& overrides) {
  json merged = json::object();
  for (const json* src : {&file, &overrides}) {
    if (src->is_null()) continue;
    if (!src->is_object()) throw ConfigError("configuration must be a JSON object");
    for (const auto& [k, v] : src->items()) merged[norm_key(k)] = v;
  }
  try {
    return RunConfig::from_json(merged);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration: ") + e.what());
  }
}

namespace {

// Topology only; the ODE does not see it.
std::string orbit_quotient(int m, int n) { return "Z_" + std::to_string(2 * (m + n)); }

}  // namespace

SeedBuild build_seed(const RunConfig& cfg) {
  cfg.validate();
  SeedBuild sb;
  const double ts = cfg.t_switch;
  auto full_seed = [&](const FullSeedResult& r, bool symmetric) {
    sb.params = r.params;
    sb.full = r.state;
    sb.t = r.t;
    sb.u1 = symmetric;
    if (symmetric) sb.state = restrict_to_u1(r.state);
    sb.info = {{"t_switch", r.t}, {"hamiltonian", r.hamiltonian},
               {"truncation_order", r.series.truncation_order}};
  };
  if (cfg.family == "b7" || cfg.family == "d7") {
    const bool b7 = cfg.family == "b7";
    Vec3 al{cfg.alpha1, cfg.alpha2, cfg.alpha3};
    if (std::isnan(al[0])) {
      al[0] = b7 ? 0.5 * (1.0 / (64 * cfg.r0) - al[2]) : 1.0 / std::sqrt(al[2]);
      al[1] = al[0];
    } else if (std::isnan(al[1])) {
      al[1] = al[0];
    }
    const FullSeedResult r = b7 ? seed_delta_su2(cfg.r0, al, ts) : seed_su2_factor(cfg.r0, al, ts);
    full_seed(r, al[0] == al[1]);
    sb.info["alpha"] = {al[0], al[1], al[2]};
  } else if (cfg.family == "k11") {
    full_seed(seed_k11(cfg.r0, cfg.alpha, cfg.beta, ts), cfg.alpha == 0.0);
  } else if (cfg.family == "kmn") {
    const U1SeedResult r = seed_kmn(cfg.m, cfg.n, cfg.r0, cfg.beta, ts);
    sb.params = r.params;
    sb.state = r.state;
    sb.full = embed(r.state);
    sb.t = r.t;
    sb.info = {{"t_switch", r.t}, {"hamiltonian", r.hamiltonian}, {"tail", r.tail},
               {"principal_orbit_quotient", orbit_quotient(cfg.m, cfg.n)}};
  } else if (cfg.family == "cs") {
    const U1SeedResult r = seed_cs_end(cfg.c, ts > 0 ? ts : 0.1);
    sb.params = r.params;
    sb.state = r.state;
    sb.full = embed(r.state);
    sb.t = r.t;
    sb.info = {{"t_switch", r.t}, {"hamiltonian", r.hamiltonian}, {"tail", r.tail}};
  } else if (cfg.family == "cone") {
    sb.params = ModelParams::plain(0, 0);
    sb.t = cfg.t0 > 0 ? cfg.t0 : 1.0;
    sb.full = cone_state(sb.t);
    sb.state = restrict_to_u1(sb.full);
    sb.info = {{"t0", sb.t}};
  } else {  // ac
    ModelParams mp = ModelParams::kmn(cfg.m, cfg.n, cfg.r0);
    if (!std::isnan(cfg.p) || !std::isnan(cfg.q))
      mp = ModelParams::plain(std::isnan(cfg.p) ? 0.0 : cfg.p, std::isnan(cfg.q) ? 0.0 : cfg.q);
    const double T = cfg.T_switch > 0 ? cfg.T_switch : ac_T_switch(mp, cfg.c);
    const U1SeedResult r = seed_ac_end(mp, cfg.c, T);
    sb.params = mp;
    sb.state = r.state;
    sb.full = embed(r.state);
    sb.t = r.t;
    sb.info = {{"T_switch", r.t}, {"hamiltonian", r.hamiltonian}, {"tail", r.tail}};
  }
  return sb;
}

std::vector<double> sweep_values(const RunConfig& cfg) {
  if (!cfg.values.empty()) return cfg.values;
  if (cfg.count <= 0) throw ConfigError("sweep needs values or from/to/count");
  std::vector<double> v;
  const bool geometric = cfg.from > 0 && cfg.to > 0;
  for (int i = 0; i < cfg.count; ++i) {
    const double u = cfg.count == 1 ? 0.0 : double(i) / (cfg.count - 1);
    v.push_back(geometric ? cfg.from * std::pow(cfg.to / cfg.from, u) : cfg.from + u * (cfg.to - cfg.from));
  }
  return v;
}

RunConfig with_sweep_value(const RunConfig& cfg, double v) {
  RunConfig c = cfg;
  const std::string& k = cfg.sweep_param;
  if (k == "beta") c.beta = v;
  else if (k == "c") c.c = v;
  else if (k == "alpha") c.alpha = v;
  else if (k == "alpha3") c.alpha3 = v;
  else if (k == "r0") c.r0 = v;
  else throw ConfigError("sweep_param must be one of beta, c, alpha, alpha3, r0");
  return c;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto t_start = std::chrono::steady_clock::now();
  const SeedBuild sb = build_seed(cfg);
  const double t_end = cfg.t1 > 0 ? cfg.t1 : 1000 * std::cbrt(sb.params.scale());
  if (!(t_end > sb.t)) throw ConfigError("t1 must exceed the seed time " + fmt17(sb.t));
  Budget budget;
  budget.span = t_end - sb.t;
  json manifest{{"command", "solve"}, {"config", cfg.to_json()}, {"config_hash", cfg.hash()},
                {"seed", sb.info}, {"t_start", sb.t}, {"t_end_requested", t_end}};
  const std::string csv_path = join_path(cfg.out, "trajectory.csv");
  if (sb.u1) {
    const Trajectory tr = integrate(arc_seed(sb.state, sb.t), sb.params,
                                    {StopEvent::f_vanishes(), StopEvent::blow_up()}, budget,
                                    cfg.integrator());
    write_text_file(csv_path, csv_of(tr, cfg.cushion));
    json ev = events_to_json(tr);
    for (const auto& e : chamber_entries(tr, cfg.cushion)) ev.push_back(e);
    std::stable_sort(ev.begin(), ev.end(),
                     [](const json& x, const json& y) { return x["t"].get<double>() < y["t"].get<double>(); });
    manifest["events"] = ev;
    const auto term = tr.terminal_event();
    manifest["terminal_event"] = term ? json(to_string(*term)) : json(nullptr);
    manifest["samples"] = tr.samples.size();
    manifest["relative_h_drift"] = tr.relative_h_drift();
    manifest["system"] = "u1";
    out << "solve: " << tr.samples.size() << " samples to t = " << fmt17(tr.back().t)
        << (term ? std::string(", stopped by ") + to_string(*term) : std::string()) << "\n";
  } else {
    const FullTrajectory tr = integrate_full(sb.full, sb.t, sb.params,
                                             {StopEvent::f_vanishes(), StopEvent::blow_up()},
                                             budget, cfg.integrator());
    std::ostringstream os;
    write_full_trajectory_csv(os, tr);
    write_text_file(csv_path, os.str());
    json ev = json::array();
    for (const auto& [k, t] : tr.events) ev.push_back({{"kind", to_string(k)}, {"t", t}});
    manifest["events"] = ev;
    manifest["samples"] = tr.samples.size();
    manifest["system"] = "full";
    out << "solve: " << tr.samples.size() << " samples (full system) to t = "
        << fmt17(tr.samples.back().t) << "\n";
  }
  manifest["outputs"] = {csv_path};
  manifest["wall_time_s"] = seconds_since(t_start);
  write_json_file(join_path(cfg.out, "manifest.json"), manifest);
  return kOk;
}

namespace {

Verdict classify_seed(const SeedBuild& sb, const ClassifyOptions& opt, Trajectory* keep = nullptr) {
  if (!sb.u1) {
    Verdict v;
    v.kind = VerdictKind::Indeterminate;
    v.reason = "not U(1)-symmetric: no classification criteria for the full system";
    return v;
  }
  ClassifyOptions o = opt;
  o.keep_trajectory = keep != nullptr;
  Classification c = classify(sb.state, sb.t, sb.params, o);
  if (keep) *keep = std::move(c.trajectory);
  return c.verdict;
}

std::string verdict_line(const Verdict& v) {
  std::ostringstream os;
  os << to_string(v.kind);
  switch (v.kind) {
    case VerdictKind::ALC: os << " ell=" << fmt17(v.ell) << " ell_alt=" << fmt17(v.ell_alt); break;
    case VerdictKind::AC: os << " rate=" << fmt17(v.rate); break;
    default: os << " reason=" << v.reason;
  }
  return os.str();
}

}  // namespace

int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto t_start = std::chrono::steady_clock::now();
  const SeedBuild sb = build_seed(cfg);
  const Verdict v = classify_seed(sb, cfg.classify_options());
  json report{{"command", "classify"}, {"config", cfg.to_json()}, {"config_hash", cfg.hash()},
              {"seed", sb.info},       {"verdict", v.to_json()}};
  report["wall_time_s"] = seconds_since(t_start);
  write_json_file(join_path(cfg.out, "verdict.json"), report);
  out << verdict_line(v) << "\n";
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const std::vector<double> vals = sweep_values(cfg);
  std::vector<RunConfig> cfgs;
  for (double v : vals) cfgs.push_back(with_sweep_value(cfg, v));
  struct Row {
    Verdict v;
    std::string error;
  };
  std::vector<Row> rows(vals.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i; (i = next++) < cfgs.size();) {
      try {
        rows[i].v = classify_seed(build_seed(cfgs[i]), cfgs[i].classify_options());
      } catch (const Error& e) {
        rows[i].error = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads = std::min<unsigned>(cfg.threads > 0 ? unsigned(cfg.threads) : hw,
                                               unsigned(std::max<std::size_t>(1, vals.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << cfg.sweep_param << ",verdict,ell,ell_alt,b_exponent,rate,t_end,reason\n";
  json items = json::array();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Verdict& v = rows[i].v;
    const std::string kind = rows[i].error.empty() ? to_string(v.kind) : "Error";
    const std::string reason = rows[i].error.empty() ? v.reason : rows[i].error;
    std::string quoted = reason;
    std::replace(quoted.begin(), quoted.end(), ',', ';');
    csv << fmt17(vals[i]) << ',' << kind << ',' << fmt17(v.ell) << ',' << fmt17(v.ell_alt) << ','
        << fmt17(v.b_exponent) << ',' << fmt17(v.rate) << ',' << fmt17(v.budget_used) << ','
        << quoted << "\n";
    items.push_back({{"value", vals[i]}, {"verdict", kind}, {"reason", reason}});
    out << cfg.sweep_param << "=" << fmt17(vals[i]) << "  "
        << (rows[i].error.empty() ? verdict_line(v) : "Error " + rows[i].error) << "\n";
  }
  write_text_file(join_path(cfg.out, "sweep.csv"), csv.str());
  write_json_file(join_path(cfg.out, "sweep.json"),
                  {{"command", "sweep"}, {"config", cfg.to_json()}, {"config_hash", cfg.hash()},
                   {"results", items}});
  return kOk;
}

int cmd_find_ac(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto t_start = std::chrono::steady_clock::now();
  BetaShootOptions bo;
  bo.tol = cfg.beta_tol;
  bo.integ = cfg.integrator();
  const ShootResult fb = find_beta_ac(cfg.m, cfg.n, cfg.r0, bo);
  GammaCurve g{cfg.m, cfg.n, cfg.r0, cfg.k};
  AcShootOptions ao;
  ao.tol = cfg.c_tol;
  ao.integ = cfg.integrator();
  const ShootResult fc = find_c_ac(g, ao);
  const double beta_back = fc.closure ? fc.closure->beta : std::nan("");
  const double resid = std::abs(fb.critical_value - beta_back) / fb.critical_value;

  AcShootOptions dense = ao;
  dense.integ.max_step = 0.01 * cube(cfg.r0);
  const BackwardRun crit = extend_ac_backward(g, fc.lo, dense);
  const std::string csv_path = join_path(cfg.out, "critical_ac.csv");
  write_text_file(csv_path, csv_of(crit.traj, cfg.cushion));

  json report{{"command", "find-ac"},
              {"config", cfg.to_json()},
              {"config_hash", cfg.hash()},
              {"beta_ac_forward", fb.critical_value},
              {"c_ac", fc.critical_value},
              {"principal_orbit_quotient", orbit_quotient(cfg.m, cfg.n)},
              {"beta_from_closure", beta_back},
              {"cross_validation_residual", resid},
              {"cross_validated", resid <= 1e-3},
              {"forward", fb.to_json()},
              {"backward", fc.to_json()},
              {"critical_trajectory", csv_path}};
  report["wall_time_s"] = seconds_since(t_start);
  write_json_file(join_path(cfg.out, "find_ac.json"), report);
  out << "beta_ac (forward) = " << fmt17(fb.critical_value) << "\n"
      << "c_ac              = " << fmt17(fc.critical_value) << "\n"
      << "beta (closure)    = " << fmt17(beta_back) << "\n"
      << "relative mismatch = " << fmt17(resid) << "\n";
  return kOk;
}

int cmd_figure1(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const int m = cfg.m, n = cfg.n;
  const double r0 = cfg.r0;
  BetaShootOptions bo;
  bo.tol = cfg.beta_tol;
  bo.integ = cfg.integrator();
  const double beta_ac = find_beta_ac(m, n, r0, bo).critical_value;
  GammaCurve g{m, n, r0, cfg.k};
  AcShootOptions ao;
  ao.tol = cfg.c_tol;
  ao.integ = cfg.integrator();
  const ShootResult fc = find_c_ac(g, ao);

  const std::string dir = join_path(cfg.out, "figure1");
  std::vector<PlotCurve> curves;
  json items = json::array();
  int n_alc = 0, n_ac = 0, n_inc = 0;

  const std::vector<double> factors = {0.25, 0.5, 0.8, 1.25, 2.0, 4.0};
  int idx = 0;
  for (double f : factors) {
    const double beta = f * beta_ac;
    const U1SeedResult seed = seed_kmn(m, n, r0, beta);
    ClassifyOptions co = cfg.classify_options();
    co.keep_trajectory = true;
    co.confirm_blowup = true;
    const Classification c = classify(seed.state, seed.t, seed.params, co);
    const VerdictKind k = c.verdict.kind;
    std::string tag = k == VerdictKind::ALC ? "alc" : k == VerdictKind::Incomplete ? "incomplete"
                                                    : k == VerdictKind::AC          ? "ac"
                                                                                    : "indeterminate";
    n_alc += k == VerdictKind::ALC;
    n_inc += k == VerdictKind::Incomplete;
    n_ac += k == VerdictKind::AC;
    char name[64];
    std::snprintf(name, sizeof name, "curve_%02d_%s.csv", idx++, tag.c_str());
    write_text_file(join_path(dir, name), csv_of(c.trajectory, cfg.cushion));
    curves.push_back({name, tag + " beta=" + fmt17(beta),
                      k == VerdictKind::ALC ? "lines lc rgb 'blue'" : "lines lc rgb 'red'"});
    items.push_back({{"file", name}, {"tag", tag}, {"beta", beta}, {"verdict", c.verdict.to_json()}});
  }
  {
    AcShootOptions dense = ao;
    dense.integ.max_step = 0.01 * cube(r0);
    const BackwardRun crit = extend_ac_backward(g, fc.lo, dense);
    const std::string name = "curve_" + std::string(idx < 10 ? "0" : "") + std::to_string(idx) + "_ac.csv";
    write_text_file(join_path(dir, name), csv_of(crit.traj, cfg.cushion));
    curves.push_back({name, "ac separatrix", "lines lw 2 lc rgb 'black'"});
    items.push_back({{"file", name}, {"tag", "ac"}, {"c", fc.critical_value},
                     {"closure", fc.closure ? fc.closure->to_json() : json(nullptr)}});
    ++n_ac;
  }
  write_text_file(join_path(dir, "figure1.gp"),
                  gnuplot_ab_script(curves, "figure1.png",
                                    "K_{" + std::to_string(m) + "," + std::to_string(n) + "} solutions"));
  write_json_file(join_path(dir, "manifest.json"),
                  {{"command", "figure1"},
                   {"config", cfg.to_json()},
                   {"config_hash", cfg.hash()},
                   {"beta_ac", beta_ac},
                   {"c_ac", fc.critical_value},
              {"principal_orbit_quotient", orbit_quotient(cfg.m, cfg.n)},
                   {"counts", {{"alc", n_alc}, {"ac", n_ac}, {"incomplete", n_inc}}},
                   {"curves", items}});
  out << "figure1: " << n_alc << " ALC, " << n_ac << " AC, " << n_inc << " incomplete curves in "
      << dir << "\n";
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  AcceptanceOptions opt;
  opt.quick = cfg.quick;
  opt.seed = cfg.seed;
  opt.only = cfg.only;
  const auto results = run_acceptance(opt, &err);
  bool ok = true;
  for (const auto& r : results) {
    out << format_result_line(r) << "\n";
    ok = ok && (r.passed || r.skipped);
  }
  out << (ok ? "verify: all checks passed" : "verify: FAILED") << "\n";
  return ok ? kOk : kVerifyFailed;
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, int (*)(const RunConfig&, std::ostream&, std::ostream&)> table = {
      {"solve", cmd_solve},     {"classify", cmd_classify}, {"sweep", cmd_sweep},
      {"find-ac", cmd_find_ac}, {"figure1", cmd_figure1},   {"verify", cmd_verify}};
  const auto it = table.find(name);
  if (it == table.end()) {
    err << "unknown command '" << name << "'\n";
    return kConfigError;
  }
  try {
    return it->second(cfg, out, err);
  } catch (const BracketError& e) {
    err << "error: " << e.what() << "\nscan:\n" << e.scan_table;
    return kBracketError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConstraintError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "integration error: " << e.what() << "\n";
    return kIntegrationError;
  }
}

}  // namespace g2flow
