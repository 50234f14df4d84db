#include "wqed/harness.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <set>
#include <sstream>

#include "wqed/oracle.hpp"
#include "wqed/parallel.hpp"

#ifndef WQED_VERSION
#define WQED_VERSION "0.0.0-unknown"
#endif

namespace wqed::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* to_string(MethodChoice m) {
  switch (m) {
    case MethodChoice::Diagrammatic: return "diagrammatic";
    case MethodChoice::Oracle: return "oracle";
    case MethodChoice::Both: return "both";
  }
  return "?";
}

const char* to_string(LoopFlag f) {
  switch (f) {
    case LoopFlag::Auto: return "auto";
    case LoopFlag::On: return "on";
    case LoopFlag::Off: return "off";
  }
  return "?";
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::NumAtoms: return "M";
    case SweepAxis::DrivePower: return "P_in";
    case SweepAxis::Beta: return "beta";
  }
  return "?";
}

std::string version() { return WQED_VERSION; }

// --- key table ----------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

double to_double(const std::string& v) {
  const std::string t = trim(v);
  std::size_t pos = 0;
  const double x = std::stod(t, &pos);
  if (pos != t.size()) throw std::invalid_argument("trailing characters");
  return x;
}

int to_int(const std::string& v) {
  const std::string t = trim(v);
  std::size_t pos = 0;
  const long x = std::stol(t, &pos);
  if (pos != t.size()) throw std::invalid_argument("not an integer");
  return static_cast<int>(x);
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::string t = trim(v);
  if (!t.empty() && t.front() == '[') t = t.substr(1);
  if (!t.empty() && t.back() == ']') t.pop_back();
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double(item));
  }
  return out;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& table() {
  static const std::vector<std::pair<std::string, Setter>> t = {
      {"ensemble.beta", [](ScenarioConfig& c, const std::string& v) { c.params.beta = to_double(v); }},
      {"ensemble.num_atoms", [](ScenarioConfig& c, const std::string& v) { c.params.num_atoms = to_int(v); }},
      {"ensemble.gamma_tot", [](ScenarioConfig& c, const std::string& v) { c.params.gamma_tot = to_double(v); }},
      {"ensemble.drive_power", [](ScenarioConfig& c, const std::string& v) { c.params.drive_power = to_double(v); }},
      {"method.kind",
       [](ScenarioConfig& c, const std::string& v) {
         const auto s = lower(trim(v));
         if (s == "diagrammatic") c.method = MethodChoice::Diagrammatic;
         else if (s == "oracle") c.method = MethodChoice::Oracle;
         else if (s == "both") c.method = MethodChoice::Both;
         else throw std::invalid_argument("expected diagrammatic, oracle or both");
       }},
      {"method.loops",
       [](ScenarioConfig& c, const std::string& v) {
         const auto s = lower(trim(v));
         if (s == "auto") c.loops = LoopFlag::Auto;
         else if (s == "on") c.loops = LoopFlag::On;
         else if (s == "off") c.loops = LoopFlag::Off;
         else throw std::invalid_argument("expected auto, on or off");
       }},
      {"grid.kind",
       [](ScenarioConfig& c, const std::string& v) {
         const auto s = lower(trim(v));
         if (s == "time") c.grid.kind = GridKind::Time;
         else if (s == "jacobi") c.grid.kind = GridKind::Jacobi;
         else throw std::invalid_argument("expected time or jacobi");
       }},
      {"grid.n", [](ScenarioConfig& c, const std::string& v) { c.grid.n = to_int(v); }},
      {"grid.lo", [](ScenarioConfig& c, const std::string& v) { c.grid.lo = to_double(v); }},
      {"grid.hi", [](ScenarioConfig& c, const std::string& v) { c.grid.hi = to_double(v); }},
      {"grid.jacobi.eta_min", [](ScenarioConfig& c, const std::string& v) { c.grid.eta_min = to_double(v); }},
      {"grid.jacobi.eta_max", [](ScenarioConfig& c, const std::string& v) { c.grid.eta_max = to_double(v); }},
      {"grid.jacobi.zeta_min", [](ScenarioConfig& c, const std::string& v) { c.grid.zeta_min = to_double(v); }},
      {"grid.jacobi.zeta_max", [](ScenarioConfig& c, const std::string& v) { c.grid.zeta_max = to_double(v); }},
      {"grid.jacobi.R", [](ScenarioConfig& c, const std::string& v) { c.grid.R = to_double(v); }},
      {"tolerances.epsilon", [](ScenarioConfig& c, const std::string& v) { c.tol.epsilon = to_double(v); }},
      {"tolerances.count_rate_rel",
       [](ScenarioConfig& c, const std::string& v) { c.tol.count_rate_rel = to_double(v); }},
      {"quadrature.phi2_nodes",
       [](ScenarioConfig& c, const std::string& v) { c.quadrature.phi2_nodes = to_int(v); }},
      {"quadrature.phi2_loop_nodes",
       [](ScenarioConfig& c, const std::string& v) { c.quadrature.phi2_loop_nodes = to_int(v); }},
      {"quadrature.phi3_nodes",
       [](ScenarioConfig& c, const std::string& v) { c.quadrature.phi3_nodes = to_int(v); }},
      {"quadrature.phi3_loop_nodes",
       [](ScenarioConfig& c, const std::string& v) { c.quadrature.phi3_loop_nodes = to_int(v); }},
      {"quadrature.loop_nodes", [](ScenarioConfig& c, const std::string& v) { c.quadrature.loop_nodes = to_int(v); }},
      {"quadrature.table_step",
       [](ScenarioConfig& c, const std::string& v) { c.quadrature.table_step = to_double(v); }},
      {"quadrature.table_range",
       [](ScenarioConfig& c, const std::string& v) { c.quadrature.table_range = to_double(v); }},
      {"oracle.dense_max_atoms",
       [](ScenarioConfig& c, const std::string& v) { c.oracle.dense_max_atoms = to_int(v); }},
      {"oracle.max_step", [](ScenarioConfig& c, const std::string& v) { c.oracle.max_step = to_double(v); }},
      {"countrate.gamma_tot_hz", [](ScenarioConfig& c, const std::string& v) { c.gamma_tot_hz = to_double(v); }},
      {"countrate.window", [](ScenarioConfig& c, const std::string& v) { c.window = to_double(v); }},
      {"output.dir", [](ScenarioConfig& c, const std::string& v) { c.out_dir = trim(v); }},
      {"output.name", [](ScenarioConfig& c, const std::string& v) { c.name = trim(v); }},
      {"run.threads", [](ScenarioConfig& c, const std::string& v) { c.threads = to_int(v); }},
      {"sweep.axis",
       [](ScenarioConfig& c, const std::string& v) {
         const auto s = lower(trim(v));
         if (s == "m" || s == "num_atoms") c.sweep_axis = SweepAxis::NumAtoms;
         else if (s == "p_in" || s == "drive_power") c.sweep_axis = SweepAxis::DrivePower;
         else if (s == "beta") c.sweep_axis = SweepAxis::Beta;
         else throw std::invalid_argument("expected M, P_in or beta");
       }},
      {"sweep.values", [](ScenarioConfig& c, const std::string& v) { c.sweep_values = to_list(v); }},
      {"scatter.k_min", [](ScenarioConfig& c, const std::string& v) { c.k_min = to_double(v); }},
      {"scatter.k_max", [](ScenarioConfig& c, const std::string& v) { c.k_max = to_double(v); }},
      {"scatter.points", [](ScenarioConfig& c, const std::string& v) { c.k_points = to_int(v); }},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& e : table()) k.push_back(e.first);
    return k;
  }();
  return keys;
}

std::string env_name(const std::string& key) {
  std::string out = kEnvPrefix;
  for (char ch : key) out += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

KeyValues parse_config_text(std::istream& in) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  KeyValues kv;
  for (const auto& it : items) {
    if (it.name == "++" || it.name == "--") continue;
    std::string joined;
    for (std::size_t i = 0; i < it.inputs.size(); ++i) joined += (i ? "," : "") + it.inputs[i];
    kv[it.fullname()] = joined;
  }
  return kv;
}

KeyValues read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config_text(in);
}

KeyValues environment_overrides() {
  KeyValues kv;
  for (const auto& key : config_keys())
    if (const char* v = std::getenv(env_name(key).c_str())) kv[key] = v;
  return kv;
}

ScenarioConfig apply(const ScenarioConfig& base, const KeyValues& kv) {
  ScenarioConfig c = base;
  std::vector<std::string> errors;
  for (const auto& [key, value] : kv) {
    auto it = std::find_if(table().begin(), table().end(), [&](const auto& e) { return e.first == key; });
    if (it == table().end()) {
      errors.push_back("unknown key '" + key + "'");
      continue;
    }
    try {
      it->second(c, value);
    } catch (const std::exception& e) {
      errors.push_back("bad value '" + value + "' for " + key + ": " + e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
    throw ConfigError(msg);
  }
  return c;
}

// --- validation ---------------------------------------------------------------

namespace {

bool uses_oracle(const ScenarioConfig& c) { return c.method != MethodChoice::Diagrammatic; }

void check_axis_values(SweepAxis axis, const std::vector<double>& values, std::vector<std::string>& err) {
  for (double v : values) {
    const bool ok = axis == SweepAxis::NumAtoms   ? (v >= 0 && v == std::floor(v) && v < 1e6)
                    : axis == SweepAxis::Beta     ? (v > 0 && v < 1)
                                                  : (v >= 0 && std::isfinite(v));
    if (!ok) err.push_back("sweep value " + std::to_string(v) + " invalid for axis " + to_string(axis));
  }
}

}  // namespace

std::vector<std::string> validation_errors(const ScenarioConfig& c) {
  std::vector<std::string> err;
  if (auto p = wqed::validation_errors(c.params); !p.empty()) {
    std::stringstream ss(p);
    std::string item;
    while (std::getline(ss, item, ';')) err.push_back(trim(item));
  }
  const auto& g = c.grid;
  if (g.n < 2) err.push_back("grid.n must be >= 2");
  auto finite_range = [&](double a, double b, const char* what) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) err.push_back(std::string(what) + " must be finite with min < max");
  };
  if (g.kind == GridKind::Time) {
    finite_range(g.lo, g.hi, "grid.lo/grid.hi");
    if (uses_oracle(c) && g.lo < 0) err.push_back("grid.lo must be >= 0 for oracle time grids");
  } else {
    finite_range(g.eta_min, g.eta_max, "grid.jacobi.eta range");
    finite_range(g.zeta_min, g.zeta_max, "grid.jacobi.zeta range");
    if (!std::isfinite(g.R)) err.push_back("grid.jacobi.R must be finite");
    if (uses_oracle(c)) err.push_back("oracle grids are time grids; grid.kind = jacobi needs method diagrammatic");
  }
  if (!(c.tol.epsilon > 0)) err.push_back("tolerances.epsilon must be > 0");
  if (!(c.tol.count_rate_rel > 0)) err.push_back("tolerances.count_rate_rel must be > 0");
  const auto& q = c.quadrature;
  if (q.phi2_nodes < 8 || q.phi3_nodes < 8 || q.phi2_loop_nodes < 8 || q.phi3_loop_nodes < 8 || q.loop_nodes < 8)
    err.push_back("quadrature node counts must be >= 8");
  if (!(q.table_step > 0) || !(q.table_range > q.table_step)) err.push_back("quadrature table step/range invalid");
  if (c.oracle.dense_max_atoms < 0) err.push_back("oracle.dense_max_atoms must be >= 0");
  if (!(c.oracle.max_step > 0)) err.push_back("oracle.max_step must be > 0");
  if (!(c.gamma_tot_hz > 0) || !std::isfinite(c.gamma_tot_hz)) err.push_back("countrate.gamma_tot_hz must be > 0");
  if (!(c.window > 0) || !std::isfinite(c.window)) err.push_back("countrate.window must be > 0");
  if (c.threads < 1) err.push_back("run.threads must be >= 1");
  if (c.name.empty() || c.name.find('/') != std::string::npos) err.push_back("output.name must be a plain file stem");
  if (c.out_dir.empty()) err.push_back("output.dir must not be empty");
  if (c.k_points < 2 || !(c.k_min < c.k_max)) err.push_back("scatter range needs k_min < k_max and >= 2 points");
  check_axis_values(c.sweep_axis, c.sweep_values, err);
  return err;
}

void validate(const ScenarioConfig& c) {
  const auto err = validation_errors(c);
  if (!err.empty()) {
    std::string msg;
    for (const auto& e : err) msg += (msg.empty() ? "" : "; ") + e;
    throw ConfigError(msg);
  }
  if (uses_oracle(c) && c.params.num_atoms > oracle::kMaxAtoms)
    throw oracle::CapacityError("oracle requested for M = " + std::to_string(c.params.num_atoms) +
                                " but supports at most " + std::to_string(oracle::kMaxAtoms) + " atoms");
}

bool loops_enabled(const ScenarioConfig& c) {
  switch (c.loops) {
    case LoopFlag::On: return true;
    case LoopFlag::Off: return false;
    case LoopFlag::Auto: return c.params.beta >= 0.03;
  }
  return false;
}

WavefieldOptions wavefield_options(const ScenarioConfig& c) {
  WavefieldOptions o = c.quadrature;
  o.loops = loops_enabled(c);
  return o;
}

// --- comparison ---------------------------------------------------------------

ComparisonReport compare_grids(const CorrelationGrid& a, const CorrelationGrid& b) {
  if (a.kind != b.kind) throw ShapeError(std::string("grid kinds differ: ") + to_string(a.kind) + " vs " + to_string(b.kind));
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw ShapeError("grid shapes differ");
  if (a.x.size() != b.x.size() || a.y.size() != b.y.size() || a.x != b.x || a.y != b.y)
    throw ShapeError("grid axes differ");
  ComparisonReport r;
  r.rows = a.values.rows();
  r.cols = a.values.cols();
  const Eigen::MatrixXd d = a.values - b.values;
  const double na = a.values.norm(), nd = d.norm();
  r.epsilon = nd == 0.0 ? 0.0 : (na == 0.0 ? std::numeric_limits<double>::infinity() : nd / na);
  if (d.size() > 0) r.max_deviation = d.cwiseAbs().maxCoeff(&r.max_i, &r.max_j);
  return r;
}

// --- output -------------------------------------------------------------------

namespace {

json params_json(const EnsembleParams& p) {
  return {{"beta", p.beta},
          {"num_atoms", p.num_atoms},
          {"gamma_tot", p.gamma_tot},
          {"drive_power", p.drive_power},
          {"optical_depth", p.optical_depth()}};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CorrelationKind kind_from(const std::string& s) {
  for (auto k : {CorrelationKind::G2, CorrelationKind::G3, CorrelationKind::G3Connected,
                 CorrelationKind::G3ConnectedUnnormalized})
    if (s == to_string(k)) return k;
  throw std::runtime_error("unknown grid kind '" + s + "'");
}

}  // namespace

void write_grid(const CorrelationGrid& g, const fs::path& csv, const ScenarioConfig& config,
                const std::vector<std::string>& warnings) {
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  {
    std::ofstream out(csv);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
    const bool two_d = g.y.size() > 0;
    out << g.x_name << (two_d ? "," + g.y_name : std::string()) << ",value\n";
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
      if (two_d) {
        for (Eigen::Index j = 0; j < g.values.cols(); ++j)
          out << fmt(g.x(i)) << ',' << fmt(g.y(j)) << ',' << fmt(g.values(i, j)) << '\n';
      } else {
        out << fmt(g.x(i)) << ',' << fmt(g.values(i, 0)) << '\n';
      }
    }
  }
  json meta;
  meta["kind"] = to_string(g.kind);
  meta["method"] = to_string(g.method);
  meta["version"] = version();
  meta["params"] = params_json(g.params);
  meta["loops"] = g.loops;
  meta["axes"] = {{"x", g.x_name}, {"y", g.y_name}, {"nx", g.x.size()}, {"ny", g.y.size()}};
  meta["tolerances"] = {{"epsilon", config.tol.epsilon}, {"count_rate_rel", config.tol.count_rate_rel}};
  const auto& q = config.quadrature;
  meta["quadrature"] = {{"phi2_nodes", q.phi2_nodes},         {"phi2_loop_nodes", q.phi2_loop_nodes},
                        {"phi3_nodes", q.phi3_nodes},         {"phi3_loop_nodes", q.phi3_loop_nodes},
                        {"loop_nodes", q.loop_nodes},         {"table_step", q.table_step},
                        {"table_range", q.table_range}};
  meta["oracle"] = {{"dense_max_atoms", config.oracle.dense_max_atoms}, {"max_step", config.oracle.max_step}};
  meta["warnings"] = warnings;
  fs::path side = csv;
  side.replace_extension(".json");
  std::ofstream js(side);
  if (!js) throw std::runtime_error("cannot write " + side.string());
  js << meta.dump(2) << '\n';
}

CorrelationGrid read_grid(const fs::path& csv) {
  fs::path side = csv;
  side.replace_extension(".json");
  std::ifstream js(side);
  if (!js) throw std::runtime_error("missing sidecar " + side.string());
  const json meta = json::parse(js);
  CorrelationGrid g;
  g.kind = kind_from(meta.at("kind").get<std::string>());
  g.method = meta.at("method").get<std::string>() == "oracle" ? Method::Oracle : Method::Diagrammatic;
  const auto& p = meta.at("params");
  g.params.beta = p.at("beta").get<double>();
  g.params.num_atoms = p.at("num_atoms").get<int>();
  g.params.gamma_tot = p.at("gamma_tot").get<double>();
  g.params.drive_power = p.at("drive_power").get<double>();
  g.loops = meta.at("loops").get<bool>();
  g.x_name = meta.at("axes").at("x").get<std::string>();
  g.y_name = meta.at("axes").at("y").get<std::string>();
  const auto nx = meta.at("axes").at("nx").get<Eigen::Index>();
  const auto ny = meta.at("axes").at("ny").get<Eigen::Index>();

  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot read " + csv.string());
  std::string line;
  std::getline(in, line);  // header
  g.x.resize(nx);
  g.y.resize(ny);
  g.values.resize(nx, ny > 0 ? ny : 1);
  const Eigen::Index rows = nx * (ny > 0 ? ny : 1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated grid file " + csv.string());
    std::stringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    if (ny > 0) {
      std::getline(ss, c, ',');
      const Eigen::Index i = r / ny, j = r % ny;
      g.x(i) = std::strtod(a.c_str(), nullptr);
      g.y(j) = std::strtod(b.c_str(), nullptr);
      g.values(i, j) = std::strtod(c.c_str(), nullptr);
    } else {
      g.x(r) = std::strtod(a.c_str(), nullptr);
      g.values(r, 0) = std::strtod(b.c_str(), nullptr);
    }
  }
  return g;
}

// --- scenarios ----------------------------------------------------------------

namespace {

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

ScenarioResult run_impl(const ScenarioConfig& c, const Wavefield* wf) {
  validate(c);
  ScenarioResult r;
  if (auto w = weak_drive_warning(c.params)) r.warnings.push_back(*w);
  const fs::path dir(c.out_dir);

  if (c.method != MethodChoice::Oracle) {
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<Wavefield> own;
    if (!wf) wf = &own.emplace(c.params, wavefield_options(c));
    CorrelationGrid g = c.grid.kind == GridKind::Time
                            ? time_grid(*wf, c.grid.lo, c.grid.hi, c.grid.n, c.threads)
                            : jacobi_grid(*wf, c.grid.eta_min, c.grid.eta_max, c.grid.zeta_min, c.grid.zeta_max,
                                          c.grid.n, c.grid.R, c.threads);
    r.seconds_diagrammatic = seconds_since(t0);
    const fs::path f = dir / (c.name + "_diagrammatic.csv");
    write_grid(g, f, c, r.warnings);
    r.files.push_back(f);
    r.diagrammatic = std::move(g);
  }
  if (c.method != MethodChoice::Diagrammatic) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXd axis = Eigen::VectorXd::LinSpaced(c.grid.n, c.grid.lo, c.grid.hi);
    oracle::QrtOptions qo;
    qo.dense_max_atoms = c.oracle.dense_max_atoms;
    qo.max_step = c.oracle.max_step;
    qo.threads = c.threads;
    CorrelationGrid g = oracle::qrt_g3(c.params, axis, axis, qo).g3_connected;
    r.seconds_oracle = seconds_since(t0);
    const fs::path f = dir / (c.name + "_oracle.csv");
    write_grid(g, f, c, r.warnings);
    r.files.push_back(f);
    r.oracle = std::move(g);
  }
  if (r.diagrammatic && r.oracle) {
    ComparisonReport rep = compare_grids(*r.diagrammatic, *r.oracle);
    rep.seconds_a = r.seconds_diagrammatic;
    rep.seconds_b = r.seconds_oracle;
    json j = {{"epsilon", rep.epsilon},
              {"epsilon_tolerance", c.tol.epsilon},
              {"within_tolerance", rep.epsilon <= c.tol.epsilon},
              {"max_deviation", rep.max_deviation},
              {"max_deviation_at", {r.diagrammatic->x(rep.max_i), r.diagrammatic->y(rep.max_j)}},
              {"rows", rep.rows},
              {"cols", rep.cols},
              {"seconds_diagrammatic", rep.seconds_a},
              {"seconds_oracle", rep.seconds_b},
              {"params", params_json(c.params)},
              {"loops", loops_enabled(c)},
              {"version", version()}};
    const fs::path f = dir / (c.name + "_compare.json");
    std::ofstream out(f);
    out << j.dump(2) << '\n';
    r.files.push_back(f);
    r.comparison = rep;
  }
  return r;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config) { return run_impl(config, nullptr); }

std::vector<SweepRow> sweep(const ScenarioConfig& base, SweepAxis axis, const std::vector<double>& values) {
  std::vector<SweepRow> rows(values.size());
  parallel_for(static_cast<int>(values.size()), base.threads, [&](int i) {
    SweepRow& row = rows[i];
    row.value = values[i];
    try {
      ScenarioConfig c = base;
      c.threads = 1;
      c.sweep_values.clear();
      std::ostringstream tag;
      tag << base.name << '_' << to_string(axis) << values[i];
      c.name = tag.str();
      switch (axis) {
        case SweepAxis::NumAtoms: c.params.num_atoms = static_cast<int>(values[i]); break;
        case SweepAxis::DrivePower: c.params.drive_power = values[i]; break;
        case SweepAxis::Beta: c.params.beta = values[i]; break;
      }
      validate(c);
      const Wavefield wf(c.params, wavefield_options(c));
      row.gc3_origin = g3_connected(wf, 0.0, 0.0, 0.0);
      CountRateOptions co;
      co.rel_tol = c.tol.count_rate_rel;
      row.count_rate_hz = count_rate(wf, c.gamma_tot_hz, c.window, co).rate_hz;
      const ScenarioResult res = run_impl(c, &wf);
      if (res.comparison) row.epsilon = res.comparison->epsilon;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return rows;
}

void write_sweep(const std::vector<SweepRow>& rows, SweepAxis axis, const fs::path& csv) {
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("cannot write " + csv.string());
  out << to_string(axis) << ",ok,gc3_origin,count_rate_hz,epsilon,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    for (auto& ch : err)
      if (ch == ',' || ch == '\n') ch = ' ';
    out << fmt(r.value) << ',' << (r.ok ? 1 : 0) << ',' << (r.ok ? fmt(r.gc3_origin) : "") << ','
        << (r.ok ? fmt(r.count_rate_hz) : "") << ',' << (r.epsilon ? fmt(*r.epsilon) : "") << ',' << err << '\n';
  }
}

}  // namespace wqed::harness
