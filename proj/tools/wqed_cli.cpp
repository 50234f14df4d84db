// Command-line front end: scatter tables, correlator grids, oracle grids,
// comparisons, count rates and parameter sweeps.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "wqed/correlators.hpp"
#include "wqed/diagrams.hpp"
#include "wqed/harness.hpp"
#include "wqed/oracle.hpp"
#include "wqed/scatter.hpp"

namespace h = wqed::harness;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kValidation = 2, kNumerical = 3, kCapacity = 4 };

struct Flags {
  std::string config;
  std::string method;
  std::string out;
  int threads = 0;
  std::string loop;
  std::vector<std::string> sets;
};

// defaults < config file < environment < --set < dedicated flags
h::ScenarioConfig resolve(const Flags& f) {
  h::ScenarioConfig c;
  if (!f.config.empty()) c = h::apply(c, h::read_config_file(f.config));
  c = h::apply(c, h::environment_overrides());
  h::KeyValues kv;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw h::ConfigError("--set expects key=value, got '" + s + "'");
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (!f.method.empty()) kv["method.kind"] = f.method;
  if (!f.loop.empty()) kv["method.loops"] = f.loop;
  if (!f.out.empty()) kv["output.dir"] = f.out;
  if (f.threads != 0) kv["run.threads"] = std::to_string(f.threads);
  return h::apply(c, kv);
}

void print_files(const std::vector<fs::path>& files) {
  for (const auto& p : files) std::cout << "wrote " << p.string() << '\n';
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << '\n';
}

int cmd_scatter(const h::ScenarioConfig& c) {
  h::validate(c);
  fs::create_directories(c.out_dir);
  const fs::path file = fs::path(c.out_dir) / (c.name + "_scatter.csv");
  std::ofstream out(file);
  const char* header = "k,re_t,im_t,abs_t2,re_r,im_r,abs_r2";
  out << header << '\n';
  std::cout << header << '\n';
  for (int i = 0; i < c.k_points; ++i) {
    const double k = c.k_min + (c.k_max - c.k_min) * i / (c.k_points - 1);
    const auto t = wqed::transmission(k, c.params);
    const auto r = wqed::reflection(k, c.params);
    char line[256];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", k, t.real(), t.imag(), std::norm(t),
                  r.real(), r.imag(), std::norm(r));
    out << line << '\n';
    std::cout << line << '\n';
  }
  std::cout << "wrote " << file.string() << '\n';
  return kOk;
}

int cmd_run(h::ScenarioConfig c) {
  const auto r = h::run_scenario(c);
  print_warnings(r.warnings);
  if (r.comparison)
    std::printf("epsilon = %.6g (tolerance %.3g), max |deviation| = %.3g\n", r.comparison->epsilon, c.tol.epsilon,
                r.comparison->max_deviation);
  print_files(r.files);
  return kOk;
}

int cmd_compare_files(const std::string& a, const std::string& b) {
  const auto ga = h::read_grid(a), gb = h::read_grid(b);
  const auto rep = h::compare_grids(ga, gb);
  std::printf("epsilon = %.6g, max |deviation| = %.3g at (%g, %g)\n", rep.epsilon, rep.max_deviation,
              ga.x(rep.max_i), ga.y.size() ? ga.y(rep.max_j) : 0.0);
  return kOk;
}

int cmd_countrate(const h::ScenarioConfig& c) {
  h::validate(c);
  const wqed::Wavefield w(c.params, h::wavefield_options(c));
  wqed::CountRateOptions o;
  o.rel_tol = c.tol.count_rate_rel;
  const auto r = wqed::count_rate(w, c.gamma_tot_hz, c.window, o);
  if (r.warning) std::cerr << "warning: " << *r.warning << '\n';
  std::printf("count_rate_hz = %.6g\nwindow_integral = %.6g (error estimate %.2g)\ngc3_origin = %.6g\n", r.rate_hz,
              r.integral, r.error_estimate, wqed::g3_connected(w, 0, 0, 0));
  return kOk;
}

int cmd_sweep(const h::ScenarioConfig& c) {
  h::validate(h::ScenarioConfig(c));
  const auto rows = h::sweep(c, c.sweep_axis, c.sweep_values);
  const fs::path file = fs::path(c.out_dir) / (c.name + "_sweep.csv");
  h::write_sweep(rows, c.sweep_axis, file);
  std::printf("%-10s %-4s %-14s %-14s %-10s\n", h::to_string(c.sweep_axis), "ok", "gc3(0,0,0)", "rate_hz", "epsilon");
  for (const auto& r : rows) {
    if (r.ok)
      std::printf("%-10g %-4s %-14.6g %-14.6g %-10s\n", r.value, "yes", r.gc3_origin, r.count_rate_hz,
                  r.epsilon ? std::to_string(*r.epsilon).c_str() : "-");
    else
      std::printf("%-10g %-4s %s\n", r.value, "no", r.error.c_str());
  }
  std::cout << "wrote " << file.string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connected photon correlations of chirally coupled atom ensembles"};
  app.set_version_flag("--version", h::version());
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "config file ([section] key = value)")->check(CLI::ExistingFile);
  app.add_option("--method", f.method, "diagrammatic, oracle or both");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--loop", f.loop, "loop corrections: auto, on or off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  app.add_option("--set", f.sets, "override a config key, e.g. --set ensemble.num_atoms=4");

  auto* scatter = app.add_subcommand("scatter", "print single-atom transmission and loss tables");
  auto* grid = app.add_subcommand("grid", "connected g3 on a time or Jacobi grid");
  auto* oracle = app.add_subcommand("oracle", "connected g3 from the master equation");
  auto* compare = app.add_subcommand("compare", "diagrammatic vs oracle discrepancy, or two grid files");
  std::vector<std::string> files;
  compare->add_option("files", files, "two CSV grids written by this tool")->expected(0, 2);
  auto* countrate = app.add_subcommand("countrate", "three-photon coincidence rate");
  auto* sweep = app.add_subcommand("sweep", "scan M, P_in or beta");
  std::string axis;
  std::vector<double> values;
  sweep->add_option("--axis", axis, "M, P_in or beta");
  sweep->add_option("--values", values, "comma separated values")->delimiter(',');
  for (auto* s : {scatter, grid, oracle, compare, countrate, sweep}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (compare->parsed() && !files.empty()) {
      if (files.size() != 2) throw h::ConfigError("compare takes zero or two grid files");
      return cmd_compare_files(files[0], files[1]);
    }
    h::ScenarioConfig c = resolve(f);
    if (scatter->parsed()) return cmd_scatter(c);
    if (grid->parsed()) return cmd_run(c);
    if (oracle->parsed()) {
      c.method = h::MethodChoice::Oracle;
      return cmd_run(c);
    }
    if (compare->parsed()) {
      c.method = h::MethodChoice::Both;
      return cmd_run(c);
    }
    if (countrate->parsed()) return cmd_countrate(c);
    if (sweep->parsed()) {
      h::KeyValues kv;
      if (!axis.empty()) kv["sweep.axis"] = axis;
      c = h::apply(c, kv);
      if (!values.empty()) c.sweep_values = values;
      return cmd_sweep(c);
    }
  } catch (const wqed::oracle::CapacityError& e) {
    std::cerr << "capacity: " << e.what() << '\n';
    return kCapacity;
  } catch (const h::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kValidation;
  } catch (const h::ShapeError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const wqed::InvalidParams& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kValidation;
  } catch (const wqed::QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what() << " (estimate " << e.estimate << ", error " << e.error_bound
              << ")\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
