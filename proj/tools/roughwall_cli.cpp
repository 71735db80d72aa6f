// Command-line front end: cell, corrector, solve, sweep, flat-suite.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "roughwall/harness.hpp"

namespace fs = std::filesystem;
using namespace roughwall;

namespace {

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::string bc = "periodic";
  int threads = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  app->add_option("--bc", c.bc, "lateral boundary condition")
      ->check(CLI::IsMember({"periodic", "neumann"}))
      ->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

harness::Config load(const Common& c) {
  return c.config_path.empty() ? harness::Config{} : harness::load_config(c.config_path);
}

std::string csv_line(std::initializer_list<std::string> fields) {
  std::string s;
  for (const auto& f : fields) {
    if (!s.empty()) s += ",";
    s += f;
  }
  return s + "\n";
}

using harness::format_double;

void run_cell(const Common& c) {
  const harness::Config cfg = load(c);
  const cell::CellSolution sol = cell::solve_cell(cfg.profile, cfg.cell_resolution(), cfg.cg());
  const fs::path out(c.out_dir);

  std::string field = "y1,y2,beta,tau\n";
  const auto& mesh = *sol.mesh;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Point y = mesh.vertices()[static_cast<std::size_t>(v)];
    field += csv_line({format_double(y.x), format_double(y.y), format_double(sol.beta.field[v]),
                       format_double(sol.tau->field[v])});
  }
  harness::atomic_write(out / "cell_field.csv", field);

  std::string eta = "k,re,im\n";
  const auto& tr = sol.beta.eta;
  for (int k = -tr.k_max(); k <= tr.k_max(); ++k) {
    eta += csv_line({std::to_string(k), format_double(tr[k].real()), format_double(tr[k].imag())});
  }
  harness::atomic_write(out / "eta.csv", eta);

  harness::atomic_write(out / "cell_summary.csv",
                        "beta_bar,tau_bar,Y,ppp,n2\n" +
                            csv_line({format_double(sol.beta_bar()), format_double(sol.tau_bar()),
                                      format_double(sol.resolution.Y), std::to_string(sol.resolution.ppp),
                                      std::to_string(sol.resolution.n2)}));
  std::cout << "beta_bar " << format_double(sol.beta_bar()) << "\ntau_bar " << format_double(sol.tau_bar())
            << "\n";
}

void run_corrector(const Common& c) {
  const harness::Config cfg = load(c);
  const cell::CellSolution cs = cell::solve_cell(cfg.profile, cfg.cell_resolution(), cfg.cg(), false);
  const auto xi = corrector::solve_xi(cs, cfg.profile, cfg.quarter_resolution(), cfg.cg());
  const fs::path out(c.out_dir);
  nlohmann::json summary;
  summary["h1_norm"] = corrector::h1_norm(xi);
  summary["radial_bound"] = cfg.decay.radial_bound();
  summary["line_bound"] = cfg.decay.line_bound();
  const auto report = corrector::decay_report(xi, cfg.decay);
  std::string shells = "rho,max_abs_xi\n";
  std::string lines = "y2,int_dxi2\n";
  if (report) {
    for (const auto& s : report->shells) shells += csv_line({format_double(s.rho), format_double(s.max_abs_xi)});
    for (const auto& l : report->lines) lines += csv_line({format_double(l.y2), format_double(l.int_dxi2)});
    summary["radial_exponent"] = report->radial_exponent;
    summary["radial_r2"] = report->radial_r2;
    summary["line_exponent"] = report->line_exponent;
    summary["line_r2"] = report->line_r2;
  } else {
    summary["no_decay_data"] = true;
  }
  harness::atomic_write(out / "decay_shells.csv", shells);
  harness::atomic_write(out / "decay_lines.csv", lines);
  harness::atomic_write(out / "corrector_summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
}

void run_solve(const Common& c, double eps) {
  const harness::Config cfg = load(c);
  const auto exact = harness::solve_exact(cfg.domain(eps), harness::parse_bc_mode(c.bc), cfg.mesh.ppp,
                                          cfg.mesh.n2, cfg.cg());
  std::string out = "x1,x2,u\n";
  const auto& mesh = exact.u.mesh();
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Point x = mesh.vertices()[static_cast<std::size_t>(v)];
    out += csv_line({format_double(x.x), format_double(x.y), format_double(exact.u[v])});
  }
  harness::atomic_write(fs::path(c.out_dir) / "field.csv", out);
  std::cout << "dofs " << exact.dofs << "\n";
}

void run_sweep(const Common& c, bool floor_check) {
  const harness::Config cfg = load(c);
  harness::SweepOptions opt;
  opt.threads = c.threads;
  opt.floor_check = floor_check;
  const auto report = harness::error_table(cfg, harness::parse_bc_mode(c.bc), opt);
  const fs::path out(c.out_dir);
  harness::atomic_write(out / "convergence.csv", harness::convergence_csv(report));
  harness::atomic_write(out / "slopes.json", harness::slopes_json(report));
  std::cout << harness::convergence_csv(report) << harness::slopes_json(report);
}

int run_flat(const Common& c, double depth, const std::vector<double>& eps) {
  const harness::Config cfg = load(c);
  const auto rec = harness::run_flat_suite(depth, eps, cfg);
  const std::string doc = harness::flat_suite_json(rec);
  harness::atomic_write(fs::path(c.out_dir) / "flat_suite.json", doc);
  std::cout << doc;
  return rec.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wall laws over rough periodic boundaries"};
  app.require_subcommand(1);
  Common common;

  auto* cell_cmd = app.add_subcommand("cell", "solve the cell problems, write β/τ/η tables");
  add_common(cell_cmd, common);

  auto* corr_cmd = app.add_subcommand("corrector", "solve the quarter-plane corrector, write decay data");
  add_common(corr_cmd, common);

  double eps = 0.1;
  auto* solve_cmd = app.add_subcommand("solve", "single exact rough-channel solve");
  add_common(solve_cmd, common);
  solve_cmd->add_option("--eps", eps, "roughness size")->capture_default_str();

  bool floor_check = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "error table over the configured ε grid");
  add_common(sweep_cmd, common);
  sweep_cmd->add_flag("--floor-check", floor_check, "rerun each row at doubled resolution");

  double depth = 0.5;
  std::vector<double> flat_eps{0.2, 0.1, 0.05};
  auto* flat_cmd = app.add_subcommand("flat-suite", "analytic flat-wall checks");
  add_common(flat_cmd, common);
  flat_cmd->add_option("--depth", depth, "wall depth c")->capture_default_str();
  flat_cmd->add_option("--eps", flat_eps, "ε values")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cell_cmd) run_cell(common);
    if (*corr_cmd) run_corrector(common);
    if (*solve_cmd) run_solve(common, eps);
    if (*sweep_cmd) run_sweep(common, floor_check);
    if (*flat_cmd) return run_flat(common, depth, flat_eps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
