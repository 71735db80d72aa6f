#include "roughwall/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace roughwall::harness {

using json = nlohmann::json;

std::string to_string(BcMode mode) { return mode == BcMode::Periodic ? "periodic" : "neumann"; }

BcMode parse_bc_mode(const std::string& text) {
  if (text == "periodic") return BcMode::Periodic;
  if (text == "neumann") return BcMode::Neumann;
  throw ConfigError("unknown boundary mode '" + text + "' (expected periodic or neumann)");
}

// ---------------------------------------------------------------------------
// Configuration

linalg::CgOptions Config::cg() const {
  linalg::CgOptions o;
  o.tol = solver.tol;
  o.max_iter = solver.max_iter;
  return o;
}

cell::CellResolution Config::cell_resolution() const { return {mesh.ppp, mesh.n2, mesh.cell_Y}; }

corrector::QuarterResolution Config::quarter_resolution() const {
  return {mesh.corrector_periods, mesh.corrector_Y, mesh.ppp, mesh.n2};
}

geom::DomainSpec Config::domain(double epsilon) const {
  geom::DomainSpec s;
  s.L = L;
  s.epsilon = epsilon;
  s.C = C;
  s.profile = profile;
  geom::validate(s);
  return s;
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (allowed.count(item.key()) == 0) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, {"profile", "C", "L", "epsilons", "mesh", "solver", "decay"}, "config");
  Config c;
  if (doc.contains("profile")) {
    const json& p = doc["profile"];
    reject_unknown(p, {"mean", "cos", "sin"}, "profile");
    double mean = c.profile.mean();
    std::vector<double> cs = c.profile.cos_coeffs();
    std::vector<double> sn = c.profile.sin_coeffs();
    read(p, "mean", mean, "profile");
    read(p, "cos", cs, "profile");
    read(p, "sin", sn, "profile");
    try {
      c.profile = geom::RoughProfile(mean, cs, sn);
    } catch (const GeometryError& e) {
      throw ConfigError(e.what());
    }
  }
  read(doc, "C", c.C, "config");
  read(doc, "L", c.L, "config");
  read(doc, "epsilons", c.epsilons, "config");
  if (doc.contains("mesh")) {
    const json& m = doc["mesh"];
    reject_unknown(m, {"ppp", "n2", "cell_Y", "corrector_periods", "corrector_Y"}, "mesh");
    read(m, "ppp", c.mesh.ppp, "mesh");
    read(m, "n2", c.mesh.n2, "mesh");
    read(m, "cell_Y", c.mesh.cell_Y, "mesh");
    read(m, "corrector_periods", c.mesh.corrector_periods, "mesh");
    read(m, "corrector_Y", c.mesh.corrector_Y, "mesh");
  }
  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    reject_unknown(s, {"tol", "max_iter"}, "solver");
    read(s, "tol", c.solver.tol, "solver");
    read(s, "max_iter", c.solver.max_iter, "solver");
  }
  if (doc.contains("decay")) {
    const json& d = doc["decay"];
    reject_unknown(d, {"alpha", "M"}, "decay");
    read(d, "alpha", c.decay.alpha, "decay");
    read(d, "M", c.decay.M, "decay");
  }
  if (!(c.solver.tol > 0.0)) throw ConfigError("solver.tol must be positive");
  if (c.solver.max_iter < 0) throw ConfigError("solver.max_iter must be >= 0");
  try {
    c.decay.validate();
    for (double e : c.epsilons) c.domain(e);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const Config& c) {
  json doc = {
      {"profile",
       {{"mean", c.profile.mean()}, {"cos", c.profile.cos_coeffs()}, {"sin", c.profile.sin_coeffs()}}},
      {"C", c.C},
      {"L", c.L},
      {"epsilons", c.epsilons},
      {"mesh",
       {{"ppp", c.mesh.ppp},
        {"n2", c.mesh.n2},
        {"cell_Y", c.mesh.cell_Y},
        {"corrector_periods", c.mesh.corrector_periods},
        {"corrector_Y", c.mesh.corrector_Y}}},
      {"solver", {{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}}},
      {"decay", {{"alpha", c.decay.alpha}, {"M", c.decay.M}}}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Solves

ExactSolution solve_exact(const geom::DomainSpec& spec, BcMode mode, int ppp, int n2,
                          const linalg::CgOptions& cg) {
  auto mesh = std::make_shared<const geom::Mesh>(geom::build_rough_mesh(spec, ppp, n2));
  const auto sys = fem::apply_bc(
      fem::assemble(mesh, spec.C),
      {{geom::BoundaryTag::GammaEps, nullptr}, {geom::BoundaryTag::Gamma1, nullptr}}, {},
      mode == BcMode::Periodic);
  const int dofs = sys.constraints->dof_count;
  return ExactSolution{fem::solve(sys, cg), dofs};
}

MicroSolutions solve_micro(const Config& config, BcMode mode) {
  MicroSolutions m;
  m.cell = std::make_shared<const cell::CellSolution>(
      cell::solve_cell(config.profile, config.cell_resolution(), config.cg()));
  if (mode == BcMode::Neumann) {
    m.xi_in = std::make_shared<const corrector::CorrectorSolution>(
        corrector::solve_xi(*m.cell, config.profile, config.quarter_resolution(), config.cg()));
    m.xi_out = std::make_shared<const corrector::CorrectorSolution>(corrector::solve_mirror_xi(
        *m.cell, config.profile, config.quarter_resolution(), config.cg()));
  }
  return m;
}

ConvergenceRow error_row(const Config& config, double eps, BcMode mode, const MicroSolutions& micro,
                         int ppp, int n2) {
  using walllaw::ApproxField;
  using walllaw::Mode;
  using walllaw::Order;
  const geom::DomainSpec spec = config.domain(eps);
  const ExactSolution exact = solve_exact(spec, mode, ppp, n2, config.cg());
  const walllaw::WallLawParams params{eps, config.C, config.L, micro.cell->beta_bar(),
                                      micro.cell->tau_bar()};

  ConvergenceRow row;
  row.eps = eps;
  row.h = geom::kTwoPi * eps / ppp;
  row.dofs = exact.dofs;
  auto l2 = [&](const ApproxField& a) {
    return fem::l2_error(exact.u, fem::Region::Omega0, [&a](Point x) { return a.value(x); });
  };
  row.errors["err_u0"] = l2(ApproxField(params, Order::Zeroth, Mode::Averaged));
  row.errors["err_u1"] = l2(ApproxField(params, Order::First, Mode::Averaged));
  row.errors["err_u2"] = l2(ApproxField(params, Order::Second, Mode::Averaged));

  const Mode full = mode == BcMode::Periodic ? Mode::FullPeriodic : Mode::FullNeumann;
  row.errors["err_bl1"] =
      l2(ApproxField(params, Order::First, full, micro.cell, micro.xi_in, micro.xi_out));
  if (mode == BcMode::Periodic) {
    row.errors["err_bl2"] = l2(ApproxField(params, Order::Second, Mode::FullPeriodic, micro.cell));
  }

  // Full H¹(Ω^ε) norm; the composite uses the P1 cell field wherever it is
  // defined so that its discretization matches the exact solve.
  const ApproxField h1(params, Order::First, full, micro.cell, micro.xi_in, micro.xi_out,
                       cell::Evaluation::CellMesh);
  const double e0 = fem::l2_error(exact.u, fem::Region::Full, [&h1](Point x) { return h1.value(x); });
  const double e1 =
      fem::h1_semi_error(exact.u, fem::Region::Full, [&h1](Point x) { return h1.gradient(x); });
  row.errors["err_h1_bl1"] = std::sqrt(e0 * e0 + e1 * e1);
  return row;
}

namespace {

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

ConvergenceReport error_table(const Config& config, BcMode mode, const SweepOptions& options) {
  std::vector<double> eps = config.epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  const MicroSolutions micro = solve_micro(config, mode);
  std::optional<MicroSolutions> fine_micro;
  Config fine = config;
  fine.mesh.ppp *= 2;
  fine.mesh.n2 *= 2;
  if (options.floor_check) fine_micro = solve_micro(fine, mode);

  ConvergenceReport report;
  report.bc_mode = mode;
  report.rows.resize(eps.size());
  parallel_for(static_cast<int>(eps.size()), options.threads, [&](int i) {
    ConvergenceRow row = error_row(config, eps[static_cast<std::size_t>(i)], mode, micro,
                                   config.mesh.ppp, config.mesh.n2);
    if (fine_micro) {
      const ConvergenceRow ref = error_row(fine, row.eps, mode, *fine_micro, fine.mesh.ppp, fine.mesh.n2);
      for (const auto& [name, value] : row.errors) {
        const double other = ref.errors.at(name);
        if (std::abs(value - other) > 0.1 * std::max(std::abs(value), std::abs(other))) {
          row.floor_suspect = true;
          row.floor_columns.push_back(name);
        }
      }
    }
    report.rows[static_cast<std::size_t>(i)] = std::move(row);
  });
  fit_slopes(report);
  return report;
}

FitResult fit_rate(const std::vector<double>& eps, const std::vector<double>& err) {
  if (eps.size() != err.size() || eps.size() < 2) throw DegenerateFit("fit_rate: need at least two points");
  for (double e : err) {
    if (!(e >= 1e-14)) throw DegenerateFit("fit_rate: error below 1e-14");
  }
  const double n = static_cast<double>(eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double x = std::log(eps[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cov = sxy - sx * sy / n;
  if (!(vx > 0.0)) throw DegenerateFit("fit_rate: all ε equal");
  FitResult f;
  f.slope = cov / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = vy > 0.0 ? cov * cov / (vx * vy) : 1.0;
  return f;
}

void fit_slopes(ConvergenceReport& report) {
  report.slopes.clear();
  report.skipped.clear();
  for (const std::string& col : kErrorColumns) {
    std::vector<double> x, y;
    bool complete = !report.rows.empty();
    for (const auto& r : report.rows) {
      auto it = r.errors.find(col);
      if (it == r.errors.end()) {
        complete = false;
        break;
      }
      x.push_back(r.eps);
      y.push_back(it->second);
    }
    if (!complete) continue;
    if (x.size() < 3) {
      report.skipped[col] = "fewer than 3 rows";
      continue;
    }
    try {
      report.slopes[col] = fit_rate(x, y);
    } catch (const DegenerateFit& e) {
      report.skipped[col] = e.what();
    }
  }
}

// ---------------------------------------------------------------------------
// Output

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::string out = "eps,h,dofs";
  for (const auto& c : kErrorColumns) out += "," + c;
  out += "\n";
  for (const auto& r : report.rows) {
    out += format_double(r.eps) + "," + format_double(r.h) + "," + std::to_string(r.dofs);
    for (const auto& c : kErrorColumns) {
      out += ",";
      auto it = r.errors.find(c);
      if (it != r.errors.end()) out += format_double(it->second);
    }
    out += "\n";
  }
  return out;
}

std::string slopes_json(const ConvergenceReport& report) {
  json doc;
  doc["bc_mode"] = to_string(report.bc_mode);
  doc["slopes"] = json::object();
  for (const auto& [col, f] : report.slopes) {
    doc["slopes"][col] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
  }
  doc["skipped"] = report.skipped;
  std::vector<double> suspect;
  json columns = json::object();
  for (const auto& r : report.rows) {
    if (!r.floor_suspect) continue;
    suspect.push_back(r.eps);
    columns[format_double(r.eps)] = r.floor_columns;
  }
  doc["floor_suspect_eps"] = suspect;
  doc["floor_suspect_columns"] = columns;
  return doc.dump(2) + "\n";
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Flat-wall suite

double flat_u1_error(double c, double eps, double C, double L) {
  return C * eps * eps * c * c / (2.0 * (1.0 + eps * c)) * std::sqrt(L / 3.0);
}

bool FlatSuiteRecord::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::optional<Check> FlatSuiteRecord::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return c;
  }
  return std::nullopt;
}

namespace {

Check at_most(std::string name, double value, double limit) {
  return Check{std::move(name), value, limit, value <= limit};
}

std::string eps_label(double eps) { return "eps=" + format_double(eps); }

}  // namespace

FlatSuiteRecord run_flat_suite(double c, const std::vector<double>& epsilons, const Config& config) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("run_flat_suite: depth must lie in ]0, 1[");
  Config flat = config;
  flat.profile = geom::RoughProfile::flat(-c);
  FlatSuiteRecord rec;
  rec.depth = c;

  const cell::CellSolution cs = cell::solve_cell(flat.profile, flat.cell_resolution(), flat.cg());
  rec.checks.push_back(at_most("beta_bar", std::abs(cs.beta_bar() - c), 1e-8));
  rec.checks.push_back(at_most("tau_bar", std::abs(cs.tau_bar() + c * c), 1e-8));
  const auto xi = corrector::solve_xi(cs, flat.profile, flat.quarter_resolution(), flat.cg());
  rec.checks.push_back(at_most("xi_h1", corrector::h1_norm(xi), 1e-6));

  const walllaw::WallLawParams base{0.0, flat.C, flat.L, cs.beta_bar(), cs.tau_bar()};
  std::vector<double> eps_used, err_u1;
  for (double eps : epsilons) {
    // Fixed vertical spacing 1/(40 n2) in the smooth part: P1 interpolation of
    // the exact parabola stays below the u² tolerance for every ε.
    const int n2 = std::max(flat.mesh.n2,
                            static_cast<int>(std::lround(40.0 * flat.mesh.n2 * eps)));
    const ExactSolution exact =
        solve_exact(flat.domain(eps), BcMode::Periodic, flat.mesh.ppp, n2, flat.cg());
    walllaw::WallLawParams p = base;
    p.epsilon = eps;
    const double e2 = fem::l2_error(exact.u, fem::Region::Omega0,
                                    [&p](Point x) { return walllaw::u2(p, x); });
    const double e1 = fem::l2_error(exact.u, fem::Region::Omega0,
                                    [&p](Point x) { return walllaw::u1(p, x); });
    const double closed = flat_u1_error(c, eps, flat.C, flat.L);
    rec.checks.push_back(at_most("u2_exact " + eps_label(eps), e2, 5e-6));
    rec.checks.push_back(at_most("u1_closed_form_rel " + eps_label(eps), std::abs(e1 - closed) / closed, 0.05));
    eps_used.push_back(eps);
    err_u1.push_back(e1);
  }
  if (eps_used.size() >= 3) {
    const FitResult f = fit_rate(eps_used, err_u1);
    rec.checks.push_back(at_most("u1_slope_minus_2", std::abs(f.slope - 2.0), 0.1));
  }
  return rec;
}

std::string flat_suite_json(const FlatSuiteRecord& record) {
  json doc;
  doc["depth"] = record.depth;
  doc["passed"] = record.passed();
  doc["checks"] = json::array();
  for (const auto& c : record.checks) {
    doc["checks"].push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed}});
  }
  if (auto f = record.first_failure()) doc["first_failure"] = f->name;
  return doc.dump(2) + "\n";
}

}  // namespace roughwall::harness
