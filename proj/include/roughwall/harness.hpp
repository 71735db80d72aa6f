#pragma once

/// Exact rough-channel solves, convergence tables in ε, rate fitting, the
/// flat-wall analytic suite, configuration and file output.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughwall/cell.hpp"
#include "roughwall/corrector.hpp"
#include "roughwall/fem.hpp"
#include "roughwall/geometry.hpp"
#include "roughwall/walllaw.hpp"

namespace roughwall::harness {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateFit : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Periodic: u is x1-periodic. Neumann: homogeneous Neumann on inlet/outlet.
enum class BcMode { Periodic, Neumann };

std::string to_string(BcMode mode);
BcMode parse_bc_mode(const std::string& text);

struct MeshConfig {
  int ppp = 16;
  int n2 = 8;
  double cell_Y = 10.0;
  int corrector_periods = 10;
  double corrector_Y = 20.0;
};

struct SolverConfig {
  double tol = 1e-10;
  int max_iter = 0;  // 0: 20 n
};

struct Config {
  geom::RoughProfile profile{-0.5, {0.2}, {0.0, 0.1}};
  double C = 1.0;
  double L = geom::kTwoPi;
  std::vector<double> epsilons{0.2, 0.1, 0.05, 0.025};
  MeshConfig mesh;
  SolverConfig solver;
  corrector::DecayParameters decay;

  linalg::CgOptions cg() const;
  cell::CellResolution cell_resolution() const;
  corrector::QuarterResolution quarter_resolution() const;
  geom::DomainSpec domain(double epsilon) const;
};

/// Parses a JSON document; absent keys keep their defaults, unknown keys throw.
Config parse_config(const std::string& json_text);
Config load_config(const std::filesystem::path& path);
std::string config_to_json(const Config& config);

struct ExactSolution {
  fem::ScalarField u;
  int dofs = 0;
};

/// -Δu = C on the rough channel, u = 0 on the rough wall and at x2 = 1.
ExactSolution solve_exact(const geom::DomainSpec& spec, BcMode mode, int ppp, int n2,
                          const linalg::CgOptions& cg = {});

/// Cell and corrector data shared by all ε of a sweep.
struct MicroSolutions {
  std::shared_ptr<const cell::CellSolution> cell;
  std::shared_ptr<const corrector::CorrectorSolution> xi_in;   // Neumann only
  std::shared_ptr<const corrector::CorrectorSolution> xi_out;  // Neumann only
};

MicroSolutions solve_micro(const Config& config, BcMode mode);

inline const std::vector<std::string> kErrorColumns{"err_u0", "err_u1",  "err_u2",
                                                    "err_bl1", "err_bl2", "err_h1_bl1"};

struct ConvergenceRow {
  double eps = 0.0;
  double h = 0.0;
  int dofs = 0;
  std::map<std::string, double> errors;  // absent column = not computed
  bool floor_suspect = false;
  std::vector<std::string> floor_columns;  // columns that moved > 10% under doubling
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct ConvergenceReport {
  BcMode bc_mode = BcMode::Periodic;
  std::vector<ConvergenceRow> rows;  // decreasing ε
  std::map<std::string, FitResult> slopes;
  std::map<std::string, std::string> skipped;  // column -> reason
};

/// All error norms for one ε against a solved exact field.
ConvergenceRow error_row(const Config& config, double eps, BcMode mode, const MicroSolutions& micro,
                         int ppp, int n2);

struct SweepOptions {
  int threads = 1;
  bool floor_check = false;  // rerun each row at doubled resolution
};

ConvergenceReport error_table(const Config& config, BcMode mode, const SweepOptions& options = {});

/// OLS fit of log(err) against log(eps). DegenerateFit if fewer than two
/// points or any error below 1e-14.
FitResult fit_rate(const std::vector<double>& eps, const std::vector<double>& err);
void fit_slopes(ConvergenceReport& report);

/// Shortest round-trip decimal representation.
std::string format_double(double v);
std::string convergence_csv(const ConvergenceReport& report);
std::string slopes_json(const ConvergenceReport& report);

struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
};

struct FlatSuiteRecord {
  double depth = 0.5;
  std::vector<Check> checks;
  bool passed() const;
  std::optional<Check> first_failure() const;
};

/// Analytic suite for the flat wall f ≡ -c, where β̄ = c, τ̄ = -c², ξ ≡ 0,
/// u² is the exact solution and ‖u^ε − u¹‖ has a closed form.
FlatSuiteRecord run_flat_suite(double c, const std::vector<double>& epsilons, const Config& config);
std::string flat_suite_json(const FlatSuiteRecord& record);

/// Closed-form ‖u^ε − u¹‖_{L²(Ω⁰)} for the flat wall at depth c.
double flat_u1_error(double c, double eps, double C, double L);

/// Writes via a temporary file in the same directory, then renames.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace roughwall::harness
