#pragma once

// Batch driver: configuration, initial data, checkpoints, and the run and
// verify commands. The `grfl` executable is a thin argument layer over this.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "grfl/flow.hpp"
#include "grfl/run.hpp"

namespace grfl {

enum class InitKind { flat, perturbed, checkpoint };
enum class GaugePolicy { none, initial, every_step };

struct InitSpec {
  InitKind kind = InitKind::flat;
  double amplitude = 0.0;
  std::uint64_t seed = 1;
  // subset of {g, A, B, f}
  std::set<std::string> fields{"g", "A", "B", "f"};
  std::string checkpoint;
};

struct RunConfig {
  std::array<int, 3> n{16, 16, 16};
  std::array<double, 3> L{1.0, 1.0, 1.0};
  Backend backend = Backend::spectral;
  bool grid_set = false;  // grid.n or grid.L given explicitly

  FlowMode mode = FlowMode::plain;
  double chi = 0.0;
  FVariant f_variant = FVariant::thm31;
  double cfl = 0.2;
  Integrator integrator = Integrator::rk4;
  double t_end = 0.0;
  double dt = 0.0;  // 0 = suggest_dt every step
  int cadence = 1;
  int cadence_lambda = 10;
  bool lambda = true;
  double lambda_tol = 1e-10;

  InitSpec init;
  GaugePolicy gauge = GaugePolicy::none;

  std::string csv = "series.csv";
  std::string checkpoint = "final.grfl";
  std::string summary = "summary.json";

  // verify suite knobs
  double verify_dt_probe = 1e-5;
  long verify_xi_samples = 100000;
  std::uint64_t verify_seed = 1;
};

// key=value lines, '#' comments, blank lines ignored. Unknown keys, repeated
// keys and malformed values are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
FlowParams flow_params(const RunConfig& c);

// Seeded trigonometric data with integer modes |m_a| <= 2 (no constant mode),
// each component scaled to max |.| = amplitude; no validation or projection.
// SPD is guaranteed for amplitude < 1/3 (diagonal >= 1 - a, off-diagonal <= a).
FlowState sample_perturbation(const Grid& grid, const InitSpec& spec);
// The configured initial state: gauge-projected per policy and SPD-checked.
FlowState build_initial(const RunConfig& c);
Grid config_grid(const RunConfig& c);

inline constexpr std::uint32_t kCheckpointVersion = 1;
// "GRFL", u32 version, 3 x u32 n, 3 x f64 L, f64 t, then g (6), A (3), B (3),
// f (1) in packed component order, each a row-major array of little-endian f64.
void checkpoint_write(const FlowState& s, const std::string& path);
FlowState checkpoint_read(const std::string& path, Backend backend = Backend::spectral);

// Full-precision CSV, one row per TimeSeriesRow; lambda is empty when absent.
void write_csv(std::ostream& out, const std::vector<TimeSeriesRow>& rows);

enum ExitCode : int {
  exit_ok = 0,
  exit_rejected = 1,  // StepRejected during run
  exit_config = 2,    // ParseError / ValidationError / NonSPDMetric in the initial data
  exit_io = 3,        // unreadable or malformed files
  exit_verify = 4,    // a verification residual out of tolerance
};

// Both commands write their machine-readable report to `report` and return
// the exit code; configuration and file errors propagate as exceptions.
int cmd_run(const RunConfig& c, std::ostream& report);

enum class Suite { symbol, critical, evolution, structural, ibp, all };
Suite parse_suite(const std::string& name);
int cmd_verify(const RunConfig& c, Suite suite, std::ostream& report);

}  // namespace grfl
