#pragma once

// Scenario files, sweep specifications and the subcommands of the
// exclusion-lab tool. Each run_* function writes to the given streams and
// returns a process exit code; none of them throws.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "exclusion_lab/errors.hpp"
#include "exclusion_lab/integrator.hpp"
#include "exclusion_lab/model.hpp"

namespace exclab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class ModelKind { BareBones, TwoIdeology };

struct Scenario {
  ModelKind model = ModelKind::BareBones;
  ModelParams params;
  std::optional<State> initial;
  IntegratorConfig integrator;
  std::uint64_t seed = 0;
};

/// Parses scenario JSON text. Collects every problem into one ValidationError.
Scenario parse_scenario(const std::string& text);
/// Reads and parses a file; IoError when it cannot be read.
Scenario load_scenario(const std::string& path);

/// S = Lambda/mu and 1e-3 * Lambda/mu in every adopter compartment.
State default_initial(const ModelParams& p);

/// Dotted parameter names: lambda, mu, delta, ideology1.beta, ideology2.q_e, ...
double get_param(const ModelParams& p, const std::string& path);
void set_param(ModelParams& p, const std::string& path, double value);

/// Recognized sweep quantities for a model, in canonical order.
std::vector<std::string> sweep_quantities(ModelKind model);

struct SweepSpec {
  std::string param;
  double from = 0.0;
  double to = 0.0;
  int steps = 0;
  std::vector<std::string> quantities;

  /// Throws ValidationError (range, steps, unresolvable path, bad quantity).
  void validate(const Scenario& sc) const;
  /// from + k (to - from)/(steps - 1); the last point is exactly `to`.
  std::vector<double> grid() const;
};

/// Splits "a,b, c" into trimmed, non-empty items.
std::vector<std::string> split_list(const std::string& text);

/// splitmix64; uniform() maps the top 53 bits to [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform();

 private:
  std::uint64_t state_;
};

/// Uniform over {x >= 0, sum(x) <= Lambda/mu} by rejection from the box.
State random_initial(const ModelParams& p, SplitMix64& rng);

enum class Format { Json, Text };

int run_analyze(const Scenario& sc, Format format, std::ostream& out, std::ostream& err);

/// CSV goes to output_path when given (summary to out), otherwise CSV to out
/// and the summary to err.
int run_simulate(const Scenario& sc, double t_end, const std::optional<std::string>& output_path,
                 std::ostream& out, std::ostream& err);

int run_sweep(const Scenario& sc, const SweepSpec& spec, const std::optional<std::string>& output_path,
              std::ostream& out, std::ostream& err);

int run_bifurcate(const Scenario& sc, double from, double to, int steps,
                  const std::optional<std::string>& output_path, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  int trials = 100;
  std::optional<std::uint64_t> seed;  ///< overrides the scenario seed
  double t_end = 5000.0;
  double tolerance = 1e-6;            ///< convergence ball radius, max-norm
  std::optional<std::string> output_path;  ///< JSON report
};

int run_verify(const Scenario& sc, const VerifyOptions& opts, std::ostream& out, std::ostream& err);

/// "%.17g".
std::string format_real(double v);

}  // namespace exclab::cli
