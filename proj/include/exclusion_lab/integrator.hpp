#pragma once

// Dormand-Prince 5(4) integration with PI step control, sampled on a fixed
// time grid, plus trajectory checks.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "exclusion_lab/model.hpp"

namespace exclab {

struct IntegratorConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  ///< 0 selects a starting step automatically
  double max_step = 0.0;      ///< 0 means unbounded
  std::size_t max_steps = 10'000'000;
  double sample_interval = 1.0;
  /// Disables error control and takes steps of this size (clipped at sample
  /// times). Used for convergence-order measurements.
  std::optional<double> fixed_step;

  /// Throws ValidationError naming each bad field.
  void validate() const;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  double max_error_estimate = 0.0;  ///< largest scaled error norm of an accepted step
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  IntegratorStats stats;

  std::size_t size() const noexcept { return times.size(); }
  const State& final_state() const { return states.back(); }
};

using VectorField = std::function<State(double t, const State& x)>;

/// Samples at t0 + k * sample_interval and at t_end. When negative_floor is
/// set, any accepted state with a component below it raises NegativeState.
Trajectory integrate(const VectorField& f, const State& x0, double t0, double t_end,
                     const IntegratorConfig& cfg = {},
                     std::optional<double> negative_floor = std::nullopt);

/// Model integration. x0 must be componentwise >= 0; undershoot below -1e-8
/// during the run raises IntegrationError(NegativeState).
Trajectory integrate(const ModelParams& p, const State& x0, double t0, double t_end,
                     const IntegratorConfig& cfg = {});

inline constexpr double kNegativeTolerance = 1e-8;

struct RegionReport {
  bool passed = true;
  bool started_inside = false;   ///< T(0) <= Lambda/mu and all components >= 0
  double min_component = 0.0;
  /// max over samples of T(t) - Lambda/mu (checked only when started inside).
  double max_excess = 0.0;
  /// max over samples of T(t) minus the comparison bound.
  double max_comparison_excess = 0.0;
};

RegionReport invariant_region_check(const Trajectory& traj, const ModelParams& p);

struct ConvergenceReport {
  bool converged = false;
  /// Time after which every sample stays within tol of the target.
  std::optional<double> entry_time;
  double final_distance = 0.0;
};

ConvergenceReport convergence_check(const Trajectory& traj, const State& target, double tol);

}  // namespace exclab
