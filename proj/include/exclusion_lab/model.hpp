#pragma once

// Parameter and state types for the bare-bones (S, E, R) model and the
// two-ideology (S, E1, R1, E2, R2) model with optional cross-interaction,
// plus their right-hand sides and analytical Jacobians.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>

#include "exclusion_lab/linalg.hpp"

namespace exclab {

/// Rates and recruitment split for one ideology. The recruiter fraction q_R
/// is never stored: it is always 1 - q_E.
struct IdeologyParams {
  double beta = 0.0;  ///< transmission coefficient, 1/(population*time)
  double d_e = 0.0;   ///< extra extremist removal rate
  double d_r = 0.0;   ///< extra recruiter removal rate
  double c_e = 0.0;   ///< extremist -> recruiter switch rate
  double c_r = 0.0;   ///< recruiter -> extremist switch rate
  double q_e = 0.0;   ///< fraction of recruits entering the extremist class

  double q_r() const noexcept { return 1.0 - q_e; }
};

struct ModelParams {
  double lambda = 0.0;  ///< susceptible inflow
  double mu = 0.0;      ///< natural death rate
  IdeologyParams ideology1;
  std::optional<IdeologyParams> ideology2;
  double delta = 0.0;  ///< cross-interaction rate E1 -> E2; only meaningful with ideology2

  bool two_ideology() const noexcept { return ideology2.has_value(); }
  /// Lambda / mu, the susceptible level of the ideology-free equilibrium.
  double carrying_level() const noexcept { return lambda / mu; }
  std::size_t state_dim() const noexcept { return two_ideology() ? 5 : 3; }

  /// Ideology i in {1, 2}.
  const IdeologyParams& ideology(int i) const;
};

/// Throws ValidationError listing every offending field.
void validate(const ModelParams& p);

/// Compartment indices.
namespace idx {
inline constexpr std::size_t S = 0;
inline constexpr std::size_t E = 1;
inline constexpr std::size_t R = 2;
inline constexpr std::size_t E1 = 1;
inline constexpr std::size_t R1 = 2;
inline constexpr std::size_t E2 = 3;
inline constexpr std::size_t R2 = 4;
}  // namespace idx

/// Compartment populations. Size 3 is the bare-bones layout (S, E, R), size 5
/// the two-ideology layout (S, E1, R1, E2, R2). Other sizes are allowed for
/// generic vector fields.
class State {
 public:
  static constexpr std::size_t kCapacity = 5;

  State() = default;
  explicit State(std::size_t n);
  State(std::initializer_list<double> values);

  std::size_t size() const noexcept { return n_; }
  double& operator[](std::size_t i) noexcept { return v_[i]; }
  double operator[](std::size_t i) const noexcept { return v_[i]; }

  double* begin() noexcept { return v_.data(); }
  double* end() noexcept { return v_.data() + n_; }
  const double* begin() const noexcept { return v_.data(); }
  const double* end() const noexcept { return v_.data() + n_; }

  std::span<double> span() noexcept { return {v_.data(), n_}; }
  std::span<const double> span() const noexcept { return {v_.data(), n_}; }

  /// Sum of all compartments.
  double total() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;
  bool nonnegative() const noexcept;

  friend bool operator==(const State& a, const State& b) noexcept;

 private:
  std::array<double, kCapacity> v_{};
  std::size_t n_ = 0;
};

/// Max-norm distance; states must have equal size.
double distance_inf(const State& a, const State& b);

/// Per-ideology combinations that recur in every formula.
struct DerivedQuantities {
  double c_tilde = 0.0;  ///< c_E + q_R (mu + d_E)
  double big_d = 0.0;    ///< (mu + d_R + c_R)(mu + d_E + c_E) - c_E c_R
  double gamma = 0.0;    ///< beta * c_tilde / big_d
};

DerivedQuantities derived_quantities(const IdeologyParams& ip, double mu);

/// Total outflow rate of the extremist class, mu + d_E + c_E.
inline double extremist_outflow(const IdeologyParams& ip, double mu) { return mu + ip.d_e + ip.c_e; }
/// Total outflow rate of the recruiter class, mu + d_R + c_R.
inline double recruiter_outflow(const IdeologyParams& ip, double mu) { return mu + ip.d_r + ip.c_r; }

// Right-hand sides accept negative components; adaptive integrators probe
// slightly outside the orthant.
State rhs_bare(const ModelParams& p, const State& x);
State rhs_two(const ModelParams& p, const State& x);
/// Dispatches on p.two_ideology().
State rhs(const ModelParams& p, const State& x);

SmallMatrix jacobian_bare(const ModelParams& p, const State& x);
SmallMatrix jacobian_two(const ModelParams& p, const State& x);
SmallMatrix jacobian(const ModelParams& p, const State& x);

/// Max-norm of the right-hand side at x.
double residual(const ModelParams& p, const State& x);

std::string format_state(const State& x);

}  // namespace exclab
