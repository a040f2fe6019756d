#pragma once

// Equilibria, reproduction and invasion numbers, cross-interaction
// thresholds, regime classification and local stability.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exclusion_lab/linalg.hpp"
#include "exclusion_lab/model.hpp"

namespace exclab {

enum class EquilibriumKind { IdeologyFree, BareEndemic, Dominance1, Dominance2, Coexistence };
enum class Stability { Stable, Unstable, Marginal };

const char* to_string(EquilibriumKind k) noexcept;
const char* to_string(Stability s) noexcept;

/// Real parts within this margin of zero are classified Marginal.
inline constexpr double kStabilityMargin = 1e-9;

struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::IdeologyFree;
  State state;
  EigenSet eigenvalues;
  Stability stability = Stability::Marginal;
  double residual = 0.0;  ///< max-norm of the right-hand side at state
};

// --- reproduction numbers -------------------------------------------------

/// Lambda * beta * c_tilde / (mu * D) for the bare-bones model.
double r0_bare(const ModelParams& p);

/// (R1, R2) for the two-ideology model.
std::pair<double, double> reproduction_numbers_two(const ModelParams& p);

struct NextGenerationPair {
  SmallMatrix f;  ///< new adoptions
  SmallMatrix v;  ///< transfers between the adopter classes
  SmallMatrix n() const { return right_divide(f, v); }
};

/// F and V for one ideology's adopter classes (E, R) evaluated where the
/// susceptible level is s_bar. extra_gain is added to F(0,0) (delta * E1*
/// when ideology two invades x*), extra_loss to V(0,0) (delta * E2** when
/// ideology one invades x**).
NextGenerationPair ngm_build(const IdeologyParams& ip, double mu, double s_bar,
                             double extra_gain = 0.0, double extra_loss = 0.0);

// --- equilibria -------------------------------------------------------------

/// (1/Gamma, E*, R*) from the closed form, regardless of sign. Components
/// are positive exactly when R0 > 1 and coincide with x0 when R0 = 1.
State endemic_point_bare(const ModelParams& p);

/// Ideology-i dominance point embedded in the five-dimensional layout,
/// regardless of sign.
State dominance_point(const ModelParams& p, int ideology);

std::vector<EquilibriumReport> equilibria_bare(const ModelParams& p);
/// x0 always, x* iff R1 > 1, x** iff R2 > 1.
std::vector<EquilibriumReport> boundary_equilibria_two(const ModelParams& p);

/// Builds a report (residual, eigenvalues, stability) for a known equilibrium.
EquilibriumReport make_report(const ModelParams& p, EquilibriumKind kind, const State& x);

// --- invasion numbers and thresholds ----------------------------------------

struct InvasionNumbers {
  std::optional<double> i1;  ///< ideology one invading x**; needs R2 > 1
  std::optional<double> i2;  ///< ideology two invading x*; needs R1 > 1
};

InvasionNumbers invasion_numbers_delta(const ModelParams& p);

enum class ThresholdStatus {
  Positive,         ///< genuine crossing at a positive delta
  NonPositive,      ///< formula value <= 0; no crossing for delta > 0
  NotACrossing,     ///< positive root of det(I - N) but the spectral radius never equals 1
  ZeroDenominator,  ///< formula undefined
};

const char* to_string(ThresholdStatus s) noexcept;

struct Threshold {
  double value = 0.0;  ///< NaN when status is ZeroDenominator
  ThresholdStatus status = ThresholdStatus::NonPositive;

  bool is_positive() const noexcept { return status == ThresholdStatus::Positive; }
};

struct DeltaThresholds {
  std::optional<Threshold> delta_star;       ///< I2(delta) = 1; needs R1 > 1
  std::optional<Threshold> delta_star_star;  ///< I1(delta) = 1; needs R2 > 1
  std::optional<double> sigma;               ///< delta** - delta*, both positive
};

DeltaThresholds delta_thresholds(const ModelParams& p);

// --- regimes -----------------------------------------------------------------

enum class RegimeLabel {
  AllSubcritical,
  Endemic,  ///< bare-bones model with R0 > 1
  Situation1,
  Situation2A,
  Situation2B,
  Situation2C,
  Situation3,
  Situation4,
};

const char* to_string(RegimeLabel r) noexcept;

struct RegimeReport {
  std::optional<double> r0;
  std::optional<double> r1;
  std::optional<double> r2;
  double delta = 0.0;
  InvasionNumbers invasion;
  DeltaThresholds thresholds;
  RegimeLabel label = RegimeLabel::AllSubcritical;
  /// Set when the parameters sit on a measure-zero boundary of the partition.
  bool degenerate = false;
  std::vector<std::string> notes;
};

RegimeReport classify_regime(const ModelParams& p);

// --- stability ---------------------------------------------------------------

Stability classify_spectrum(const EigenSet& ev, double margin = kStabilityMargin);

/// Requires residual(p, eq) <= 1e-8 * max(1, Lambda).
std::pair<EigenSet, Stability> local_stability(const ModelParams& p, const State& eq);

// --- coexistence ---------------------------------------------------------------

struct CoexistenceSearch {
  /// Distinct interior roots ordered by the index of the start that found them.
  std::vector<EquilibriumReport> roots;
  int starts = 0;
  int boundary_hits = 0;   ///< starts converging to a root on the orthant boundary
  int left_orthant = 0;    ///< starts converging outside the orthant or diverging away
  int stalled = 0;         ///< starts hitting the iteration cap
};

/// Damped Newton multistart for interior equilibria. Throws
/// NoConvergenceError when no start converges and none left the orthant.
CoexistenceSearch coexistence_search(const ModelParams& p);

/// First root of coexistence_search, or nullopt when absent.
std::optional<EquilibriumReport> coexistence_equilibrium(const ModelParams& p);

/// Everything the CLI reports for one parameter set.
struct Analysis {
  RegimeReport regime;
  std::vector<EquilibriumReport> equilibria;
};

Analysis analyze(const ModelParams& p);

}  // namespace exclab
