#pragma once

// Lyapunov certificates for the three models and a sampled monotonicity check.

#include <cstddef>
#include <optional>
#include <span>

#include "exclusion_lab/model.hpp"

namespace exclab {

/// g(x) = x - 1 - ln x. Throws DomainError for x <= 0.
double g(double x);

enum class LyapunovModel { Bare, TwoIdeology, Cross };
enum class LyapunovKind { IdeologyFree, Endemic };

const char* to_string(LyapunovModel m) noexcept;
const char* to_string(LyapunovKind k) noexcept;

struct LyapunovWeights {
  double a = 0.0;  ///< weight of the extremist g-term
  double b = 0.0;  ///< weight of the recruiter g-term
};

struct LyapunovSpec {
  LyapunovModel model = LyapunovModel::Bare;
  LyapunovKind kind = LyapunovKind::IdeologyFree;
  State anchor;
  /// Endemic kind only.
  std::optional<LyapunovWeights> weights;
  /// Two-ideology endemic kind: the ideology whose dominance point anchors W.
  int dominant = 1;
  ModelParams params;
};

/// Solves A q_E + B q_R = 1 and B c_E E* = A (c_R R* + q_E beta S* R*) for the
/// ideology present at the anchor, then checks the closed form
/// A = c_E / c_tilde, B = (mu + d_E + c_E) / c_tilde to 1e-10 relative.
/// Throws DegenerateWeightsError when the 2x2 system is singular.
LyapunovWeights solve_weights(const ModelParams& p, const State& anchor);

/// Builds the certificate for p. The model is Bare without ideology2,
/// TwoIdeology with delta = 0 and Cross with delta > 0. For the endemic kind
/// `dominant` picks x* (1) or x** (2); the anchor must be strictly positive
/// in that ideology's components, otherwise DomainError.
LyapunovSpec make_lyapunov_spec(const ModelParams& p, LyapunovKind kind, int dominant = 1);

/// Throws DomainError if a g-argument is <= 0.
double lyapunov_value(const LyapunovSpec& spec, const State& x);

struct DecreaseReport {
  bool passed = true;
  std::size_t samples = 0;
  /// Largest forward difference V(k+1) - V(k); <= 0 along a decreasing run.
  double max_increase = 0.0;
  /// Index k of the worst step relative to its allowance.
  std::size_t worst_step = 0;
  double first_value = 0.0;
  double last_value = 0.0;
};

/// A step passes when V(k+1) - V(k) <= 1e-9 (1 + |V(k)|).
DecreaseReport decrease_check(const LyapunovSpec& spec, std::span<const State> states);

/// Hypotheses of the cross-model global stability theorem for x**.
struct CrossDominanceHypotheses {
  bool r2_dominant = false;  ///< R2 > max(1, R1)
  double a = 0.0;            ///< c_E2 / c_tilde2
  double strict_bound = 0.0;   ///< c_E1 / c_tilde1
  double relaxed_bound = 0.0;  ///< strict_bound / (1 - (mu/Lambda) E2**)
  bool strict = false;   ///< r2_dominant and a < strict_bound
  bool relaxed = false;  ///< r2_dominant and a <= relaxed_bound
};

CrossDominanceHypotheses cross_dominance_hypotheses(const ModelParams& p);

}  // namespace exclab
