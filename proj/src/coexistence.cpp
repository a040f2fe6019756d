// Multistart damped Newton search for interior (coexistence) equilibria of
// the cross-interaction model. There is no closed form, so absence is only
// certified heuristically: every start either lands on a boundary root or
// leaves the positive orthant.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "exclusion_lab/analysis.hpp"
#include "exclusion_lab/errors.hpp"

namespace exclab {
namespace {

constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 40;
// Relative to the population scale; iterates this close to a face are
// boundary roots carrying Newton noise.
constexpr double kInteriorFloor = 1e-8;
constexpr double kDistinctRoots = 1e-6;

enum class Outcome { Converged, Diverged, Stalled };

struct NewtonResult {
  Outcome outcome = Outcome::Stalled;
  State x;
};

NewtonResult damped_newton(const ModelParams& p, State x) {
  const double scale = std::max(1.0, p.lambda);
  const double target = 1e-12 * scale;
  const double escape = 1e6 * std::max(1.0, p.carrying_level());

  State f = rhs_two(p, x);
  double fnorm = f.max_abs();
  for (int it = 0; it < kMaxIterations; ++it) {
    if (fnorm <= target) return {Outcome::Converged, x};

    std::vector<double> step;
    try {
      std::array<double, 5> minus_f{};
      for (std::size_t i = 0; i < 5; ++i) minus_f[i] = -f[i];
      step = solve_linear(jacobian_two(p, x), minus_f);
    } catch (const SingularMatrixError&) {
      return {Outcome::Stalled, x};
    }

    double damping = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, damping *= 0.5) {
      State trial = x;
      for (std::size_t i = 0; i < 5; ++i) trial[i] += damping * step[i];
      if (!trial.all_finite()) continue;
      const State ft = rhs_two(p, trial);
      const double tn = ft.max_abs();
      if (tn < fnorm) {
        x = trial;
        f = ft;
        fnorm = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No decrease possible: either sitting on a root at rounding level or stuck.
      return {fnorm <= 1e-10 * scale ? Outcome::Converged : Outcome::Stalled, x};
    }
    if (x.max_abs() > escape) return {Outcome::Diverged, x};
  }
  return {fnorm <= target ? Outcome::Converged : Outcome::Stalled, x};
}

// Adopter components (E, R) used to seed each ideology.
struct Seeds {
  double e1, r1, e2, r2;
};

Seeds dominance_seeds(const ModelParams& p) {
  const auto [r1, r2] = reproduction_numbers_two(p);
  const double fallback = 0.05 * p.carrying_level();
  std::array<double, 2> one{fallback, fallback};
  std::array<double, 2> two{fallback, fallback};
  if (r1 > 1.0) {
    const State xs = dominance_point(p, 1);
    one = {xs[idx::E1], xs[idx::R1]};
  }
  if (r2 > 1.0) {
    const State xss = dominance_point(p, 2);
    two = {xss[idx::E2], xss[idx::R2]};
  }
  if (r1 > 1.0 && !(r2 > 1.0)) two = one;
  if (r2 > 1.0 && !(r1 > 1.0)) one = two;
  return {one[0], one[1], two[0], two[1]};
}

}  // namespace

CoexistenceSearch coexistence_search(const ModelParams& p) {
  if (!p.two_ideology()) throw std::invalid_argument("coexistence_search: two-ideology model expected");
  validate(p);

  const Seeds seeds = dominance_seeds(p);
  constexpr std::array<double, 3> blends{0.25, 0.5, 0.75};
  CoexistenceSearch out;
  int converged = 0;

  for (int k = 1; k <= 9; ++k) {
    const double s = 0.1 * k * p.carrying_level();
    for (double w : blends) {
      ++out.starts;
      State x0{s, w * seeds.e1, w * seeds.r1, (1.0 - w) * seeds.e2, (1.0 - w) * seeds.r2};
      const NewtonResult res = damped_newton(p, x0);
      if (res.outcome == Outcome::Stalled) {
        ++out.stalled;
        continue;
      }
      if (res.outcome == Outcome::Diverged) {
        ++out.left_orthant;
        continue;
      }
      ++converged;
      const double lowest = *std::min_element(res.x.begin(), res.x.end());
      const double floor = kInteriorFloor * std::max(1.0, p.carrying_level());
      if (lowest < -floor) {
        ++out.left_orthant;
      } else if (lowest <= floor) {
        ++out.boundary_hits;
      } else {
        const bool known = std::any_of(out.roots.begin(), out.roots.end(), [&](const auto& r) {
          return distance_inf(r.state, res.x) <= kDistinctRoots;
        });
        if (!known) out.roots.push_back(make_report(p, EquilibriumKind::Coexistence, res.x));
      }
    }
  }

  if (converged == 0 && out.left_orthant == 0) {
    throw NoConvergenceError("coexistence search: Newton stalled from all " +
                             std::to_string(out.starts) + " starts");
  }
  return out;
}

std::optional<EquilibriumReport> coexistence_equilibrium(const ModelParams& p) {
  auto search = coexistence_search(p);
  if (search.roots.empty()) return std::nullopt;
  return std::move(search.roots.front());
}

}  // namespace exclab
