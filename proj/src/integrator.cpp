#include "exclusion_lab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "exclusion_lab/errors.hpp"

namespace exclab {

void IntegratorConfig::validate() const {
  std::vector<FieldIssue> issues;
  auto positive = [&](const char* name, double v) {
    if (!(std::isfinite(v) && v > 0.0)) issues.push_back({name, "must be finite and > 0"});
  };
  positive("integrator.rtol", rtol);
  positive("integrator.atol", atol);
  positive("integrator.sample_interval", sample_interval);
  if (!(std::isfinite(initial_step) && initial_step >= 0.0)) {
    issues.push_back({"integrator.initial_step", "must be finite and >= 0"});
  }
  if (!(std::isfinite(max_step) && max_step >= 0.0)) issues.push_back({"integrator.max_step", "must be finite and >= 0"});
  if (max_steps < 1) issues.push_back({"integrator.max_steps", "must be >= 1"});
  if (fixed_step) positive("integrator.fixed_step", *fixed_step);
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// Fifth-order minus embedded fourth-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// PI controller constants.
constexpr double kBeta = 0.04;
constexpr double kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;   // smallest step ratio
constexpr double kFacMax = 10.0;  // largest step ratio

State combine(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double acc = 0.0;
    for (const auto& [w, k] : terms) acc += w * (*k)[i];
    out[i] += h * acc;
  }
  return out;
}

double scaled_norm(const State& v, const State& y0, const State& y1, double rtol, double atol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    sum += (v[i] / sk) * (v[i] / sk);
  }
  return std::sqrt(sum / static_cast<double>(v.size()));
}

double initial_step(const VectorField& f, double t0, const State& y0, const State& f0, double span,
                    const IntegratorConfig& cfg, std::size_t& evals) {
  const double d0 = scaled_norm(y0, y0, y0, cfg.rtol, cfg.atol);
  const double d1 = scaled_norm(f0, y0, y0, cfg.rtol, cfg.atol);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  const State y1 = combine(y0, h0, {{1.0, &f0}});
  const State f1 = f(t0 + h0, y1);
  ++evals;
  State df = f1;
  for (std::size_t i = 0; i < df.size(); ++i) df[i] -= f0[i];
  const double d2 = scaled_norm(df, y0, y0, cfg.rtol, cfg.atol) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span});
}

[[noreturn]] void fail(IntegrationFailure kind, double t, const std::string& detail) {
  throw IntegrationError(kind, std::string("integrate: ") + to_string(kind) + " at t=" + std::to_string(t) +
                                   (detail.empty() ? "" : ": " + detail));
}

void check_floor(const State& y, double t, std::optional<double> floor) {
  if (!floor) return;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < *floor) {
      fail(IntegrationFailure::NegativeState, t,
           "component " + std::to_string(i) + " = " + std::to_string(y[i]));
    }
  }
}

}  // namespace

Trajectory integrate(const VectorField& f, const State& x0, double t0, double t_end,
                     const IntegratorConfig& cfg, std::optional<double> negative_floor) {
  cfg.validate();
  if (!(std::isfinite(t0) && std::isfinite(t_end) && t_end >= t0)) {
    throw ValidationError("t_end", "must be finite and >= t0");
  }
  if (!x0.all_finite()) fail(IntegrationFailure::NonFinite, t0, "initial state");

  Trajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(x0);
  const double span = t_end - t0;
  if (span == 0.0) return traj;

  auto& st = traj.stats;
  State y = x0;
  State k1 = f(t0, y);
  ++st.rhs_evaluations;
  if (!k1.all_finite()) fail(IntegrationFailure::NonFinite, t0, "right-hand side");

  const double hmax = cfg.max_step > 0.0 ? std::min(cfg.max_step, span) : span;
  double h;
  if (cfg.fixed_step) {
    h = std::min(*cfg.fixed_step, span);
  } else if (cfg.initial_step > 0.0) {
    h = std::min(cfg.initial_step, hmax);
  } else {
    h = std::min(initial_step(f, t0, y, k1, span, cfg, st.rhs_evaluations), hmax);
  }

  double t = t0;
  std::size_t next_k = 1;
  auto sample_time = [&](std::size_t k) {
    const double ts = t0 + static_cast<double>(k) * cfg.sample_interval;
    return ts >= t_end - 1e-9 * cfg.sample_interval ? t_end : ts;
  };
  double t_next = sample_time(next_k);
  double facold = 1e-4;
  bool last_nonfinite = false;
  const double hmin = 1e-14 * span;

  while (true) {
    if (st.accepted + st.rejected >= cfg.max_steps) {
      fail(IntegrationFailure::StepLimitExceeded, t, std::to_string(cfg.max_steps) + " steps");
    }
    if (h < hmin) {
      fail(last_nonfinite ? IntegrationFailure::NonFinite : IntegrationFailure::StepUnderflow, t,
           "step " + std::to_string(h));
    }

    // Clip to the next sample time, absorbing rounding slivers. Adaptive steps
    // also avoid leaving a gap shorter than half a step.
    double hs = h;
    bool hits = false;
    if (t + hs >= t_next - 1e-9 * hs) {
      hs = t_next - t;
      hits = true;
    } else if (!cfg.fixed_step && t + 1.5 * hs > t_next) {
      hs = 0.5 * (t_next - t);
    }

    const State k2 = f(t + c2 * hs, combine(y, hs, {{a21, &k1}}));
    const State k3 = f(t + c3 * hs, combine(y, hs, {{a31, &k1}, {a32, &k2}}));
    const State k4 = f(t + c4 * hs, combine(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = f(t + c5 * hs, combine(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = f(t + hs, combine(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State y1 = combine(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const State k7 = f(t + hs, y1);
    st.rhs_evaluations += 6;

    if (cfg.fixed_step) {
      if (!y1.all_finite() || !k7.all_finite()) fail(IntegrationFailure::NonFinite, t + hs, "state");
      ++st.accepted;
    } else {
      State err = combine(State(y.size()), hs,
                          {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
      const double en = scaled_norm(err, y, y1, cfg.rtol, cfg.atol);
      if (!std::isfinite(en) || !y1.all_finite() || !k7.all_finite()) {
        ++st.rejected;
        last_nonfinite = true;
        h = hs * kFacMin;
        continue;
      }
      last_nonfinite = false;
      const double fac11 = std::pow(en, kExpo1);
      if (en > 1.0) {
        ++st.rejected;
        h = hs / std::min(1.0 / kFacMin, fac11 / kSafety);
        continue;
      }
      ++st.accepted;
      st.max_error_estimate = std::max(st.max_error_estimate, en);
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
      facold = std::max(en, 1e-4);
      // A clipped step says nothing about how large the next one may be.
      h = std::min(hits ? std::max(h, hs / fac) : hs / fac, hmax);
    }

    t = hits ? t_next : t + hs;
    y = y1;
    k1 = k7;
    check_floor(y, t, negative_floor);

    if (hits) {
      traj.times.push_back(t);
      traj.states.push_back(y);
      if (t_next == t_end) break;
      t_next = sample_time(++next_k);
    }
  }
  return traj;
}

Trajectory integrate(const ModelParams& p, const State& x0, double t0, double t_end, const IntegratorConfig& cfg) {
  validate(p);
  if (x0.size() != p.state_dim()) {
    throw ValidationError("initial", "expected " + std::to_string(p.state_dim()) + " components, got " +
                                         std::to_string(x0.size()));
  }
  std::vector<FieldIssue> issues;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (!(std::isfinite(x0[i]) && x0[i] >= 0.0)) {
      issues.push_back({"initial[" + std::to_string(i) + "]", "must be finite and >= 0"});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  auto field = [&p](double, const State& x) { return rhs(p, x); };
  return integrate(field, x0, t0, t_end, cfg, -kNegativeTolerance);
}

RegionReport invariant_region_check(const Trajectory& traj, const ModelParams& p) {
  RegionReport rep;
  if (traj.states.empty()) return rep;
  const double cap = p.carrying_level();
  const State& first = traj.states.front();
  const double total0 = first.total();
  rep.started_inside = first.nonnegative() && total0 <= cap;
  const double slack = 1e-8 * std::max(cap, total0);
  rep.min_component = HUGE_VAL;
  rep.max_excess = -HUGE_VAL;
  rep.max_comparison_excess = -HUGE_VAL;
  const double t0 = traj.times.front();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const State& x = traj.states[k];
    for (double v : x) rep.min_component = std::min(rep.min_component, v);
    const double total = x.total();
    const double bound = (total0 - cap) * std::exp(-p.mu * (traj.times[k] - t0)) + cap;
    rep.max_comparison_excess = std::max(rep.max_comparison_excess, total - bound);
    rep.max_excess = std::max(rep.max_excess, total - cap);
  }
  if (rep.min_component < -kNegativeTolerance) rep.passed = false;
  if (rep.started_inside && rep.max_excess > 1e-8 * cap) rep.passed = false;
  if (rep.max_comparison_excess > slack) rep.passed = false;
  return rep;
}

ConvergenceReport convergence_check(const Trajectory& traj, const State& target, double tol) {
  ConvergenceReport rep;
  if (traj.states.empty()) throw std::invalid_argument("convergence_check: empty trajectory");
  rep.final_distance = distance_inf(traj.final_state(), target);
  if (!(rep.final_distance <= tol)) return rep;
  std::size_t k = traj.size();
  while (k > 0 && distance_inf(traj.states[k - 1], target) <= tol) --k;
  rep.converged = true;
  rep.entry_time = traj.times[k];
  return rep;
}

}  // namespace exclab
