#include "exclusion_lab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "exclusion_lab/errors.hpp"

namespace exclab {

const char* to_string(EquilibriumKind k) noexcept {
  switch (k) {
    case EquilibriumKind::IdeologyFree: return "IdeologyFree";
    case EquilibriumKind::BareEndemic: return "BareEndemic";
    case EquilibriumKind::Dominance1: return "Dominance1";
    case EquilibriumKind::Dominance2: return "Dominance2";
    case EquilibriumKind::Coexistence: return "Coexistence";
  }
  return "Unknown";
}

const char* to_string(Stability s) noexcept {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::Marginal: return "Marginal";
  }
  return "Unknown";
}

const char* to_string(ThresholdStatus s) noexcept {
  switch (s) {
    case ThresholdStatus::Positive: return "Positive";
    case ThresholdStatus::NonPositive: return "NonPositive";
    case ThresholdStatus::NotACrossing: return "NotACrossing";
    case ThresholdStatus::ZeroDenominator: return "ZeroDenominator";
  }
  return "Unknown";
}

const char* to_string(RegimeLabel r) noexcept {
  switch (r) {
    case RegimeLabel::AllSubcritical: return "AllSubcritical";
    case RegimeLabel::Endemic: return "Endemic";
    case RegimeLabel::Situation1: return "Situation1";
    case RegimeLabel::Situation2A: return "Situation2A";
    case RegimeLabel::Situation2B: return "Situation2B";
    case RegimeLabel::Situation2C: return "Situation2C";
    case RegimeLabel::Situation3: return "Situation3";
    case RegimeLabel::Situation4: return "Situation4";
  }
  return "Unknown";
}

namespace {

void require_bare(const ModelParams& p, const char* who) {
  if (p.two_ideology()) throw std::invalid_argument(std::string(who) + ": bare-bones model expected");
}

void require_two(const ModelParams& p, const char* who) {
  if (!p.two_ideology()) throw std::invalid_argument(std::string(who) + ": two-ideology model expected");
}

double reproduction_number(const IdeologyParams& ip, const ModelParams& p) {
  return p.carrying_level() * derived_quantities(ip, p.mu).gamma;
}

// (S, E, R) of the single-ideology endemic point from the closed form.
State single_endemic(const IdeologyParams& ip, const ModelParams& p) {
  const auto dq = derived_quantities(ip, p.mu);
  const double s = 1.0 / dq.gamma;
  const double r = p.mu / ip.beta * (p.carrying_level() * dq.gamma - 1.0);
  const double e = (ip.beta / dq.gamma - (p.mu + ip.d_r)) / (p.mu + ip.d_e) * r;
  return State{s, e, r};
}

bool nearly_equal(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double r0_bare(const ModelParams& p) {
  require_bare(p, "r0_bare");
  return reproduction_number(p.ideology1, p);
}

std::pair<double, double> reproduction_numbers_two(const ModelParams& p) {
  require_two(p, "reproduction_numbers_two");
  return {reproduction_number(p.ideology1, p), reproduction_number(*p.ideology2, p)};
}

NextGenerationPair ngm_build(const IdeologyParams& ip, double mu, double s_bar, double extra_gain,
                             double extra_loss) {
  if (!(s_bar > 0.0)) throw std::invalid_argument("ngm_build: susceptible level must be positive");
  if (extra_gain < 0.0 || extra_loss < 0.0) {
    throw std::invalid_argument("ngm_build: cross-interaction terms must be nonnegative");
  }
  NextGenerationPair out{SmallMatrix(2), SmallMatrix(2)};
  out.f(0, 0) = extra_gain;
  out.f(0, 1) = ip.q_e * ip.beta * s_bar;
  out.f(1, 1) = ip.q_r() * ip.beta * s_bar;
  out.v(0, 0) = extremist_outflow(ip, mu) + extra_loss;
  out.v(0, 1) = -ip.c_r;
  out.v(1, 0) = -ip.c_e;
  out.v(1, 1) = recruiter_outflow(ip, mu);
  return out;
}

State endemic_point_bare(const ModelParams& p) {
  require_bare(p, "endemic_point_bare");
  return single_endemic(p.ideology1, p);
}

State dominance_point(const ModelParams& p, int ideology) {
  require_two(p, "dominance_point");
  const State single = single_endemic(p.ideology(ideology), p);
  State x(5);
  x[idx::S] = single[idx::S];
  if (ideology == 1) {
    x[idx::E1] = single[idx::E];
    x[idx::R1] = single[idx::R];
  } else {
    x[idx::E2] = single[idx::E];
    x[idx::R2] = single[idx::R];
  }
  return x;
}

Stability classify_spectrum(const EigenSet& ev, double margin) {
  const double top = ev.max_real_part();
  if (top < -margin) return Stability::Stable;
  if (top > margin) return Stability::Unstable;
  return Stability::Marginal;
}

std::pair<EigenSet, Stability> local_stability(const ModelParams& p, const State& eq) {
  const double res = residual(p, eq);
  if (!(res <= 1e-8 * std::max(1.0, p.lambda))) {
    throw std::invalid_argument("local_stability: state is not an equilibrium (residual " +
                                std::to_string(res) + ")");
  }
  EigenSet ev = eigenvalues(jacobian(p, eq));
  const Stability s = classify_spectrum(ev);
  return {std::move(ev), s};
}

EquilibriumReport make_report(const ModelParams& p, EquilibriumKind kind, const State& x) {
  EquilibriumReport rep;
  rep.kind = kind;
  rep.state = x;
  rep.residual = residual(p, x);
  auto [ev, st] = local_stability(p, x);
  rep.eigenvalues = std::move(ev);
  rep.stability = st;
  return rep;
}

std::vector<EquilibriumReport> equilibria_bare(const ModelParams& p) {
  require_bare(p, "equilibria_bare");
  std::vector<EquilibriumReport> out;
  out.push_back(make_report(p, EquilibriumKind::IdeologyFree, State{p.carrying_level(), 0.0, 0.0}));
  if (r0_bare(p) > 1.0) {
    out.push_back(make_report(p, EquilibriumKind::BareEndemic, endemic_point_bare(p)));
  }
  return out;
}

std::vector<EquilibriumReport> boundary_equilibria_two(const ModelParams& p) {
  require_two(p, "boundary_equilibria_two");
  const auto [r1, r2] = reproduction_numbers_two(p);
  std::vector<EquilibriumReport> out;
  out.push_back(make_report(p, EquilibriumKind::IdeologyFree,
                            State{p.carrying_level(), 0.0, 0.0, 0.0, 0.0}));
  if (r1 > 1.0) out.push_back(make_report(p, EquilibriumKind::Dominance1, dominance_point(p, 1)));
  if (r2 > 1.0) out.push_back(make_report(p, EquilibriumKind::Dominance2, dominance_point(p, 2)));
  return out;
}

InvasionNumbers invasion_numbers_delta(const ModelParams& p) {
  require_two(p, "invasion_numbers_delta");
  const auto [r1, r2] = reproduction_numbers_two(p);
  const auto& i1 = p.ideology1;
  const auto& i2 = *p.ideology2;
  InvasionNumbers out;

  if (r1 > 1.0) {
    // Ideology two invading x*: N = F V^{-1} with the delta*E1* inflow term.
    const State xs = dominance_point(p, 1);
    const double y = p.delta * xs[idx::E1];
    const double sb = i2.beta * xs[idx::S];
    const double d2 = derived_quantities(i2, p.mu).big_d;
    const double a_r = recruiter_outflow(i2, p.mu);
    const double b_e = extremist_outflow(i2, p.mu);
    const double a = (y * a_r + i2.q_e * sb * i2.c_e) / d2;
    const double b = (y * i2.c_r + i2.q_e * sb * b_e) / d2;
    const double c = i2.q_r() * sb * i2.c_e / d2;
    const double d = i2.q_r() * sb * b_e / d2;
    out.i2 = 0.5 * ((a + d) + std::sqrt((a - d) * (a - d) + 4.0 * b * c));
  }
  if (r2 > 1.0) {
    // Ideology one invading x**: rank-one N, spectral radius = trace.
    const State xss = dominance_point(p, 2);
    const double x = p.delta * xss[idx::E2];
    const auto dq1 = derived_quantities(i1, p.mu);
    out.i1 = i1.beta * xss[idx::S] * (dq1.c_tilde + i1.q_r() * x) /
             (dq1.big_d + x * recruiter_outflow(i1, p.mu));
  }
  return out;
}

DeltaThresholds delta_thresholds(const ModelParams& p) {
  require_two(p, "delta_thresholds");
  const auto [r1, r2] = reproduction_numbers_two(p);
  const auto& i1 = p.ideology1;
  const auto& i2 = *p.ideology2;
  DeltaThresholds out;

  // Both thresholds solve det(I - N) = 0, which is linear in delta.
  auto make = [](double num, double den, bool crossing_possible) {
    Threshold t;
    if (den == 0.0 || !std::isfinite(num / den)) {
      t.value = std::numeric_limits<double>::quiet_NaN();
      t.status = ThresholdStatus::ZeroDenominator;
      return t;
    }
    t.value = num / den;
    if (!(t.value > 0.0)) {
      t.status = ThresholdStatus::NonPositive;
    } else {
      t.status = crossing_possible ? ThresholdStatus::Positive : ThresholdStatus::NotACrossing;
    }
    return t;
  };

  if (r1 > 1.0) {
    const double e1s = dominance_point(p, 1)[idx::E1];
    const auto dq2 = derived_quantities(i2, p.mu);
    const double k2 = i2.c_r + i2.q_e * (p.mu + i2.d_r);
    const double num = dq2.c_tilde * dq2.big_d * (r1 - r2);
    const double den = e1s * (i2.q_r() * dq2.big_d * (r1 - r2) + r1 * i2.c_e * k2);
    // I2 starts at R2/R1 and increases without bound, so it crosses 1 iff R1 > R2.
    out.delta_star = make(num, den, r1 > r2);
  }
  if (r2 > 1.0) {
    const double e2ss = dominance_point(p, 2)[idx::E2];
    const auto dq1 = derived_quantities(i1, p.mu);
    const double k1 = i1.c_r + i1.q_e * (p.mu + i1.d_r);
    const double num = dq1.c_tilde * dq1.big_d * (r1 - r2);
    const double den = e2ss * (i1.q_r() * dq1.big_d * (r2 - r1) + r2 * i1.c_e * k1);
    // N is rank one here, so any root of det(I - N) is a genuine crossing.
    out.delta_star_star = make(num, den, true);
  }
  if (out.delta_star && out.delta_star_star && out.delta_star->is_positive() &&
      out.delta_star_star->is_positive()) {
    out.sigma = out.delta_star_star->value - out.delta_star->value;
  }
  return out;
}

RegimeReport classify_regime(const ModelParams& p) {
  validate(p);
  constexpr double tol = 1e-12;
  RegimeReport rep;
  rep.delta = p.delta;

  if (!p.two_ideology()) {
    const double r0 = r0_bare(p);
    rep.r0 = r0;
    rep.label = r0 > 1.0 ? RegimeLabel::Endemic : RegimeLabel::AllSubcritical;
    if (nearly_equal(r0, 1.0, tol)) {
      rep.degenerate = true;
      rep.notes.emplace_back("R0 = 1: transcritical point, x* coincides with x0");
    }
    return rep;
  }

  const auto [r1, r2] = reproduction_numbers_two(p);
  rep.r1 = r1;
  rep.r2 = r2;
  rep.invasion = invasion_numbers_delta(p);
  rep.thresholds = delta_thresholds(p);

  if (nearly_equal(r1, 1.0, tol)) {
    rep.degenerate = true;
    rep.notes.emplace_back("R1 = 1");
  }
  if (nearly_equal(r2, 1.0, tol)) {
    rep.degenerate = true;
    rep.notes.emplace_back("R2 = 1");
  }

  if (r1 <= 1.0 && r2 <= 1.0) {
    rep.label = RegimeLabel::AllSubcritical;
  } else if (r2 <= 1.0) {
    rep.label = RegimeLabel::Situation3;
  } else if (r1 <= 1.0) {
    rep.label = RegimeLabel::Situation4;
  } else if (r1 < r2) {
    rep.label = RegimeLabel::Situation1;
  } else {
    const auto& ds = rep.thresholds.delta_star;
    const auto& dss = rep.thresholds.delta_star_star;
    if (!dss || !dss->is_positive()) {
      rep.label = RegimeLabel::Situation2A;
    } else if (ds && ds->is_positive() && dss->value < ds->value) {
      rep.label = RegimeLabel::Situation2B;
    } else {
      rep.label = RegimeLabel::Situation2C;
    }
    if (ds && dss && ds->is_positive() && dss->is_positive() &&
        nearly_equal(ds->value, dss->value, tol)) {
      rep.degenerate = true;
      rep.notes.emplace_back("delta* = delta**: sigma = 0");
    }
  }

  if (r1 > 1.0 && r2 > 1.0 && nearly_equal(r1, r2, tol)) {
    rep.degenerate = true;
    rep.notes.emplace_back("R1 = R2: thresholds vanish; at delta = 0 a continuum of equilibria exists");
  }
  for (const auto* t : {&rep.thresholds.delta_star, &rep.thresholds.delta_star_star}) {
    if (*t && (*t)->is_positive() && nearly_equal(p.delta, (*t)->value, tol)) {
      rep.degenerate = true;
      rep.notes.emplace_back(t == &rep.thresholds.delta_star ? "delta = delta*" : "delta = delta**");
    }
  }
  return rep;
}

Analysis analyze(const ModelParams& p) {
  Analysis out;
  out.regime = classify_regime(p);
  if (!p.two_ideology()) {
    out.equilibria = equilibria_bare(p);
    return out;
  }
  out.equilibria = boundary_equilibria_two(p);
  if (p.delta > 0.0) {
    auto search = coexistence_search(p);
    for (auto& root : search.roots) out.equilibria.push_back(std::move(root));
  }
  return out;
}

}  // namespace exclab
