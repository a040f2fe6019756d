#include "exclusion_lab/lyapunov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "exclusion_lab/analysis.hpp"
#include "exclusion_lab/errors.hpp"

namespace exclab {

double g(double x) {
  if (!(x > 0.0)) throw DomainError("g: argument must be > 0 (got " + std::to_string(x) + ")");
  return x - 1.0 - std::log(x);
}

const char* to_string(LyapunovModel m) noexcept {
  switch (m) {
    case LyapunovModel::Bare: return "bare";
    case LyapunovModel::TwoIdeology: return "two_ideology";
    case LyapunovModel::Cross: return "cross";
  }
  return "?";
}

const char* to_string(LyapunovKind k) noexcept {
  switch (k) {
    case LyapunovKind::IdeologyFree: return "U";
    case LyapunovKind::Endemic: return "W";
  }
  return "?";
}

namespace {

struct Compartments {
  std::size_t e, r;
};

Compartments slots(const ModelParams& p, int ideology) {
  if (!p.two_ideology()) return {idx::E, idx::R};
  return ideology == 1 ? Compartments{idx::E1, idx::R1} : Compartments{idx::E2, idx::R2};
}

// Linear part of U for one ideology: (c_E E + (mu+d_E+c_E) R) / c_tilde.
double linear_terms(const IdeologyParams& ip, double mu, double e, double r) {
  const double ct = derived_quantities(ip, mu).c_tilde;
  return (ip.c_e * e + extremist_outflow(ip, mu) * r) / ct;
}

double g_term(double anchor, double value) { return anchor * g(value / anchor); }

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

LyapunovWeights solve_weights(const ModelParams& p, const State& anchor) {
  if (anchor.size() != p.state_dim()) throw std::invalid_argument("solve_weights: anchor dimension mismatch");
  int ideology = 1;
  if (p.two_ideology()) ideology = anchor[idx::E2] > 0.0 ? 2 : 1;
  const auto [e_slot, r_slot] = slots(p, ideology);
  const IdeologyParams& ip = p.ideology(ideology);
  const double s = anchor[idx::S], e = anchor[e_slot], r = anchor[r_slot];
  if (!(s > 0.0 && e > 0.0 && r > 0.0)) {
    throw DomainError("solve_weights: anchor must be positive in the dominant ideology");
  }

  SmallMatrix m{{ip.q_e, ip.q_r()}, {-(ip.c_r * r + ip.q_e * ip.beta * s * r), ip.c_e * e}};
  const std::array<double, 2> rhs{1.0, 0.0};
  std::vector<double> ab;
  try {
    ab = solve_linear(m, rhs);
  } catch (const SingularMatrixError& err) {
    throw DegenerateWeightsError(std::string("solve_weights: ") + err.what());
  }
  LyapunovWeights w{ab[0], ab[1]};
  if (!(w.a > 0.0 && w.b > 0.0)) throw DegenerateWeightsError("solve_weights: weights not positive");

  const double ct = derived_quantities(ip, p.mu).c_tilde;
  if (!close_rel(w.a, ip.c_e / ct, 1e-10) || !close_rel(w.b, extremist_outflow(ip, p.mu) / ct, 1e-10)) {
    throw NumericalError("solve_weights: solved weights disagree with the closed form; anchor is not an equilibrium");
  }
  return w;
}

LyapunovSpec make_lyapunov_spec(const ModelParams& p, LyapunovKind kind, int dominant) {
  validate(p);
  LyapunovSpec spec;
  spec.params = p;
  spec.kind = kind;
  if (!p.two_ideology()) {
    spec.model = LyapunovModel::Bare;
  } else {
    spec.model = p.delta > 0.0 ? LyapunovModel::Cross : LyapunovModel::TwoIdeology;
  }

  if (kind == LyapunovKind::IdeologyFree) {
    spec.anchor = State(p.state_dim());
    spec.anchor[idx::S] = p.carrying_level();
    return spec;
  }

  if (dominant != 1 && dominant != 2) throw std::invalid_argument("make_lyapunov_spec: dominant must be 1 or 2");
  if (!p.two_ideology() && dominant != 1) throw std::invalid_argument("make_lyapunov_spec: bare model has one ideology");
  spec.dominant = dominant;
  spec.anchor = p.two_ideology() ? dominance_point(p, dominant) : endemic_point_bare(p);
  spec.weights = solve_weights(p, spec.anchor);
  return spec;
}

double lyapunov_value(const LyapunovSpec& spec, const State& x) {
  const ModelParams& p = spec.params;
  if (x.size() != p.state_dim()) throw std::invalid_argument("lyapunov_value: state dimension mismatch");
  const double mu = p.mu;

  if (spec.kind == LyapunovKind::IdeologyFree) {
    if (spec.model == LyapunovModel::Cross) {
      const auto& i1 = p.ideology1;
      const auto& i2 = *p.ideology2;
      return x[idx::E1] + extremist_outflow(i1, mu) / i1.c_e * x[idx::R1] + x[idx::E2] +
             extremist_outflow(i2, mu) / i2.c_e * x[idx::R2];
    }
    double v = g_term(spec.anchor[idx::S], x[idx::S]);
    if (spec.model == LyapunovModel::Bare) return v + linear_terms(p.ideology1, mu, x[idx::E], x[idx::R]);
    v += linear_terms(p.ideology1, mu, x[idx::E1], x[idx::R1]);
    return v + linear_terms(*p.ideology2, mu, x[idx::E2], x[idx::R2]);
  }

  if (!spec.weights) throw std::invalid_argument("lyapunov_value: endemic certificate without weights");
  const auto [a, b] = *spec.weights;
  const int dom = p.two_ideology() ? spec.dominant : 1;
  const auto [e_slot, r_slot] = slots(p, dom);
  double v = g_term(spec.anchor[idx::S], x[idx::S]) + a * g_term(spec.anchor[e_slot], x[e_slot]) +
             b * g_term(spec.anchor[r_slot], x[r_slot]);
  if (p.two_ideology()) {
    const int other = 3 - dom;
    const auto [oe, orr] = slots(p, other);
    v += linear_terms(p.ideology(other), mu, x[oe], x[orr]);
  }
  return v;
}

DecreaseReport decrease_check(const LyapunovSpec& spec, std::span<const State> states) {
  DecreaseReport rep;
  rep.samples = states.size();
  if (states.empty()) return rep;
  double prev = lyapunov_value(spec, states[0]);
  rep.first_value = prev;
  rep.max_increase = states.size() > 1 ? -HUGE_VAL : 0.0;
  double worst_ratio = -HUGE_VAL;
  for (std::size_t k = 1; k < states.size(); ++k) {
    const double cur = lyapunov_value(spec, states[k]);
    const double diff = cur - prev;
    const double allowance = 1e-9 * (1.0 + std::abs(prev));
    rep.max_increase = std::max(rep.max_increase, diff);
    if (diff / allowance > worst_ratio) {
      worst_ratio = diff / allowance;
      rep.worst_step = k - 1;
    }
    if (diff > allowance) rep.passed = false;
    prev = cur;
  }
  rep.last_value = prev;
  return rep;
}

CrossDominanceHypotheses cross_dominance_hypotheses(const ModelParams& p) {
  if (!p.two_ideology()) throw std::invalid_argument("cross_dominance_hypotheses: two-ideology model expected");
  const auto [r1, r2] = reproduction_numbers_two(p);
  CrossDominanceHypotheses h;
  h.r2_dominant = r2 > std::max(1.0, r1);
  const auto& i1 = p.ideology1;
  const auto& i2 = *p.ideology2;
  h.a = i2.c_e / derived_quantities(i2, p.mu).c_tilde;
  h.strict_bound = i1.c_e / derived_quantities(i1, p.mu).c_tilde;
  if (h.r2_dominant) {
    const double e2 = dominance_point(p, 2)[idx::E2];
    h.relaxed_bound = h.strict_bound / (1.0 - e2 / p.carrying_level());
  } else {
    h.relaxed_bound = h.strict_bound;
  }
  h.strict = h.r2_dominant && h.a < h.strict_bound;
  h.relaxed = h.r2_dominant && h.a <= h.relaxed_bound;
  return h;
}

}  // namespace exclab
