#include "exclusion_lab/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "exclusion_lab/errors.hpp"

namespace exclab {

const IdeologyParams& ModelParams::ideology(int i) const {
  if (i == 1) return ideology1;
  if (i == 2 && ideology2) return *ideology2;
  throw std::invalid_argument("ModelParams::ideology: no ideology " + std::to_string(i));
}

namespace {

std::string describe(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_positive(std::vector<FieldIssue>& issues, const std::string& field, double v) {
  if (!std::isfinite(v)) {
    issues.push_back({field, "must be finite (got " + describe(v) + ")"});
  } else if (!(v > 0.0)) {
    issues.push_back({field, "must be > 0 (got " + describe(v) + ")"});
  }
}

void check_ideology(std::vector<FieldIssue>& issues, const std::string& prefix,
                    const IdeologyParams& ip) {
  require_positive(issues, prefix + ".beta", ip.beta);
  require_positive(issues, prefix + ".d_e", ip.d_e);
  require_positive(issues, prefix + ".d_r", ip.d_r);
  require_positive(issues, prefix + ".c_e", ip.c_e);
  require_positive(issues, prefix + ".c_r", ip.c_r);
  if (!std::isfinite(ip.q_e) || ip.q_e < 0.0 || ip.q_e > 1.0) {
    issues.push_back({prefix + ".q_e", "must lie in [0, 1] (got " + describe(ip.q_e) + ")"});
  }
}

}  // namespace

void validate(const ModelParams& p) {
  std::vector<FieldIssue> issues;
  require_positive(issues, "lambda", p.lambda);
  require_positive(issues, "mu", p.mu);
  check_ideology(issues, "ideology1", p.ideology1);
  if (p.ideology2) {
    check_ideology(issues, "ideology2", *p.ideology2);
    if (!std::isfinite(p.delta) || p.delta < 0.0) {
      issues.push_back({"delta", "must be finite and >= 0 (got " + describe(p.delta) + ")"});
    }
  } else if (p.delta != 0.0) {
    issues.push_back({"delta", "requires ideology2"});
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

State::State(std::size_t n) : n_(n) {
  if (n > kCapacity) throw std::invalid_argument("State: dimension exceeds capacity");
}

State::State(std::initializer_list<double> values) : State(values.size()) {
  std::copy(values.begin(), values.end(), v_.begin());
}

double State::total() const noexcept {
  double t = 0.0;
  for (double v : *this) t += v;
  return t;
}

double State::max_abs() const noexcept {
  double m = 0.0;
  for (double v : *this) m = std::max(m, std::abs(v));
  return m;
}

bool State::all_finite() const noexcept {
  return std::all_of(begin(), end(), [](double v) { return std::isfinite(v); });
}

bool State::nonnegative() const noexcept {
  return std::all_of(begin(), end(), [](double v) { return v >= 0.0; });
}

bool operator==(const State& a, const State& b) noexcept {
  return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin());
}

double distance_inf(const State& a, const State& b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance_inf: size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

DerivedQuantities derived_quantities(const IdeologyParams& ip, double mu) {
  DerivedQuantities q;
  q.c_tilde = ip.c_e + ip.q_r() * (mu + ip.d_e);
  q.big_d = recruiter_outflow(ip, mu) * extremist_outflow(ip, mu) - ip.c_e * ip.c_r;
  q.gamma = ip.beta * q.c_tilde / q.big_d;
  return q;
}

namespace {

void require_dim(const State& x, std::size_t n, const char* who) {
  if (x.size() != n) {
    throw std::invalid_argument(std::string(who) + ": expected state of dimension " +
                                std::to_string(n) + ", got " + std::to_string(x.size()));
  }
}

}  // namespace

State rhs_bare(const ModelParams& p, const State& x) {
  if (p.two_ideology()) throw std::invalid_argument("rhs_bare: parameters carry a second ideology");
  require_dim(x, 3, "rhs_bare");
  const auto& ip = p.ideology1;
  const double s = x[idx::S], e = x[idx::E], r = x[idx::R];
  const double recruit = ip.beta * s * r;
  return State{p.lambda - p.mu * s - recruit,
               ip.q_e * recruit - extremist_outflow(ip, p.mu) * e + ip.c_r * r,
               ip.q_r() * recruit + ip.c_e * e - recruiter_outflow(ip, p.mu) * r};
}

State rhs_two(const ModelParams& p, const State& x) {
  if (!p.two_ideology()) throw std::invalid_argument("rhs_two: parameters lack a second ideology");
  require_dim(x, 5, "rhs_two");
  const auto& i1 = p.ideology1;
  const auto& i2 = *p.ideology2;
  const double s = x[idx::S];
  const double e1 = x[idx::E1], r1 = x[idx::R1], e2 = x[idx::E2], r2 = x[idx::R2];
  const double recruit1 = i1.beta * s * r1;
  const double recruit2 = i2.beta * s * r2;
  const double cross = p.delta * e1 * e2;
  return State{p.lambda - p.mu * s - recruit1 - recruit2,
               i1.q_e * recruit1 - extremist_outflow(i1, p.mu) * e1 + i1.c_r * r1 - cross,
               i1.q_r() * recruit1 + i1.c_e * e1 - recruiter_outflow(i1, p.mu) * r1,
               i2.q_e * recruit2 - extremist_outflow(i2, p.mu) * e2 + i2.c_r * r2 + cross,
               i2.q_r() * recruit2 + i2.c_e * e2 - recruiter_outflow(i2, p.mu) * r2};
}

State rhs(const ModelParams& p, const State& x) {
  return p.two_ideology() ? rhs_two(p, x) : rhs_bare(p, x);
}

SmallMatrix jacobian_bare(const ModelParams& p, const State& x) {
  if (p.two_ideology()) throw std::invalid_argument("jacobian_bare: parameters carry a second ideology");
  require_dim(x, 3, "jacobian_bare");
  const auto& ip = p.ideology1;
  const double s = x[idx::S], r = x[idx::R];
  SmallMatrix j(3);
  j(0, 0) = -p.mu - ip.beta * r;
  j(0, 2) = -ip.beta * s;
  j(1, 0) = ip.q_e * ip.beta * r;
  j(1, 1) = -extremist_outflow(ip, p.mu);
  j(1, 2) = ip.q_e * ip.beta * s + ip.c_r;
  j(2, 0) = ip.q_r() * ip.beta * r;
  j(2, 1) = ip.c_e;
  j(2, 2) = ip.q_r() * ip.beta * s - recruiter_outflow(ip, p.mu);
  return j;
}

SmallMatrix jacobian_two(const ModelParams& p, const State& x) {
  if (!p.two_ideology()) throw std::invalid_argument("jacobian_two: parameters lack a second ideology");
  require_dim(x, 5, "jacobian_two");
  const auto& i1 = p.ideology1;
  const auto& i2 = *p.ideology2;
  const double s = x[idx::S];
  const double e1 = x[idx::E1], r1 = x[idx::R1], e2 = x[idx::E2], r2 = x[idx::R2];
  using namespace idx;
  SmallMatrix j(5);
  j(S, S) = -p.mu - i1.beta * r1 - i2.beta * r2;
  j(S, R1) = -i1.beta * s;
  j(S, R2) = -i2.beta * s;

  j(E1, S) = i1.q_e * i1.beta * r1;
  j(E1, E1) = -extremist_outflow(i1, p.mu) - p.delta * e2;
  j(E1, R1) = i1.q_e * i1.beta * s + i1.c_r;
  j(E1, E2) = -p.delta * e1;

  j(R1, S) = i1.q_r() * i1.beta * r1;
  j(R1, E1) = i1.c_e;
  j(R1, R1) = i1.q_r() * i1.beta * s - recruiter_outflow(i1, p.mu);

  j(E2, S) = i2.q_e * i2.beta * r2;
  j(E2, E1) = p.delta * e2;
  j(E2, E2) = -extremist_outflow(i2, p.mu) + p.delta * e1;
  j(E2, R2) = i2.q_e * i2.beta * s + i2.c_r;

  j(R2, S) = i2.q_r() * i2.beta * r2;
  j(R2, E2) = i2.c_e;
  j(R2, R2) = i2.q_r() * i2.beta * s - recruiter_outflow(i2, p.mu);
  return j;
}

SmallMatrix jacobian(const ModelParams& p, const State& x) {
  return p.two_ideology() ? jacobian_two(p, x) : jacobian_bare(p, x);
}

double residual(const ModelParams& p, const State& x) { return rhs(p, x).max_abs(); }

std::string format_state(const State& x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    out += describe(x[i]);
  }
  return out + ")";
}

}  // namespace exclab
