#include <cmath>

#include "doctest.h"
#include "exclusion_lab/analysis.hpp"
#include "exclusion_lab/errors.hpp"
#include "exclusion_lab/integrator.hpp"
#include "exclusion_lab/lyapunov.hpp"
#include "fixtures.hpp"

using namespace exclab;
using namespace fixtures;

TEST_CASE("g basics") {
  CHECK(g(1.0) == 0.0);
  CHECK(g(std::exp(1.0)) == doctest::Approx(std::exp(1.0) - 2.0).epsilon(1e-15));
  CHECK(g(0.5) == doctest::Approx(0.19314718055994531).epsilon(1e-14));
  CHECK_THROWS_AS(g(0.0), DomainError);
  CHECK_THROWS_AS(g(-1.0), DomainError);
  // convexity on a few triples
  for (double x : {0.1, 0.7, 1.3, 4.0}) CHECK(g(x) + g(x + 0.2) >= 2 * g(x + 0.1));
}

TEST_CASE("solve_weights: p1 at x*") {
  const ModelParams p = bare(p1);
  const auto w = solve_weights(p, endemic_point_bare(p));
  CHECK(w.a == doctest::Approx(0.1 / 0.22).epsilon(1e-12));
  CHECK(w.b == doctest::Approx(0.4 / 0.22).epsilon(1e-12));
  // both conditions
  const State xs = endemic_point_bare(p);
  const auto& ip = p.ideology1;
  CHECK(std::abs(w.a * ip.q_e + w.b * ip.q_r() - 1.0) <= 1e-12);
  const double lhs = w.b * ip.c_e * xs[1];
  const double rhs = w.a * (ip.c_r * xs[2] + ip.q_e * ip.beta * xs[0] * xs[2]);
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
}

TEST_CASE("solve_weights: q_e = 0 forces B = 1") {
  ModelParams p = bare(p1);
  p.ideology1.q_e = 0.0;
  REQUIRE(r0_bare(p) > 1);
  const auto w = solve_weights(p, endemic_point_bare(p));
  CHECK(w.b == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("solve_weights: two-ideology x** certificate uses ideology two") {
  const ModelParams p = situation1(0.5);
  const auto w = solve_weights(p, dominance_point(p, 2));
  const auto dq = derived_quantities(*p.ideology2, p.mu);
  CHECK(w.a == doctest::Approx(p.ideology2->c_e / dq.c_tilde).epsilon(1e-12));
  CHECK(w.b == doctest::Approx(extremist_outflow(*p.ideology2, p.mu) / dq.c_tilde).epsilon(1e-12));
}

TEST_CASE("solve_weights: rejects a non-equilibrium anchor and degenerate systems") {
  const ModelParams p = bare(p1);
  CHECK_THROWS_AS(solve_weights(p, State{3.0, 1.0, 1.0}), NumericalError);
  CHECK_THROWS_AS(solve_weights(p, State{10.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("lyapunov_value: zero at the anchor, hand value for U") {
  const ModelParams p = bare(p1);
  const auto u = make_lyapunov_spec(p, LyapunovKind::IdeologyFree);
  CHECK(lyapunov_value(u, State{10, 0, 0}) == 0.0);
  const double expected = 10 * g(0.5) + (0.1 / 0.22) * 1 + (0.4 / 0.22) * 1;
  CHECK(lyapunov_value(u, State{5, 1, 1}) == doctest::Approx(expected).epsilon(1e-14));

  const auto w = make_lyapunov_spec(p, LyapunovKind::Endemic);
  CHECK(w.weights.has_value());
  CHECK(lyapunov_value(w, w.anchor) == 0.0);
  CHECK(lyapunov_value(w, State{5, 1, 1}) > 0.0);
  CHECK_THROWS_AS(lyapunov_value(w, State{5, 0, 1}), DomainError);
}

TEST_CASE("make_lyapunov_spec picks the model variant") {
  CHECK(make_lyapunov_spec(bare(p1), LyapunovKind::IdeologyFree).model == LyapunovModel::Bare);
  CHECK(make_lyapunov_spec(all_sub(0.0), LyapunovKind::IdeologyFree).model == LyapunovModel::TwoIdeology);
  CHECK(make_lyapunov_spec(all_sub(1.0), LyapunovKind::IdeologyFree).model == LyapunovModel::Cross);
  const auto w = make_lyapunov_spec(situation1(1.0), LyapunovKind::Endemic, 2);
  CHECK(w.model == LyapunovModel::Cross);
  CHECK(w.dominant == 2);
  CHECK(lyapunov_value(w, w.anchor) == 0.0);
  CHECK_THROWS_AS(make_lyapunov_spec(situation4(), LyapunovKind::Endemic, 1), DomainError);
}

TEST_CASE("cross U vanishes on the adopter-free face and is linear in the adopters") {
  const auto u = make_lyapunov_spec(all_sub(1.0), LyapunovKind::IdeologyFree);
  CHECK(lyapunov_value(u, State{3, 0, 0, 0, 0}) == 0.0);
  const double a = lyapunov_value(u, State{3, 0.1, 0.2, 0.3, 0.4});
  const double b = lyapunov_value(u, State{3, 0.2, 0.4, 0.6, 0.8});
  CHECK(b == doctest::Approx(2 * a).epsilon(1e-14));
}

TEST_CASE("decrease_check: constant trajectory at the anchor passes") {
  const auto w = make_lyapunov_spec(bare(p1), LyapunovKind::Endemic);
  std::vector<State> traj(10, w.anchor);
  const auto rep = decrease_check(w, traj);
  CHECK(rep.passed);
  CHECK(rep.max_increase == 0.0);
  CHECK(rep.samples == 10);
}

TEST_CASE("decrease_check: an increasing sequence fails") {
  const auto u = make_lyapunov_spec(bare(p1), LyapunovKind::IdeologyFree);
  const std::vector<State> seq{State{10, 0.1, 0.1}, State{10, 0.2, 0.2}};
  const auto rep = decrease_check(u, seq);
  CHECK_FALSE(rep.passed);
  CHECK(rep.max_increase > 0);
  CHECK(rep.worst_step == 0);
}

TEST_CASE("decrease along integrated trajectories") {
  SUBCASE("bare, R0 <= 1, U") {
    ModelParams p = bare(p1);
    p.ideology1.beta = 0.05;
    const auto traj = integrate(p, State{2, 3, 4}, 0, 500);
    CHECK(decrease_check(make_lyapunov_spec(p, LyapunovKind::IdeologyFree), traj.states).passed);
  }
  SUBCASE("bare, R0 > 1, W") {
    const ModelParams p = bare(p1);
    const auto traj = integrate(p, State{9, 0.01, 0.01}, 0, 1000);
    CHECK(decrease_check(make_lyapunov_spec(p, LyapunovKind::Endemic), traj.states).passed);
  }
  SUBCASE("cross model, R2 > max(1, R1) with the weight hypothesis, W at x**") {
    const ModelParams p = situation1(1.5);
    const auto h = cross_dominance_hypotheses(p);
    REQUIRE(h.strict);
    const auto traj = integrate(p, State{2, 1, 1, 0.5, 0.5}, 0, 1000);
    CHECK(decrease_check(make_lyapunov_spec(p, LyapunovKind::Endemic, 2), traj.states).passed);
  }
  SUBCASE("cross model, both subcritical, cross U") {
    const ModelParams p = all_sub(2.0);
    const auto traj = integrate(p, State{2, 2, 2, 2, 1}, 0, 1000);
    CHECK(decrease_check(make_lyapunov_spec(p, LyapunovKind::IdeologyFree), traj.states).passed);
  }
}

TEST_CASE("cross dominance hypotheses") {
  const auto h = cross_dominance_hypotheses(situation1(1.0));
  CHECK(h.r2_dominant);
  CHECK(h.a == doctest::Approx(0.1 / 0.22));
  CHECK(h.strict_bound == doctest::Approx(0.2 / (0.2 + 0.7 * 0.2)));
  CHECK(h.strict);
  CHECK(h.relaxed);
  CHECK(h.relaxed_bound > h.strict_bound);
  const auto n = cross_dominance_hypotheses(case2c(1.0));
  CHECK_FALSE(n.r2_dominant);
  CHECK_FALSE(n.strict);
}
