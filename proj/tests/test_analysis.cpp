#include <cmath>

#include "doctest.h"
#include "exclusion_lab/analysis.hpp"
#include "exclusion_lab/errors.hpp"
#include "fixtures.hpp"

using namespace exclab;
using namespace fixtures;

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

const EquilibriumReport* find(const std::vector<EquilibriumReport>& v, EquilibriumKind k) {
  for (const auto& e : v)
    if (e.kind == k) return &e;
  return nullptr;
}

}  // namespace

// Reference values below come from a 40-digit evaluation that builds the
// next-generation matrices directly, solves each equilibrium by root finding
// and locates thresholds as roots of spectral_radius(N(delta)) - 1.

TEST_CASE("r0_bare for p1 matches the next-generation oracle") {
  const ModelParams p = bare(p1);
  CHECK(rel_close(r0_bare(p), 2.5142857142857142857, 1e-14));
  const auto ngm = ngm_build(p1, p.mu, p.carrying_level());
  CHECK(rel_close(spectral_radius(ngm.n()), r0_bare(p), 1e-12));
}

TEST_CASE("r0_bare limiting forms") {
  // q_E = 1 and c_E small: c_tilde -> 0
  ModelParams p = bare(p1);
  p.ideology1.q_e = 1.0;
  p.ideology1.c_e = 1e-12;
  CHECK(r0_bare(p) < 1e-9);
  // recruiter-only reduction: c_E = c_R -> 0, q_R = 1
  ModelParams q = bare(p1);
  q.ideology1.q_e = 0.0;
  q.ideology1.c_e = 1e-14;
  q.ideology1.c_r = 1e-14;
  const double expected = q.lambda * q.ideology1.beta / (q.mu * (q.mu + q.ideology1.d_r));
  CHECK(rel_close(r0_bare(q), expected, 1e-10));
}

TEST_CASE("ngm_build structure") {
  const auto pair = ngm_build(p1, 0.1, 10.0);
  CHECK(pair.f(0, 0) == 0.0);
  CHECK(pair.f(1, 0) == 0.0);
  CHECK(pair.f(0, 1) == doctest::Approx(0.6 * 0.2 * 10));
  CHECK(pair.f(1, 1) == doctest::Approx(0.4 * 0.2 * 10));
  CHECK(pair.v(0, 0) > 0);
  CHECK(pair.v(1, 1) > 0);
  CHECK(pair.v(0, 1) <= 0);
  CHECK(pair.v(1, 0) <= 0);
  const auto g = ngm_build(p1, 0.1, 10.0, 0.3, 0.2);
  CHECK(g.f(0, 0) == doctest::Approx(0.3));
  CHECK(g.v(0, 0) == doctest::Approx(pair.v(0, 0) + 0.2));
  CHECK_THROWS_AS(ngm_build(p1, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("equilibria_bare: p1 has x0 and x*") {
  const auto eqs = equilibria_bare(bare(p1));
  REQUIRE(eqs.size() == 2);
  CHECK(eqs[0].kind == EquilibriumKind::IdeologyFree);
  CHECK(eqs[0].state == State{10.0, 0.0, 0.0});
  CHECK(eqs[0].stability == Stability::Unstable);
  CHECK(eqs[1].kind == EquilibriumKind::BareEndemic);
  CHECK(rel_close(eqs[1].state[0], 3.9772727272727272727, 1e-13));
  CHECK(rel_close(eqs[1].state[1], 0.99805194805194805195, 1e-13));
  CHECK(rel_close(eqs[1].state[2], 0.75714285714285714286, 1e-13));
  CHECK(eqs[1].residual <= 1e-10);
  CHECK(eqs[1].stability == Stability::Stable);
}

TEST_CASE("equilibria_bare: subcritical p1 variant has only x0, stable") {
  ModelParams p = bare(p1);
  p.ideology1.beta = 0.05;
  CHECK(r0_bare(p) == doctest::Approx(0.62857142857142857));
  const auto eqs = equilibria_bare(p);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].stability == Stability::Stable);
}

TEST_CASE("equilibria_bare: at R0 = 1 the endemic point meets x0") {
  ModelParams p = bare(p1);
  p.ideology1.beta = 0.2 / r0_bare(p);
  CHECK(std::abs(r0_bare(p) - 1.0) < 1e-14);
  const State xs = endemic_point_bare(p);
  CHECK(std::abs(xs[0] - 10.0) < 1e-12);
  CHECK(std::abs(xs[1]) < 1e-12);
  CHECK(std::abs(xs[2]) < 1e-12);
  const auto rg = classify_regime(p);
  CHECK(rg.degenerate);
}

TEST_CASE("reproduction_numbers_two reduce to the single-ideology numbers") {
  const auto [r1, r2] = reproduction_numbers_two(two(p1, p1));
  CHECK(rel_close(r1, 2.5142857142857143, 1e-14));
  CHECK(r1 == r2);
  IdeologyParams half = p1;
  half.beta = 0.1;
  const auto [a, b] = reproduction_numbers_two(two(p1, half));
  CHECK(rel_close(b, a / 2, 1e-14));
  IdeologyParams tiny = p1;
  tiny.beta = 1e-15;
  CHECK(reproduction_numbers_two(two(p1, tiny)).second < 1e-12);
}

TEST_CASE("boundary_equilibria_two: existence pattern") {
  auto kinds = [](const ModelParams& p) {
    std::vector<EquilibriumKind> k;
    for (const auto& e : boundary_equilibria_two(p)) k.push_back(e.kind);
    return k;
  };
  using K = EquilibriumKind;
  CHECK(kinds(situation3()) == std::vector<K>{K::IdeologyFree, K::Dominance1});
  CHECK(kinds(situation4()) == std::vector<K>{K::IdeologyFree, K::Dominance2});
  CHECK(kinds(all_sub()) == std::vector<K>{K::IdeologyFree});
  CHECK(kinds(case2c(0.7)) == std::vector<K>{K::IdeologyFree, K::Dominance1, K::Dominance2});
  for (const auto& e : boundary_equilibria_two(case2c(3.0))) CHECK(e.residual <= 1e-10);
}

TEST_CASE("boundary_equilibria_two: symmetric ideologies mirror") {
  const auto eqs = boundary_equilibria_two(two(p1, p1));
  const auto* xs = find(eqs, EquilibriumKind::Dominance1);
  const auto* xss = find(eqs, EquilibriumKind::Dominance2);
  REQUIRE(xs);
  REQUIRE(xss);
  CHECK(xs->state[idx::S] == xss->state[idx::S]);
  CHECK(xs->state[idx::E1] == xss->state[idx::E2]);
  CHECK(xs->state[idx::R1] == xss->state[idx::R2]);
  CHECK(xs->state[idx::E2] == 0.0);
  CHECK(xss->state[idx::R1] == 0.0);
}

TEST_CASE("invasion numbers at delta = 0 are ratios of reproduction numbers") {
  IdeologyParams half = p1;
  half.beta = 0.1;
  const ModelParams p = two(p1, half);
  const auto inv = invasion_numbers_delta(p);
  REQUIRE(inv.i1);
  REQUIRE(inv.i2);
  CHECK(rel_close(*inv.i2, 0.5, 1e-12));
  CHECK(rel_close(*inv.i1, 2.0, 1e-12));
  const auto sym = invasion_numbers_delta(two(p1, p1));
  CHECK(rel_close(*sym.i1, 1.0, 1e-12));
  CHECK(rel_close(*sym.i2, 1.0, 1e-12));
}

TEST_CASE("invasion numbers are undefined without the opposing dominance point") {
  const auto inv = invasion_numbers_delta(situation3(0.5));
  CHECK(inv.i2.has_value());
  CHECK_FALSE(inv.i1.has_value());
  const auto inv4 = invasion_numbers_delta(situation4(0.5));
  CHECK(inv4.i1.has_value());
  CHECK_FALSE(inv4.i2.has_value());
}

TEST_CASE("invasion numbers agree with the next-generation oracle") {
  for (double d : {0.0, 0.3, 1.0, 4.0}) {
    const ModelParams p = case2c(d);
    const auto inv = invasion_numbers_delta(p);
    const State xs = dominance_point(p, 1);
    const State xss = dominance_point(p, 2);
    const double i2 = spectral_radius(ngm_build(*p.ideology2, p.mu, xs[idx::S], d * xs[idx::E1]).n());
    const double i1 = spectral_radius(ngm_build(p.ideology1, p.mu, xss[idx::S], 0.0, d * xss[idx::E2]).n());
    CHECK(rel_close(*inv.i2, i2, 1e-10));
    CHECK(rel_close(*inv.i1, i1, 1e-10));
  }
}

TEST_CASE("delta thresholds for the regime fixtures") {
  const auto c = delta_thresholds(case2c());
  REQUIRE(c.delta_star);
  REQUIRE(c.delta_star_star);
  CHECK(c.delta_star->is_positive());
  CHECK(rel_close(c.delta_star->value, 0.17983751230335485, 1e-12));
  CHECK(rel_close(c.delta_star_star->value, 2.0439209912894123, 1e-12));
  REQUIRE(c.sigma);
  CHECK(*c.sigma > 0);

  const auto a = delta_thresholds(case2a());
  CHECK(rel_close(a.delta_star->value, 0.11571213892135582, 1e-12));
  CHECK(a.delta_star_star->status == ThresholdStatus::NonPositive);
  CHECK(rel_close(a.delta_star_star->value, -1.0607940446650124, 1e-12));
  CHECK_FALSE(a.sigma.has_value());

  const auto b = delta_thresholds(case2b());
  CHECK(rel_close(b.delta_star->value, 0.15840376134133784, 1e-12));
  CHECK(rel_close(b.delta_star_star->value, 0.055744555970966468, 1e-12));
  CHECK(*b.sigma < 0);

  const auto s3 = delta_thresholds(situation3());
  CHECK(rel_close(s3.delta_star->value, 0.31479636354716514, 1e-12));
  CHECK_FALSE(s3.delta_star_star.has_value());
}

TEST_CASE("delta thresholds: symmetric ideologies give zero") {
  const auto t = delta_thresholds(two(p1, p1));
  CHECK(t.delta_star->value == 0.0);
  CHECK(t.delta_star_star->value == 0.0);
  CHECK_FALSE(t.delta_star->is_positive());
}

TEST_CASE("delta thresholds: R1 < R2 gives delta** <= 0 and no genuine delta*") {
  const auto t = delta_thresholds(situation1());
  REQUIRE(t.delta_star_star);
  CHECK(t.delta_star_star->value < 0);
  CHECK(t.delta_star_star->status == ThresholdStatus::NonPositive);
  REQUIRE(t.delta_star);
  CHECK_FALSE(t.delta_star->is_positive());

  // A pair whose delta* formula is positive but I2 never equals 1.
  const auto u = delta_thresholds(two(p1, strong));
  CHECK(u.delta_star->value > 0);
  CHECK(u.delta_star->status == ThresholdStatus::NotACrossing);
  const auto inv = invasion_numbers_delta(two(p1, strong, u.delta_star->value));
  CHECK(*inv.i2 > 1.0);
}

TEST_CASE("thresholds make the invasion numbers equal one") {
  for (const ModelParams& base : {case2c(), case2a(), case2b(), situation3()}) {
    const auto t = delta_thresholds(base);
    if (t.delta_star && t.delta_star->is_positive()) {
      ModelParams p = base;
      p.delta = t.delta_star->value;
      CHECK(std::abs(*invasion_numbers_delta(p).i2 - 1.0) <= 1e-9);
    }
    if (t.delta_star_star && t.delta_star_star->is_positive()) {
      ModelParams p = base;
      p.delta = t.delta_star_star->value;
      CHECK(std::abs(*invasion_numbers_delta(p).i1 - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("classify_regime labels") {
  CHECK(classify_regime(all_sub()).label == RegimeLabel::AllSubcritical);
  CHECK(classify_regime(situation1()).label == RegimeLabel::Situation1);
  CHECK(classify_regime(case2a()).label == RegimeLabel::Situation2A);
  CHECK(classify_regime(case2b()).label == RegimeLabel::Situation2B);
  CHECK(classify_regime(case2c()).label == RegimeLabel::Situation2C);
  CHECK(classify_regime(situation3()).label == RegimeLabel::Situation3);
  CHECK(classify_regime(situation4()).label == RegimeLabel::Situation4);
  CHECK(classify_regime(bare(p1)).label == RegimeLabel::Endemic);
  CHECK_FALSE(classify_regime(case2c(0.5)).degenerate);
}

TEST_CASE("classify_regime: degenerate boundaries are flagged") {
  CHECK(classify_regime(two(p1, p1)).degenerate);
  ModelParams p = case2c();
  p.delta = delta_thresholds(p).delta_star->value;
  CHECK(classify_regime(p).degenerate);
}

TEST_CASE("Situation 1: I1 < 1 < I2 for every sampled delta > 0") {
  for (double d = 0.05; d < 10; d *= 1.7) {
    const auto inv = invasion_numbers_delta(situation1(d));
    CHECK(*inv.i1 < 1.0);
    CHECK(*inv.i2 > 1.0);
  }
}

TEST_CASE("local stability at x0 follows R0") {
  ModelParams sub_p = bare(p1);
  sub_p.ideology1.beta = 0.05;
  CHECK(local_stability(sub_p, State{10, 0, 0}).second == Stability::Stable);
  CHECK(local_stability(bare(p1), State{10, 0, 0}).second == Stability::Unstable);
  CHECK_THROWS_AS(local_stability(bare(p1), State{5, 1, 1}), std::invalid_argument);
}

TEST_CASE("Case 2B: between the thresholds both dominance points are stable") {
  const Analysis a = analyze(case2b(0.1));
  CHECK(find(a.equilibria, EquilibriumKind::Dominance1)->stability == Stability::Stable);
  CHECK(find(a.equilibria, EquilibriumKind::Dominance2)->stability == Stability::Stable);
}

TEST_CASE("classify_spectrum margin rule") {
  EigenSet ev;
  ev.values = {{-1e-10, 0}, {-1, 0}};
  CHECK(classify_spectrum(ev) == Stability::Marginal);
  ev.values = {{-2e-9, 1}, {-2e-9, -1}};
  CHECK(classify_spectrum(ev) == Stability::Stable);
  ev.values = {{2e-9, 0}};
  CHECK(classify_spectrum(ev) == Stability::Unstable);
}

TEST_CASE("analyze: bare p1 report") {
  const Analysis a = analyze(bare(p1));
  CHECK(a.regime.r0.has_value());
  REQUIRE(a.equilibria.size() == 2);
}

TEST_CASE("analyze rejects invalid parameters") {
  ModelParams p = bare(p1);
  p.mu = 0;
  CHECK_THROWS_AS(analyze(p), ValidationError);
}
