#pragma once

// Parameter sets shared by the unit, property and acceptance tests.
// Order of ideology fields: beta, d_e, d_r, c_e, c_r, q_e. Lambda = 1, mu = 0.1.

#include <cstdint>

#include "exclusion_lab/model.hpp"

namespace fixtures {

using exclab::IdeologyParams;
using exclab::ModelParams;

inline IdeologyParams ideology(double beta, double d_e, double d_r, double c_e, double c_r, double q_e) {
  return {beta, d_e, d_r, c_e, c_r, q_e};
}

inline const IdeologyParams p1 = ideology(0.2, 0.2, 0.3, 0.1, 0.05, 0.6);
inline const IdeologyParams weak = ideology(0.08, 0.1, 0.2, 0.2, 0.1, 0.3);        // R = 1.9428571
inline const IdeologyParams sub = ideology(0.03, 0.1, 0.2, 0.2, 0.1, 0.3);         // R = 0.7285714
inline const IdeologyParams case2a_two = ideology(0.06, 0.05, 0.05, 0.05, 0.05, 0.7);
inline const IdeologyParams case2b_one = ideology(0.2, 0.1, 0.1, 0.3, 0.05, 0.8);
inline const IdeologyParams case2b_two = ideology(0.15, 0.3, 0.05, 0.05, 0.1, 0.1);
inline const IdeologyParams strong = ideology(0.15, 0.1, 0.2, 0.2, 0.1, 0.3);      // R = 3.6428571

inline ModelParams bare(const IdeologyParams& ip, double lambda = 1.0, double mu = 0.1) {
  ModelParams p;
  p.lambda = lambda;
  p.mu = mu;
  p.ideology1 = ip;
  return p;
}

inline ModelParams two(const IdeologyParams& a, const IdeologyParams& b, double delta = 0.0) {
  ModelParams p = bare(a);
  p.ideology2 = b;
  p.delta = delta;
  return p;
}

// Regime fixtures.
inline ModelParams case2c(double delta = 0.0) { return two(p1, weak, delta); }      // d* 0.179838, d** 2.043921
inline ModelParams case2a(double delta = 0.0) { return two(p1, case2a_two, delta); }  // d* 0.115712, d** < 0
inline ModelParams case2b(double delta = 0.0) { return two(case2b_one, case2b_two, delta); }  // d** 0.055745 < d* 0.158404
inline ModelParams situation3(double delta = 0.0) { return two(p1, sub, delta); }   // d* 0.314796
inline ModelParams situation1(double delta = 0.0) { return two(weak, p1, delta); }
inline ModelParams situation4(double delta = 0.0) { return two(sub, p1, delta); }
inline ModelParams all_sub(double delta = 0.0) { return two(sub, sub, delta); }

/// Deterministic generator for random parameter sets (splitmix64).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t s_;
};

/// Rates in [0.01, 0.5], q_e in [0, 1], beta in [0.01, 0.5].
inline IdeologyParams random_ideology(Rng& r) {
  return {r.uniform(0.01, 0.5), r.uniform(0.01, 0.5), r.uniform(0.01, 0.5),
          r.uniform(0.01, 0.5), r.uniform(0.01, 0.5), r.uniform()};
}

inline ModelParams random_bare(Rng& r) {
  ModelParams p;
  p.lambda = r.uniform(0.1, 10.0);
  p.mu = r.uniform(0.02, 0.5);
  p.ideology1 = random_ideology(r);
  return p;
}

inline ModelParams random_two(Rng& r, double delta_max = 5.0) {
  ModelParams p = random_bare(r);
  p.ideology2 = random_ideology(r);
  p.delta = r.uniform(0.0, delta_max);
  return p;
}

}  // namespace fixtures
