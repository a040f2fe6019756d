#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "exclusion_lab/analysis.hpp"
#include "exclusion_lab/cli.hpp"
#include "exclusion_lab/lyapunov.hpp"
#include "json.hpp"

namespace exclab::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "validation error:\n";
    for (const auto& issue : e.issues()) err << "  " << issue.field << ": " << issue.message << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open output file '" + path + "'");
  return f;
}

void finish_output(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("error writing output file '" + path + "'");
}

const char* model_name(ModelKind m) { return m == ModelKind::BareBones ? "bare_bones" : "two_ideology"; }

std::string csv_header(const ModelParams& p) { return p.two_ideology() ? "t,S,E1,R1,E2,R2" : "t,S,E,R"; }

void write_row(std::ostream& os, double t, const State& x) {
  os << format_real(t);
  for (double v : x) os << ',' << format_real(v);
  os << '\n';
}

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

ordered_json opt_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json threshold_json(const std::optional<Threshold>& t) {
  if (!t) return nullptr;
  ordered_json j;
  j["value"] = std::isfinite(t->value) ? ordered_json(t->value) : ordered_json(nullptr);
  j["status"] = to_string(t->status);
  return j;
}

ordered_json state_json(const State& x) {
  ordered_json a = ordered_json::array();
  for (double v : x) a.push_back(v);
  return a;
}

ordered_json equilibrium_json(const EquilibriumReport& r) {
  ordered_json j;
  j["kind"] = to_string(r.kind);
  j["state"] = state_json(r.state);
  j["residual"] = r.residual;
  j["stability"] = to_string(r.stability);
  ordered_json ev = ordered_json::array();
  for (const auto& z : r.eigenvalues.values) ev.push_back({{"re", z.real()}, {"im", z.imag()}});
  j["eigenvalues"] = ev;
  return j;
}

ordered_json params_json(const ModelParams& p) {
  auto ideology = [](const IdeologyParams& ip) {
    return ordered_json{{"beta", ip.beta}, {"d_e", ip.d_e}, {"d_r", ip.d_r},
                        {"c_e", ip.c_e},   {"c_r", ip.c_r}, {"q_e", ip.q_e}};
  };
  ordered_json j;
  j["lambda"] = p.lambda;
  j["mu"] = p.mu;
  j["ideology1"] = ideology(p.ideology1);
  if (p.ideology2) {
    j["ideology2"] = ideology(*p.ideology2);
    j["delta"] = p.delta;
  }
  return j;
}

const EquilibriumReport* find_kind(const Analysis& a, EquilibriumKind k) {
  for (const auto& e : a.equilibria) {
    if (e.kind == k) return &e;
  }
  return nullptr;
}

std::string stability_or_absent(const EquilibriumReport* e) { return e ? to_string(e->stability) : "absent"; }

std::size_t coexistence_count(const Analysis& a) {
  return static_cast<std::size_t>(std::count_if(a.equilibria.begin(), a.equilibria.end(), [](const auto& e) {
    return e.kind == EquilibriumKind::Coexistence;
  }));
}

// Threshold values reported in tables: the formula value unless the formula
// is undefined or does not mark a crossing.
std::optional<double> threshold_value(const std::optional<Threshold>& t) {
  if (!t) return std::nullopt;
  if (t->status == ThresholdStatus::Positive || t->status == ThresholdStatus::NonPositive) return t->value;
  return std::nullopt;
}

// --- analyze --------------------------------------------------------------

void render_text(std::ostream& os, const Scenario& sc, const Analysis& a) {
  const auto& rg = a.regime;
  os << "model: " << model_name(sc.model) << '\n';
  if (rg.r0) os << "R0 = " << format_real(*rg.r0) << '\n';
  if (rg.r1) os << "R1 = " << format_real(*rg.r1) << "  R2 = " << format_real(*rg.r2) << '\n';
  os << "regime: " << to_string(rg.label) << (rg.degenerate ? " (degenerate)" : "") << '\n';
  for (const auto& n : rg.notes) os << "  note: " << n << '\n';
  if (sc.params.two_ideology()) {
    os << "delta = " << format_real(sc.params.delta) << '\n';
    os << "I1(delta) = " << (rg.invasion.i1 ? format_real(*rg.invasion.i1) : "undefined (R2 <= 1)") << '\n';
    os << "I2(delta) = " << (rg.invasion.i2 ? format_real(*rg.invasion.i2) : "undefined (R1 <= 1)") << '\n';
    auto show = [&](const char* name, const std::optional<Threshold>& t) {
      os << name << " = ";
      if (!t) {
        os << "undefined\n";
      } else {
        os << (std::isfinite(t->value) ? format_real(t->value) : "nan") << " [" << to_string(t->status) << "]\n";
      }
    };
    show("delta*", rg.thresholds.delta_star);
    show("delta**", rg.thresholds.delta_star_star);
    os << "sigma = " << (rg.thresholds.sigma ? format_real(*rg.thresholds.sigma) : "undefined") << '\n';
  }
  os << "equilibria:\n";
  for (const auto& e : a.equilibria) {
    os << "  " << to_string(e.kind) << "  " << to_string(e.stability)
       << "  max Re = " << format_real(e.eigenvalues.max_real_part()) << "  residual = " << format_real(e.residual)
       << "\n    " << format_state(e.state) << '\n';
  }
}

ordered_json render_json(const Scenario& sc, const Analysis& a) {
  const auto& rg = a.regime;
  ordered_json j;
  j["model"] = model_name(sc.model);
  j["parameters"] = params_json(sc.params);
  ordered_json rn;
  if (rg.r0) rn["r0"] = *rg.r0;
  if (rg.r1) {
    rn["r1"] = *rg.r1;
    rn["r2"] = *rg.r2;
  }
  j["reproduction_numbers"] = rn;
  ordered_json reg;
  reg["label"] = to_string(rg.label);
  reg["degenerate"] = rg.degenerate;
  reg["notes"] = rg.notes;
  j["regime"] = reg;
  if (sc.params.two_ideology()) {
    j["invasion_numbers"] = {{"i1_delta", opt_json(rg.invasion.i1)}, {"i2_delta", opt_json(rg.invasion.i2)}};
    j["thresholds"] = {{"delta_star", threshold_json(rg.thresholds.delta_star)},
                       {"delta_star_star", threshold_json(rg.thresholds.delta_star_star)},
                       {"sigma", opt_json(rg.thresholds.sigma)}};
  }
  ordered_json eqs = ordered_json::array();
  for (const auto& e : a.equilibria) eqs.push_back(equilibrium_json(e));
  j["equilibria"] = eqs;
  return j;
}

// --- sweep -----------------------------------------------------------------

class PointEval {
 public:
  explicit PointEval(const ModelParams& p) : p_(p) {}

  std::string value(const std::string& q) {
    if (q == "r0") return format_real(r0_bare(p_));
    if (q == "r1") return opt_real(regime().r1);
    if (q == "r2") return opt_real(regime().r2);
    if (q == "i1_delta") return opt_real(regime().invasion.i1);
    if (q == "i2_delta") return opt_real(regime().invasion.i2);
    if (q == "delta_star") return opt_real(threshold_value(regime().thresholds.delta_star));
    if (q == "delta_star_star") return opt_real(threshold_value(regime().thresholds.delta_star_star));
    if (q == "sigma") return opt_real(regime().thresholds.sigma);
    if (q == "regime") return to_string(regime().label);
    if (q == "x0_stability") return stability_or_absent(find_kind(analysis(), EquilibriumKind::IdeologyFree));
    if (q == "x_star_exists") return x_star() ? "1" : "0";
    if (q == "x_star_stability") return stability_or_absent(x_star());
    if (q == "x_star_star_exists") return find_kind(analysis(), EquilibriumKind::Dominance2) ? "1" : "0";
    if (q == "x_star_star_stability") return stability_or_absent(find_kind(analysis(), EquilibriumKind::Dominance2));
    if (q == "coexistence") return std::to_string(coexistence_count(analysis()));
    if (q == "coexistence_stability") {
      return stability_or_absent(find_kind(analysis(), EquilibriumKind::Coexistence));
    }
    if (q == "equilibria_count") return std::to_string(analysis().equilibria.size());
    throw std::invalid_argument("unknown quantity '" + q + "'");
  }

 private:
  const RegimeReport& regime() {
    if (!regime_) regime_ = analysis_ ? analysis_->regime : classify_regime(p_);
    return *regime_;
  }
  const Analysis& analysis() {
    if (!analysis_) analysis_ = analyze(p_);
    return *analysis_;
  }
  const EquilibriumReport* x_star() {
    return find_kind(analysis(), p_.two_ideology() ? EquilibriumKind::Dominance1 : EquilibriumKind::BareEndemic);
  }

  ModelParams p_;
  std::optional<RegimeReport> regime_;
  std::optional<Analysis> analysis_;
};

// --- verify ------------------------------------------------------------------

struct VerifyPlan {
  std::string theorem;
  std::optional<State> target;
  std::string target_name;
  std::optional<LyapunovSpec> certificate;
  std::vector<std::string> notes;
};

VerifyPlan plan_for(const ModelParams& p) {
  VerifyPlan plan;
  if (!p.two_ideology()) {
    if (r0_bare(p) <= 1.0) {
      plan.theorem = "R0 <= 1: x0 globally asymptotically stable";
      plan.target_name = "x0";
      plan.certificate = make_lyapunov_spec(p, LyapunovKind::IdeologyFree);
    } else {
      plan.theorem = "R0 > 1: x* globally asymptotically stable";
      plan.target_name = "x*";
      plan.certificate = make_lyapunov_spec(p, LyapunovKind::Endemic);
    }
    plan.target = plan.certificate->anchor;
    return plan;
  }

  const auto [r1, r2] = reproduction_numbers_two(p);
  const bool cross = p.delta > 0.0;
  if (r1 <= 1.0 && r2 <= 1.0) {
    plan.theorem = cross ? "R1, R2 <= 1 with cross-interaction: x0 globally asymptotically stable"
                         : "R1, R2 <= 1: x0 globally asymptotically stable";
    plan.target_name = "x0";
    plan.certificate = make_lyapunov_spec(p, LyapunovKind::IdeologyFree);
  } else if (!cross && r1 > std::max(1.0, r2)) {
    plan.theorem = "R1 > max(1, R2): x* globally asymptotically stable";
    plan.target_name = "x*";
    plan.certificate = make_lyapunov_spec(p, LyapunovKind::Endemic, 1);
  } else if (!cross && r2 > std::max(1.0, r1)) {
    plan.theorem = "R2 > max(1, R1): x** globally asymptotically stable";
    plan.target_name = "x**";
    plan.certificate = make_lyapunov_spec(p, LyapunovKind::Endemic, 2);
  } else if (cross && r2 > std::max(1.0, r1)) {
    const auto h = cross_dominance_hypotheses(p);
    plan.notes.push_back(std::string("strict hypothesis c_E2/c~2 < c_E1/c~1: ") + (h.strict ? "holds" : "fails"));
    plan.notes.push_back(std::string("relaxed hypothesis: ") + (h.relaxed ? "holds" : "fails"));
    if (h.strict || h.relaxed) {
      plan.theorem = h.strict ? "R2 > max(1, R1), c_E2/c~2 < c_E1/c~1, delta > 0: x** globally asymptotically stable"
                              : "R2 > max(1, R1), relaxed weight bound, delta > 0: x** globally asymptotically stable";
      plan.target_name = "x**";
      plan.certificate = make_lyapunov_spec(p, LyapunovKind::Endemic, 2);
    }
  }
  if (plan.certificate) {
    plan.target = plan.certificate->anchor;
  } else {
    plan.theorem = "no global stability theorem covers this regime";
    plan.notes.push_back("only the invariant region is checked");
  }
  return plan;
}

// Components that enter a g-term must be positive at the start for the
// certificate (and the theorem) to apply.
bool in_certificate_domain(const LyapunovSpec& spec, const State& x0) {
  if (spec.kind == LyapunovKind::IdeologyFree) return true;
  if (!(x0[idx::S] > 0.0)) return false;
  if (!spec.params.two_ideology()) return x0[idx::E] > 0.0 && x0[idx::R] > 0.0;
  const auto e = spec.dominant == 1 ? idx::E1 : idx::E2;
  const auto r = spec.dominant == 1 ? idx::R1 : idx::R2;
  return x0[e] > 0.0 && x0[r] > 0.0;
}

struct TrialResult {
  State initial;
  bool skipped = false;
  std::string skip_reason;
  std::optional<std::string> integration_error;
  RegionReport region;
  std::optional<ConvergenceReport> convergence;
  std::optional<DecreaseReport> decrease;

  bool passed() const {
    if (skipped) return true;
    if (integration_error) return false;
    if (!region.passed) return false;
    if (convergence && !convergence->converged) return false;
    if (decrease && !decrease->passed) return false;
    return true;
  }
};

TrialResult run_trial(const Scenario& sc, const VerifyPlan& plan, const State& x0, const VerifyOptions& opts) {
  TrialResult tr;
  tr.initial = x0;
  if (plan.certificate && !in_certificate_domain(*plan.certificate, x0)) {
    tr.skipped = true;
    tr.skip_reason = "initial state outside the certificate domain";
    return tr;
  }
  Trajectory traj;
  try {
    traj = integrate(sc.params, x0, 0.0, opts.t_end, sc.integrator);
  } catch (const IntegrationError& e) {
    tr.integration_error = e.what();
    return tr;
  }
  tr.region = invariant_region_check(traj, sc.params);
  if (plan.target) tr.convergence = convergence_check(traj, *plan.target, opts.tolerance);
  if (plan.certificate) {
    std::span<const State> states(traj.states);
    // U carries S0 g(S/S0); a start at S = 0 leaves the domain only at t = 0.
    if (!states.empty() && !(states.front()[idx::S] > 0.0)) states = states.subspan(1);
    tr.decrease = decrease_check(*plan.certificate, states);
  }
  return tr;
}

}  // namespace

int run_analyze(const Scenario& sc, Format format, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Analysis a = analyze(sc.params);
    if (format == Format::Json) {
      out << render_json(sc, a).dump(2) << '\n';
    } else {
      render_text(out, sc, a);
    }
    return kExitOk;
  });
}

int run_simulate(const Scenario& sc, double t_end, const std::optional<std::string>& output_path, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    if (!(std::isfinite(t_end) && t_end >= 0.0)) throw ValidationError("t-end", "must be finite and >= 0");
    const State x0 = sc.initial ? *sc.initial : default_initial(sc.params);
    const Trajectory traj = integrate(sc.params, x0, 0.0, t_end, sc.integrator);

    std::ofstream file;
    if (output_path) file = open_output(*output_path);
    std::ostream& csv = output_path ? static_cast<std::ostream&>(file) : out;
    std::ostream& summary = output_path ? out : err;
    csv << csv_header(sc.params) << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) write_row(csv, traj.times[k], traj.states[k]);
    if (output_path) finish_output(file, *output_path);

    const State& xf = traj.final_state();
    summary << "final state at t=" << format_real(traj.times.back()) << ": " << format_state(xf) << '\n';
    std::vector<EquilibriumReport> eqs;
    try {
      eqs = analyze(sc.params).equilibria;
    } catch (const NumericalError& e) {
      summary << "warning: coexistence search failed (" << e.what() << "); comparing with boundary equilibria only\n";
      eqs = boundary_equilibria_two(sc.params);
    }
    const EquilibriumReport* best = nullptr;
    double best_d = HUGE_VAL;
    for (const auto& e : eqs) {
      const double d = distance_inf(e.state, xf);
      if (d < best_d) {
        best_d = d;
        best = &e;
      }
    }
    if (best) {
      summary << "nearest equilibrium: " << to_string(best->kind) << " (" << to_string(best->stability)
              << ") at max-norm distance " << format_real(best_d) << '\n';
    }
    summary << "steps: " << traj.stats.accepted << " accepted, " << traj.stats.rejected << " rejected\n";
    return kExitOk;
  });
}

int run_sweep(const Scenario& sc, const SweepSpec& spec, const std::optional<std::string>& output_path,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    spec.validate(sc);
    const auto grid = spec.grid();

    std::ofstream file;
    if (output_path) file = open_output(*output_path);
    std::ostream& csv = output_path ? static_cast<std::ostream&>(file) : out;
    std::ostream& summary = output_path ? out : err;

    csv << spec.param;
    for (const auto& q : spec.quantities) csv << ',' << q;
    csv << '\n';

    std::vector<std::string> warnings;
    std::size_t ok = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      std::vector<std::string> cells(spec.quantities.size());
      try {
        ModelParams p = sc.params;
        set_param(p, spec.param, grid[k]);
        validate(p);
        PointEval ev(p);
        for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = ev.value(spec.quantities[i]);
        ++ok;
      } catch (const ValidationError& e) {
        std::fill(cells.begin(), cells.end(), std::string());
        std::string msg;
        for (const auto& issue : e.issues()) msg += (msg.empty() ? "" : "; ") + issue.field + " " + issue.message;
        warnings.push_back(spec.param + "=" + format_real(grid[k]) + ": " + msg);
      } catch (const std::exception& e) {
        std::fill(cells.begin(), cells.end(), std::string());
        warnings.push_back(spec.param + "=" + format_real(grid[k]) + ": " + e.what());
      }
      csv << format_real(grid[k]);
      for (const auto& c : cells) csv << ',' << c;
      csv << '\n';
    }
    if (output_path) finish_output(file, *output_path);

    summary << "sweep " << spec.param << " over [" << format_real(spec.from) << ", " << format_real(spec.to) << "]: "
            << ok << " of " << grid.size() << " points succeeded\n";
    if (!warnings.empty()) {
      summary << "warnings (" << warnings.size() << "):\n";
      for (const auto& w : warnings) summary << "  " << w << '\n';
    }
    return ok > 0 ? kExitOk : kExitNumerical;
  });
}

int run_bifurcate(const Scenario& sc, double from, double to, int steps,
                  const std::optional<std::string>& output_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!sc.params.two_ideology()) throw ValidationError("model", "bifurcate needs a two_ideology scenario");
    std::vector<FieldIssue> issues;
    if (!(std::isfinite(from) && from >= 0.0)) issues.push_back({"from", "delta range must start at >= 0"});
    if (!(std::isfinite(to) && from < to)) issues.push_back({"to", "need finite to > from"});
    if (steps < 2) issues.push_back({"steps", "must be >= 2"});
    if (!issues.empty()) throw ValidationError(std::move(issues));

    SweepSpec grid_spec{"delta", from, to, steps, {}};
    const auto grid = grid_spec.grid();

    std::ofstream file;
    if (output_path) file = open_output(*output_path);
    std::ostream& csv = output_path ? static_cast<std::ostream&>(file) : out;
    std::ostream& summary = output_path ? out : err;
    csv << "delta,i1_delta,i2_delta,x_star_stability,x_star_star_stability,coexistence,"
           "coex_S,coex_E1,coex_R1,coex_E2,coex_R2,coexistence_stability\n";

    struct Row {
      double delta;
      std::string signature;
    };
    std::vector<Row> rows;
    std::vector<std::string> warnings;
    for (double d : grid) {
      ModelParams p = sc.params;
      p.delta = d;
      std::vector<std::string> cells(11);
      try {
        const Analysis a = analyze(p);
        const auto* xs = find_kind(a, EquilibriumKind::Dominance1);
        const auto* xss = find_kind(a, EquilibriumKind::Dominance2);
        const auto* co = find_kind(a, EquilibriumKind::Coexistence);
        const std::size_t n_co = coexistence_count(a);
        cells[0] = opt_real(a.regime.invasion.i1);
        cells[1] = opt_real(a.regime.invasion.i2);
        cells[2] = stability_or_absent(xs);
        cells[3] = stability_or_absent(xss);
        cells[4] = std::to_string(n_co);
        if (co) {
          for (std::size_t i = 0; i < 5; ++i) cells[5 + i] = format_real(co->state[i]);
        }
        cells[10] = stability_or_absent(co);
        rows.push_back({d, "x* " + cells[2] + ", x** " + cells[3] + ", coexistence " +
                               (n_co > 1 ? std::to_string(n_co) + " roots, " : "") + cells[10]});
      } catch (const std::exception& e) {
        std::fill(cells.begin(), cells.end(), std::string());
        warnings.push_back("delta=" + format_real(d) + ": " + e.what());
      }
      csv << format_real(d);
      for (const auto& c : cells) csv << ',' << c;
      csv << '\n';
    }
    if (output_path) finish_output(file, *output_path);

    struct Transition {
      double lo, hi;
      std::string before, after;
    };
    std::vector<Transition> transitions;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (rows[k].signature != rows[k - 1].signature) {
        transitions.push_back({rows[k - 1].delta, rows[k].delta, rows[k - 1].signature, rows[k].signature});
      }
    }

    const RegimeReport rg = classify_regime(sc.params);
    summary << "bifurcation scan over delta in [" << format_real(from) << ", " << format_real(to) << "], " << steps
            << " points\n";
    summary << "R1 = " << format_real(*rg.r1) << ", R2 = " << format_real(*rg.r2) << ", regime "
            << to_string(rg.label) << '\n';
    if (transitions.empty()) {
      summary << "no qualitative change across the scanned range";
      if (!rows.empty()) summary << " (" << rows.front().signature << ")";
      summary << '\n';
    }
    for (const auto& t : transitions) {
      summary << "transition in (" << format_real(t.lo) << ", " << format_real(t.hi) << "]: " << t.before << "  ->  "
              << t.after << '\n';
    }
    auto compare = [&](const char* name, const std::optional<Threshold>& th) {
      if (!th || !th->is_positive()) {
        summary << name << ": no positive crossing";
        if (th) summary << " [" << to_string(th->status) << "]";
        summary << '\n';
        return;
      }
      summary << name << " = " << format_real(th->value) << ": ";
      if (th->value < from || th->value > to) {
        summary << "outside the scanned range\n";
        return;
      }
      const auto hit = std::find_if(transitions.begin(), transitions.end(),
                                    [&](const Transition& t) { return t.lo <= th->value && th->value <= t.hi; });
      if (hit != transitions.end()) {
        summary << "matches transition in (" << format_real(hit->lo) << ", " << format_real(hit->hi) << "]\n";
      } else {
        summary << "MISMATCH: no transition observed within grid resolution\n";
      }
    };
    compare("delta*", rg.thresholds.delta_star);
    compare("delta**", rg.thresholds.delta_star_star);
    if (!warnings.empty()) {
      summary << "warnings (" << warnings.size() << "):\n";
      for (const auto& w : warnings) summary << "  " << w << '\n';
    }
    return rows.empty() ? kExitNumerical : kExitOk;
  });
}

int run_verify(const Scenario& sc, const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<FieldIssue> issues;
    if (opts.trials < 1) issues.push_back({"trials", "must be >= 1"});
    if (!(std::isfinite(opts.t_end) && opts.t_end > 0.0)) issues.push_back({"t-end", "must be finite and > 0"});
    if (!issues.empty()) throw ValidationError(std::move(issues));

    const VerifyPlan plan = plan_for(sc.params);
    const std::uint64_t seed = opts.seed.value_or(sc.seed);
    SplitMix64 rng(seed);

    std::vector<TrialResult> trials;
    trials.reserve(static_cast<std::size_t>(opts.trials));
    for (int k = 0; k < opts.trials; ++k) {
      const State x0 = (k == 0 && sc.initial) ? *sc.initial : random_initial(sc.params, rng);
      trials.push_back(run_trial(sc, plan, x0, opts));
    }

    std::size_t conv_pass = 0, conv_n = 0, dec_pass = 0, dec_n = 0, reg_pass = 0, reg_n = 0, skipped = 0;
    bool all_ok = true;
    for (const auto& t : trials) {
      if (t.skipped) {
        ++skipped;
        continue;
      }
      all_ok = all_ok && t.passed();
      if (t.integration_error) continue;
      ++reg_n;
      reg_pass += t.region.passed;
      if (t.convergence) {
        ++conv_n;
        conv_pass += t.convergence->converged;
      }
      if (t.decrease) {
        ++dec_n;
        dec_pass += t.decrease->passed;
      }
    }

    const RegimeReport rg = classify_regime(sc.params);
    out << "verify: model " << model_name(sc.model) << ", regime " << to_string(rg.label) << '\n';
    out << "theorem: " << plan.theorem << '\n';
    for (const auto& n : plan.notes) out << "  " << n << '\n';
    if (plan.target) out << "target " << plan.target_name << ": " << format_state(*plan.target) << '\n';
    if (plan.certificate) {
      out << "certificate: " << to_string(plan.certificate->kind) << " (" << to_string(plan.certificate->model)
          << ")\n";
    }
    out << "trials: " << opts.trials << ", seed " << seed << ", t_end " << format_real(opts.t_end)
        << ", tolerance " << format_real(opts.tolerance) << '\n';
    if (conv_n) out << "  convergence: " << conv_pass << "/" << conv_n << " pass\n";
    if (dec_n) out << "  lyapunov decrease: " << dec_pass << "/" << dec_n << " pass\n";
    out << "  invariant region: " << reg_pass << "/" << reg_n << " pass\n";
    if (skipped) out << "  skipped (outside the theorem's domain): " << skipped << '\n';
    for (std::size_t k = 0; k < trials.size(); ++k) {
      const auto& t = trials[k];
      if (t.passed()) continue;
      out << "FAIL trial " << k << " from " << format_state(t.initial) << ":";
      if (t.integration_error) out << " integration error: " << *t.integration_error;
      if (!t.integration_error && !t.region.passed) out << " invariant region violated;";
      if (t.convergence && !t.convergence->converged) {
        out << " final distance " << format_real(t.convergence->final_distance) << ";";
      }
      if (t.decrease && !t.decrease->passed) {
        out << " lyapunov increase " << format_real(t.decrease->max_increase) << " at sample "
            << t.decrease->worst_step << ";";
      }
      out << '\n';
    }
    out << "result: " << (all_ok ? "PASS" : "FAIL") << '\n';

    if (opts.output_path) {
      ordered_json j;
      j["model"] = model_name(sc.model);
      j["regime"] = to_string(rg.label);
      j["theorem"] = plan.theorem;
      j["notes"] = plan.notes;
      j["target"] = plan.target ? state_json(*plan.target) : ordered_json(nullptr);
      j["seed"] = seed;
      j["t_end"] = opts.t_end;
      j["tolerance"] = opts.tolerance;
      ordered_json arr = ordered_json::array();
      for (const auto& t : trials) {
        ordered_json tj;
        tj["initial"] = state_json(t.initial);
        tj["passed"] = t.passed();
        if (t.skipped) tj["skipped"] = t.skip_reason;
        if (t.integration_error) tj["integration_error"] = *t.integration_error;
        if (!t.skipped && !t.integration_error) {
          tj["region"] = {{"passed", t.region.passed},
                          {"min_component", t.region.min_component},
                          {"max_excess", t.region.max_excess},
                          {"max_comparison_excess", t.region.max_comparison_excess}};
        }
        if (t.convergence) {
          tj["convergence"] = {{"converged", t.convergence->converged},
                               {"entry_time", opt_json(t.convergence->entry_time)},
                               {"final_distance", t.convergence->final_distance}};
        }
        if (t.decrease) {
          tj["lyapunov"] = {{"passed", t.decrease->passed},
                            {"max_increase", t.decrease->max_increase},
                            {"first_value", t.decrease->first_value},
                            {"last_value", t.decrease->last_value}};
        }
        arr.push_back(tj);
      }
      j["trials"] = arr;
      j["passed"] = all_ok;
      std::ofstream f = open_output(*opts.output_path);
      f << j.dump(2) << '\n';
      finish_output(f, *opts.output_path);
    }
    return all_ok ? kExitOk : kExitVerificationFailed;
  });
}

}  // namespace exclab::cli
