#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "exclusion_lab/cli.hpp"
#include "json.hpp"

namespace exclab::cli {

using nlohmann::json;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

const std::vector<std::string> kIdeologyKeys{"beta", "d_e", "d_r", "c_e", "c_r", "q_e"};
const std::set<std::string> kTopKeys{"model", "lambda", "mu", "ideology1", "ideology2",
                                     "delta", "initial", "integrator", "seed"};

class Reader {
 public:
  std::vector<FieldIssue> issues;

  std::optional<double> number(const json& obj, const std::string& key, const std::string& field,
                               bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) issues.push_back({field, "missing"});
      return std::nullopt;
    }
    if (!it->is_number()) {
      issues.push_back({field, "must be a number"});
      return std::nullopt;
    }
    return it->get<double>();
  }

  IdeologyParams ideology(const json& obj, const std::string& prefix) {
    IdeologyParams ip;
    if (!obj.is_object()) {
      issues.push_back({prefix, "must be an object"});
      return ip;
    }
    for (const auto& [key, value] : obj.items()) {
      if (key == "q_r") {
        issues.push_back({prefix + ".q_r", "not a scenario key; q_r is always 1 - q_e"});
      } else if (std::find(kIdeologyKeys.begin(), kIdeologyKeys.end(), key) == kIdeologyKeys.end()) {
        issues.push_back({prefix + "." + key, "unknown key"});
      }
    }
    double* slots[] = {&ip.beta, &ip.d_e, &ip.d_r, &ip.c_e, &ip.c_r, &ip.q_e};
    for (std::size_t i = 0; i < kIdeologyKeys.size(); ++i) {
      if (auto v = number(obj, kIdeologyKeys[i], prefix + "." + kIdeologyKeys[i], true)) *slots[i] = *v;
    }
    return ip;
  }
};

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("scenario", "top level must be a JSON object");

  Reader rd;
  Scenario sc;
  for (const auto& [key, value] : doc.items()) {
    if (!kTopKeys.count(key)) rd.issues.push_back({key, "unknown key"});
  }

  auto model_it = doc.find("model");
  if (model_it == doc.end()) {
    rd.issues.push_back({"model", "missing"});
  } else if (*model_it == "bare_bones") {
    sc.model = ModelKind::BareBones;
  } else if (*model_it == "two_ideology") {
    sc.model = ModelKind::TwoIdeology;
  } else {
    rd.issues.push_back({"model", "must be \"bare_bones\" or \"two_ideology\""});
  }
  const bool two = sc.model == ModelKind::TwoIdeology;

  if (auto v = rd.number(doc, "lambda", "lambda", true)) sc.params.lambda = *v;
  if (auto v = rd.number(doc, "mu", "mu", true)) sc.params.mu = *v;
  if (doc.contains("ideology1")) {
    sc.params.ideology1 = rd.ideology(doc["ideology1"], "ideology1");
  } else {
    rd.issues.push_back({"ideology1", "missing"});
  }
  if (doc.contains("ideology2")) {
    if (two) {
      sc.params.ideology2 = rd.ideology(doc["ideology2"], "ideology2");
    } else {
      rd.issues.push_back({"ideology2", "only allowed for model \"two_ideology\""});
    }
  } else if (two) {
    rd.issues.push_back({"ideology2", "missing"});
  }
  if (doc.contains("delta")) {
    if (two) {
      if (auto v = rd.number(doc, "delta", "delta", false)) sc.params.delta = *v;
    } else {
      rd.issues.push_back({"delta", "only allowed for model \"two_ideology\""});
    }
  }

  if (auto it = doc.find("integrator"); it != doc.end()) {
    if (!it->is_object()) {
      rd.issues.push_back({"integrator", "must be an object"});
    } else {
      for (const auto& [key, value] : it->items()) {
        if (key != "rtol" && key != "atol") rd.issues.push_back({"integrator." + key, "unknown key"});
      }
      if (auto v = rd.number(*it, "rtol", "integrator.rtol", false)) sc.integrator.rtol = *v;
      if (auto v = rd.number(*it, "atol", "integrator.atol", false)) sc.integrator.atol = *v;
    }
  }

  if (auto it = doc.find("seed"); it != doc.end()) {
    if (it->is_number_unsigned()) {
      sc.seed = it->get<std::uint64_t>();
    } else {
      rd.issues.push_back({"seed", "must be a non-negative integer"});
    }
  }

  if (auto it = doc.find("initial"); it != doc.end()) {
    const std::size_t dim = two ? 5 : 3;
    if (!it->is_array()) {
      rd.issues.push_back({"initial", "must be an array"});
    } else if (it->size() != dim) {
      rd.issues.push_back({"initial", "expected " + std::to_string(dim) + " components, got " +
                                          std::to_string(it->size())});
    } else {
      State x(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        const json& v = (*it)[i];
        const std::string field = "initial[" + std::to_string(i) + "]";
        if (!v.is_number()) {
          rd.issues.push_back({field, "must be a number"});
        } else if (!(v.get<double>() >= 0.0) || !std::isfinite(v.get<double>())) {
          rd.issues.push_back({field, "must be finite and >= 0"});
        } else {
          x[i] = v.get<double>();
        }
      }
      sc.initial = x;
    }
  }

  // Range checks only make sense once every field parsed.
  if (rd.issues.empty()) {
    try {
      validate(sc.params);
    } catch (const ValidationError& e) {
      rd.issues.insert(rd.issues.end(), e.issues().begin(), e.issues().end());
    }
    try {
      sc.integrator.validate();
    } catch (const ValidationError& e) {
      rd.issues.insert(rd.issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  if (!rd.issues.empty()) throw ValidationError(std::move(rd.issues));
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading scenario file '" + path + "'");
  return parse_scenario(buf.str());
}

State default_initial(const ModelParams& p) {
  State x(p.state_dim());
  const double cap = p.carrying_level();
  x[idx::S] = cap;
  for (std::size_t i = 1; i < x.size(); ++i) x[i] = 1e-3 * cap;
  return x;
}

namespace {

double* resolve(ModelParams& p, const std::string& path) {
  if (path == "lambda") return &p.lambda;
  if (path == "mu") return &p.mu;
  if (path == "delta") return p.two_ideology() ? &p.delta : nullptr;
  const auto dot = path.find('.');
  if (dot == std::string::npos) return nullptr;
  const std::string head = path.substr(0, dot);
  const std::string leaf = path.substr(dot + 1);
  IdeologyParams* ip = nullptr;
  if (head == "ideology1") ip = &p.ideology1;
  if (head == "ideology2" && p.ideology2) ip = &*p.ideology2;
  if (!ip) return nullptr;
  if (leaf == "beta") return &ip->beta;
  if (leaf == "d_e") return &ip->d_e;
  if (leaf == "d_r") return &ip->d_r;
  if (leaf == "c_e") return &ip->c_e;
  if (leaf == "c_r") return &ip->c_r;
  if (leaf == "q_e") return &ip->q_e;
  return nullptr;
}

}  // namespace

double get_param(const ModelParams& p, const std::string& path) {
  ModelParams copy = p;
  const double* slot = resolve(copy, path);
  if (!slot) throw ValidationError("param", "unknown parameter path '" + path + "'");
  return *slot;
}

void set_param(ModelParams& p, const std::string& path, double value) {
  double* slot = resolve(p, path);
  if (!slot) throw ValidationError("param", "unknown parameter path '" + path + "'");
  *slot = value;
}

std::vector<std::string> sweep_quantities(ModelKind model) {
  if (model == ModelKind::BareBones) {
    return {"r0", "regime", "x0_stability", "x_star_exists", "x_star_stability", "equilibria_count"};
  }
  return {"r1",
          "r2",
          "i1_delta",
          "i2_delta",
          "delta_star",
          "delta_star_star",
          "sigma",
          "regime",
          "x0_stability",
          "x_star_exists",
          "x_star_stability",
          "x_star_star_exists",
          "x_star_star_stability",
          "coexistence",
          "coexistence_stability",
          "equilibria_count"};
}

void SweepSpec::validate(const Scenario& sc) const {
  std::vector<FieldIssue> issues;
  ModelParams probe = sc.params;
  if (!resolve(probe, param)) issues.push_back({"param", "unknown parameter path '" + param + "'"});
  if (!(std::isfinite(from) && std::isfinite(to) && from < to)) issues.push_back({"from/to", "need finite from < to"});
  if (steps < 2) issues.push_back({"steps", "must be >= 2"});
  if (quantities.empty()) issues.push_back({"record", "quantity list is empty"});
  const auto known = sweep_quantities(sc.model);
  std::set<std::string> seen;
  for (const auto& q : quantities) {
    if (std::find(known.begin(), known.end(), q) == known.end()) {
      issues.push_back({"record", "unknown quantity '" + q + "' for this model"});
    } else if (!seen.insert(q).second) {
      issues.push_back({"record", "duplicate quantity '" + q + "'"});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::vector<double> SweepSpec::grid() const {
  std::vector<double> g(static_cast<std::size_t>(steps));
  const double width = to - from;
  for (int k = 0; k < steps; ++k) g[k] = from + width * k / (steps - 1);
  g.back() = to;
  return g;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

State random_initial(const ModelParams& p, SplitMix64& rng) {
  const double cap = p.carrying_level();
  State x(p.state_dim());
  while (true) {
    for (double& v : x) v = cap * rng.uniform();
    if (x.total() <= cap) return x;
  }
}

}  // namespace exclab::cli
