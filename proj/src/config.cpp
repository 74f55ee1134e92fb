#include "idfield/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "idfield/stable.hpp"

namespace idfield {

namespace {

using nlohmann::json;

std::string join_messages(const std::vector<std::string>& msgs) {
  std::ostringstream os;
  os << "config validation failed:";
  for (const auto& m : msgs) os << "\n  " << m;
  return os.str();
}

struct Parser {
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }

  const json* child(const json& j, const std::string& path,
                    const std::string& key, bool required) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return nullptr;
    }
    auto it = j.find(key);
    if (it == j.end()) {
      if (required)
        fail(path.empty() ? key : path + "." + key, "required field missing");
      return nullptr;
    }
    return &*it;
  }

  double number(const json& j, const std::string& path, double fallback,
                bool required = false) {
    if (j.is_number()) return j.get<double>();
    fail(path, "expected a number");
    (void)required;
    return fallback;
  }

  double number_field(const json& j, const std::string& path,
                      const std::string& key, double fallback,
                      bool required = false) {
    const json* c = child(j, path, key, required);
    if (!c) return fallback;
    return number(*c, path + "." + key, fallback);
  }

  Point point(const json& j, const std::string& path) {
    Point p{};
    if (!j.is_array() || j.empty() || j.size() > 3) {
      fail(path, "expected an array of 1 to 3 numbers");
      return p;
    }
    for (std::size_t i = 0; i < j.size(); ++i)
      p[i] = number(j[i], path + "[" + std::to_string(i) + "]", 0.0);
    return p;
  }
};

std::function<double(const Point&)> parse_scalar_field(
    Parser& p, const json& j, const std::string& path, double fallback) {
  if (j.is_number()) {
    const double v = j.get<double>();
    return [v](const Point&) { return v; };
  }
  if (!j.is_object()) {
    p.fail(path, "expected a number or an object with a 'kind'");
    return [fallback](const Point&) { return fallback; };
  }
  const std::string kind = j.value("kind", "");
  if (kind == "constant") {
    const double v = p.number_field(j, path, "value", fallback, true);
    return [v](const Point&) { return v; };
  }
  if (kind == "indicator_box") {
    const json* lo_j = p.child(j, path, "lo", true);
    const json* hi_j = p.child(j, path, "hi", true);
    const double inside = p.number_field(j, path, "inside", 1.0);
    const double outside = p.number_field(j, path, "outside", 0.0);
    if (!lo_j || !hi_j) return [fallback](const Point&) { return fallback; };
    const Point lo = p.point(*lo_j, path + ".lo");
    const Point hi = p.point(*hi_j, path + ".hi");
    return [lo, hi, inside, outside](const Point& x) {
      for (int d = 0; d < 3; ++d)
        if (x[d] < lo[d] || x[d] > hi[d]) return outside;
      return inside;
    };
  }
  p.fail(path + ".kind", "unknown scalar field kind '" + kind + "'");
  return [fallback](const Point&) { return fallback; };
}

LevyMeasure parse_rho_descriptor(Parser& p, const json& j,
                                 const std::string& path) {
  const std::string kind = j.value("kind", "none");
  try {
    if (kind == "none") return LevyMeasure::none();
    if (kind == "point_masses") {
      const json* atoms_j = p.child(j, path, "atoms", true);
      std::vector<std::pair<double, double>> atoms;
      if (atoms_j && atoms_j->is_array()) {
        for (std::size_t i = 0; i < atoms_j->size(); ++i) {
          const json& a = (*atoms_j)[i];
          const std::string apath =
              path + ".atoms[" + std::to_string(i) + "]";
          if (!a.is_array() || a.size() != 2) {
            p.fail(apath, "expected [location, mass]");
            continue;
          }
          atoms.emplace_back(p.number(a[0], apath + "[0]", 1.0),
                             p.number(a[1], apath + "[1]", 0.0));
        }
      } else if (atoms_j) {
        p.fail(path + ".atoms", "expected an array");
      }
      return LevyMeasure::point_masses(std::move(atoms));
    }
    if (kind == "stable_pair") {
      return LevyMeasure::stable_pair(
          p.number_field(j, path, "alpha", 1.5, true),
          p.number_field(j, path, "c_plus", 0.0, true),
          p.number_field(j, path, "c_minus", 0.0, true));
    }
    if (kind == "tempered") {
      return LevyMeasure::tempered(
          p.number_field(j, path, "alpha", 1.5, true),
          p.number_field(j, path, "c_plus", 0.0, true),
          p.number_field(j, path, "c_minus", 0.0, true),
          p.number_field(j, path, "theta", 1.0, true));
    }
  } catch (const std::invalid_argument& e) {
    p.fail(path, e.what());
    return LevyMeasure::none();
  }
  p.fail(path + ".kind", "unknown jump measure kind '" + kind + "'");
  return LevyMeasure::none();
}

KernelFamily parse_kernels(Parser& p, const json& j, const std::string& path,
                           const std::optional<Point>& /*unused*/) {
  KernelFamily k;
  const std::string preset = j.value("preset", "");
  const std::string sign = j.value("sign_class", "mixed");
  if (sign == "nonnegative")
    k.sign_class = SignClass::Nonnegative;
  else if (sign == "nonpositive")
    k.sign_class = SignClass::Nonpositive;
  else if (sign == "mixed")
    k.sign_class = SignClass::Mixed;
  else
    p.fail(path + ".sign_class", "expected nonnegative|nonpositive|mixed");

  if (preset == "constant") {
    const double v = p.number_field(j, path, "value", 0.0, true);
    k.eval = [v](const Point&, const Point&) { return v; };
    return k;
  }
  if (preset == "indicator") {
    const json* lo_j = p.child(j, path, "lo", true);
    const json* hi_j = p.child(j, path, "hi", true);
    const bool translate = j.value("translate", false);
    const double amp = p.number_field(j, path, "amplitude", 1.0);
    if (!lo_j || !hi_j) return k;
    const Point lo = p.point(*lo_j, path + ".lo");
    const Point hi = p.point(*hi_j, path + ".hi");
    k.eval = [lo, hi, translate, amp](const Point& t, const Point& x) {
      for (int d = 0; d < 3; ++d) {
        const double shift = translate ? t[d] : 0.0;
        if (x[d] < lo[d] + shift || x[d] > hi[d] + shift) return 0.0;
      }
      return amp;
    };
    if (translate) {
      k.support_hint = [lo, hi](const Point& t) {
        Box b;
        b.dim = 3;
        for (int d = 0; d < 3; ++d) {
          b.lo[d] = lo[d] + t[d];
          b.hi[d] = hi[d] + t[d];
        }
        return b;
      };
    }
    return k;
  }
  if (preset == "bump") {
    const double r = p.number_field(j, path, "radius", 0.25, true);
    const double amp = p.number_field(j, path, "amplitude", 1.0);
    if (!(r > 0.0)) p.fail(path + ".radius", "must be > 0");
    k.eval = [r, amp](const Point& t, const Point& x) {
      const double d = distance(x, t);
      const double q = 1.0 - d * d / (r * r);
      return q > 0.0 ? amp * q * q : 0.0;
    };
    return k;
  }
  if (preset == "gauss") {
    const double w = p.number_field(j, path, "width", 0.2, true);
    const double amp = p.number_field(j, path, "amplitude", 1.0);
    if (!(w > 0.0)) p.fail(path + ".width", "must be > 0");
    k.eval = [w, amp](const Point& t, const Point& x) {
      const double d = distance(x, t);
      return amp * std::exp(-0.5 * d * d / (w * w));
    };
    return k;
  }
  if (preset == "ramp_indicator") {
    const json* lo_j = p.child(j, path, "lo", true);
    const json* hi_j = p.child(j, path, "hi", true);
    const json* base_j = p.child(j, path, "base", true);
    if (!lo_j || !hi_j || !base_j) return k;
    const Point lo = p.point(*lo_j, path + ".lo");
    const Point hi = p.point(*hi_j, path + ".hi");
    const Point base = p.point(*base_j, path + ".base");
    k.eval = [lo, hi, base](const Point& t, const Point& x) {
      for (int d = 0; d < 3; ++d)
        if (x[d] < lo[d] || x[d] > hi[d]) return 0.0;
      return 1.0 + distance(t, base);
    };
    return k;
  }
  if (preset == "step_profile") {
    const json* lo_j = p.child(j, path, "lo", true);
    const json* hi_j = p.child(j, path, "hi", true);
    const json* base_j = p.child(j, path, "base", true);
    const double at_base = p.number_field(j, path, "at_base", 2.0);
    const double elsewhere = p.number_field(j, path, "elsewhere", 1.0);
    if (!lo_j || !hi_j || !base_j) return k;
    const Point lo = p.point(*lo_j, path + ".lo");
    const Point hi = p.point(*hi_j, path + ".hi");
    const Point base = p.point(*base_j, path + ".base");
    k.eval = [lo, hi, base, at_base, elsewhere](const Point& t,
                                                const Point& x) {
      for (int d = 0; d < 3; ++d)
        if (x[d] < lo[d] || x[d] > hi[d]) return 0.0;
      return distance(t, base) < 1e-12 ? at_base : elsewhere;
    };
    return k;
  }
  p.fail(path + ".preset", "unknown kernel preset '" + preset + "'");
  k.eval = [](const Point&, const Point&) { return 0.0; };
  return k;
}

const std::set<std::string> kKnownExperiments{
    "cf_check",     "independence", "association", "negative_association",
    "id",           "continuity",   "stable_spectral", "null_check"};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> msgs)
    : std::runtime_error(join_messages(msgs)), messages(std::move(msgs)) {}

ExperimentConfig parse_config(const nlohmann::json& j) {
  Parser p;
  ExperimentConfig cfg;

  // domain
  Box box;
  std::array<int, 3> resolution{1, 1, 1};
  DomainPartition::Density density;
  if (const json* dom = p.child(j, "", "domain", true)) {
    const json* box_j = p.child(*dom, "domain", "box", true);
    const json* res_j = p.child(*dom, "domain", "resolution", true);
    if (box_j) {
      const json* lo_j = p.child(*box_j, "domain.box", "lo", true);
      const json* hi_j = p.child(*box_j, "domain.box", "hi", true);
      if (lo_j && hi_j) {
        box.lo = p.point(*lo_j, "domain.box.lo");
        box.hi = p.point(*hi_j, "domain.box.hi");
        box.dim = static_cast<int>(lo_j->is_array() ? lo_j->size() : 1);
        if (hi_j->is_array() &&
            hi_j->size() != static_cast<std::size_t>(box.dim))
          p.fail("domain.box", "lo and hi must have the same dimension");
      }
    }
    if (res_j) {
      if (!res_j->is_array() || res_j->empty() || res_j->size() > 3) {
        p.fail("domain.resolution", "expected an array of 1 to 3 integers");
      } else {
        for (std::size_t i = 0; i < res_j->size(); ++i) {
          const json& r = (*res_j)[i];
          if (!r.is_number_integer() || r.get<long>() < 1)
            p.fail("domain.resolution[" + std::to_string(i) + "]",
                   "grid resolution must be an integer >= 1");
          else
            resolution[i] = static_cast<int>(r.get<long>());
        }
      }
    }
    if (const json* dens = p.child(*dom, "domain", "density", false))
      density = parse_scalar_field(p, *dens, "domain.density", 1.0);
  }

  // characteristics
  cfg.chars.a = [](const Point&) { return 0.0; };
  cfg.chars.sigma2 = [](const Point&) { return 0.0; };
  cfg.chars.rho = [](const Point&) { return LevyMeasure::none(); };
  if (const json* ch = p.child(j, "", "characteristics", false)) {
    if (const json* a = p.child(*ch, "characteristics", "a", false))
      cfg.chars.a = parse_scalar_field(p, *a, "characteristics.a", 0.0);
    if (const json* s2 = p.child(*ch, "characteristics", "sigma2", false))
      cfg.chars.sigma2 =
          parse_scalar_field(p, *s2, "characteristics.sigma2", 0.0);
    if (const json* rho = p.child(*ch, "characteristics", "rho", false)) {
      if (rho->is_object() && rho->value("kind", "") == "stable_bridge") {
        // resolved after the stable section below
      } else {
        const LevyMeasure nu =
            parse_rho_descriptor(p, *rho, "characteristics.rho");
        cfg.chars.rho = [nu](const Point&) { return nu; };
      }
    }
  }

  // stable section (optional)
  bool want_bridge = false;
  if (const json* ch = p.child(j, "", "characteristics", false)) {
    if (const json* rho = p.child(*ch, "characteristics", "rho", false))
      want_bridge =
          rho->is_object() && rho->value("kind", "") == "stable_bridge";
  }
  if (const json* st = p.child(j, "", "stable", want_bridge)) {
    const double alpha = p.number_field(*st, "stable", "alpha", 1.5, true);
    if (!(alpha > 0.0 && alpha < 2.0))
      p.fail("stable.alpha", "must lie in (0,2)");
    cfg.stable_alpha = alpha;
    cfg.stable_beta = [](const Point&) { return 0.0; };
    if (const json* b = p.child(*st, "stable", "beta", false))
      cfg.stable_beta = parse_scalar_field(p, *b, "stable.beta", 0.0);
  }
  if (want_bridge) {
    if (cfg.stable_alpha) {
      try {
        cfg.chars = stable_local_characteristics(*cfg.stable_alpha,
                                                 cfg.stable_beta);
      } catch (const std::invalid_argument& e) {
        p.fail("characteristics.rho", e.what());
      }
    } else {
      p.fail("characteristics.rho",
             "stable_bridge requires the 'stable' section");
    }
  }

  // kernels and t-points
  if (const json* k = p.child(j, "", "kernels", true))
    cfg.kernels = parse_kernels(p, *k, "kernels", std::nullopt);
  if (const json* ts = p.child(j, "", "t_points", true)) {
    if (!ts->is_array() || ts->empty()) {
      p.fail("t_points", "expected a nonempty array of points");
    } else {
      for (std::size_t i = 0; i < ts->size(); ++i)
        cfg.t_points.push_back(
            p.point((*ts)[i], "t_points[" + std::to_string(i) + "]"));
    }
  }

  // run parameters
  cfg.gamma = p.number_field(j, "", "gamma", 1.0);
  if (!(cfg.gamma > 0.0)) p.fail("gamma", "must be > 0");
  const double samples = p.number_field(j, "", "samples", 10000.0);
  if (!(samples >= 1.0))
    p.fail("samples", "must be >= 1");
  else
    cfg.samples = static_cast<long>(samples);
  cfg.epsilon = p.number_field(j, "", "epsilon", 0.01);
  if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0))
    p.fail("epsilon", "must lie in (0,1]");
  const double level = p.number_field(j, "", "level", 1.0);
  if (!(level >= 1.0))
    p.fail("level", "must be >= 1");
  else
    cfg.level = static_cast<int>(level);
  const double seed = p.number_field(j, "", "seed", 0.0);
  cfg.seed = static_cast<std::uint64_t>(seed);

  // experiments
  if (const json* exps = p.child(j, "", "experiments", true)) {
    if (!exps->is_array()) {
      p.fail("experiments", "expected an array");
    } else {
      for (std::size_t i = 0; i < exps->size(); ++i) {
        const json& e = (*exps)[i];
        const std::string path = "experiments[" + std::to_string(i) + "]";
        if (!e.is_object()) {
          p.fail(path, "expected an object");
          continue;
        }
        const std::string name = e.value("name", "");
        if (!kKnownExperiments.count(name)) {
          p.fail(path + ".name", "unknown experiment '" + name + "'");
          continue;
        }
        // per-experiment required parameters
        auto require = [&](const char* key) {
          if (!e.contains(key))
            p.fail(path + "." + key, "required for " + name);
        };
        if (name == "independence") {
          require("K");
          require("L");
        } else if (name == "negative_association") {
          require("I");
          require("J");
        } else if (name == "continuity") {
          require("radii");
          require("eps_x");
        } else if (name == "stable_spectral" || name == "null_check") {
          if (!cfg.stable_alpha)
            p.fail(path, name + " requires the 'stable' section");
        }
        cfg.experiments.push_back(ExperimentRequest{name, e});
      }
    }
  }

  // t-point indices must be resolvable
  const auto check_indices = [&](const json& e, const std::string& path,
                                 const char* key) {
    if (!e.contains(key)) return;
    const json& arr = e[key];
    if (!arr.is_array()) {
      p.fail(path + "." + key, "expected an array of t-point indices");
      return;
    }
    for (const auto& v : arr) {
      if (!v.is_number_integer() || v.get<long>() < 0 ||
          v.get<long>() >= static_cast<long>(cfg.t_points.size()))
        p.fail(path + "." + key, "index out of range of t_points");
    }
  };
  for (std::size_t i = 0; i < cfg.experiments.size(); ++i) {
    const std::string path = "experiments[" + std::to_string(i) + "]";
    const json& e = cfg.experiments[i].params;
    check_indices(e, path, "K");
    check_indices(e, path, "L");
    check_indices(e, path, "I");
    check_indices(e, path, "J");
    if (e.contains("t_index")) {
      const json& ti = e["t_index"];
      if (!ti.is_number_integer() || ti.get<long>() < 0 ||
          ti.get<long>() >= static_cast<long>(cfg.t_points.size()))
        p.fail(path + ".t_index", "index out of range of t_points");
    }
  }

  if (!p.errors.empty()) throw ConfigError(std::move(p.errors));

  try {
    cfg.partition = DomainPartition::uniform_grid(box, resolution, density);
  } catch (const std::invalid_argument& e) {
    throw ConfigError({std::string("domain: ") + e.what()});
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("JSON parse error: ") + e.what()});
  }
  return parse_config(j);
}

}  // namespace idfield
