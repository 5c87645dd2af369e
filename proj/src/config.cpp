#include "p23/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include <json.hpp>

namespace p23 {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("unknown key \"" + it.key() + "\" in " + context);
  }
}

double get_number(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key))
    throw ConfigError("missing key \"" + std::string(key) + "\" in " + ctx);
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError("key \"" + std::string(key) + "\" in " + ctx +
                      " must be a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const char* key, double fallback,
                     const std::string& ctx) {
  return obj.contains(key) ? get_number(obj, key, ctx) : fallback;
}

int get_int(const json& obj, const char* key, const std::string& ctx) {
  const double v = get_number(obj, key, ctx);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("key \"" + std::string(key) + "\" in " + ctx +
                      " must be an integer");
  return i;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

Design parse_design(const std::string& s) {
  if (s == "A") return Design::A;
  if (s == "B") return Design::B;
  if (s == "C") return Design::C;
  if (s == "D") return Design::D;
  throw ConfigError("design must be one of \"A\", \"B\", \"C\", \"D\"");
}

GateSpec parse_gates(const json& root) {
  GateSpec gates;
  if (!root.contains("gates")) return gates;
  const json& g = root.at("gates");
  check(g.is_object(), "gates must be an object");
  reject_unknown_keys(g, {"phi_t", "phi_e", "c_t", "c_e", "prior_a", "prior_b"},
                      "gates");
  gates.phi_t = get_number_or(g, "phi_t", gates.phi_t, "gates");
  gates.phi_e = get_number_or(g, "phi_e", gates.phi_e, "gates");
  gates.c_t = get_number_or(g, "c_t", gates.c_t, "gates");
  gates.c_e = get_number_or(g, "c_e", gates.c_e, "gates");
  gates.prior.a = get_number_or(g, "prior_a", gates.prior.a, "gates");
  gates.prior.b = get_number_or(g, "prior_b", gates.prior.b, "gates");
  for (double v : {gates.phi_t, gates.phi_e, gates.c_t, gates.c_e})
    check(v > 0.0 && v < 1.0, "gate probabilities must be in (0, 1)");
  check(gates.prior.a > 0.0 && gates.prior.b > 0.0,
        "gate prior parameters must be > 0");
  return gates;
}

DesirabilitySpec parse_desirability(const json& root) {
  const bool has_utility = root.contains("utility");
  const bool has_tradeoff = root.contains("tradeoff");
  check(!(has_utility && has_tradeoff),
        "specify either utility or tradeoff, not both");
  if (has_tradeoff) {
    const json& t = root.at("tradeoff");
    check(t.is_object(), "tradeoff must be an object");
    reject_unknown_keys(t, {"w"}, "tradeoff");
    TradeoffSpec spec{get_number(t, "w", "tradeoff")};
    check(spec.w >= 0.0, "tradeoff weight must be >= 0");
    return spec;
  }
  UtilitySpec spec;
  if (!has_utility) return spec;
  const json& u = root.at("utility");
  check(u.is_object(), "utility must be an object");
  reject_unknown_keys(u, {"u1", "u2", "u3", "u4", "orientation"}, "utility");
  spec.u1 = get_number(u, "u1", "utility");
  spec.u2 = get_number(u, "u2", "utility");
  spec.u3 = get_number(u, "u3", "utility");
  spec.u4 = get_number(u, "u4", "utility");
  for (double v : {spec.u1, spec.u2, spec.u3, spec.u4})
    check(v >= 0.0 && v <= 100.0, "utility scores must be in [0, 100]");
  std::string orientation = "minimize";
  if (u.contains("orientation")) {
    check(u.at("orientation").is_string(), "orientation must be a string");
    orientation = u.at("orientation").get<std::string>();
  }
  if (orientation == "minimize") {
    spec.orientation = UtilitySpec::Orientation::minimize;
    check(spec.u1 <= spec.u2 && spec.u1 <= spec.u3 && spec.u4 >= spec.u2 &&
              spec.u4 >= spec.u3,
          "minimize orientation requires u1 to be the best (lowest) score and "
          "u4 the worst");
  } else if (orientation == "maximize") {
    spec.orientation = UtilitySpec::Orientation::maximize;
    check(spec.u1 >= spec.u2 && spec.u1 >= spec.u3 && spec.u4 <= spec.u2 &&
              spec.u4 <= spec.u3,
          "maximize orientation requires u1 to be the best (highest) score "
          "and u4 the worst");
  } else {
    throw ConfigError("orientation must be \"maximize\" or \"minimize\"");
  }
  return spec;
}

// True per-dose desirability, used to derive the scenario's optimal dose.
// Cell probabilities follow the same latent-normal joint model the simulator
// draws from.
double true_score(const DoseTruth& dose, double rho,
                  const DesirabilitySpec& desirability, bool* minimize) {
  if (const auto* t = std::get_if<TradeoffSpec>(&desirability)) {
    *minimize = false;
    return dose.p_e - t->w * dose.p_t;
  }
  const auto& u = std::get<UtilitySpec>(desirability);
  *minimize = u.orientation == UtilitySpec::Orientation::minimize;
  double both;  // P(response and toxicity)
  if (dose.p_e <= 0.0 || dose.p_t <= 0.0) {
    both = 0.0;
  } else if (dose.p_e >= 1.0) {
    both = dose.p_t;
  } else if (dose.p_t >= 1.0) {
    both = dose.p_e;
  } else {
    both = bivariate_normal_cdf(std_normal_quantile(dose.p_e),
                                std_normal_quantile(dose.p_t), rho);
  }
  const double pi2 = both;
  const double pi1 = dose.p_e - pi2;
  const double pi4 = dose.p_t - pi2;
  const double pi3 = 1.0 - pi1 - pi2 - pi4;
  return pi1 * u.u1 + pi2 * u.u2 + pi3 * u.u3 + pi4 * u.u4;
}

std::optional<int> derive_optimal(const ScenarioSpec& scenario,
                                  const GateSpec& gates,
                                  const DesirabilitySpec& desirability) {
  std::optional<int> best;
  double best_score = 0.0;
  bool minimize = false;
  for (int j = 0; j < scenario.n_doses(); ++j) {
    const DoseTruth& d = scenario.doses[static_cast<std::size_t>(j)];
    if (!(d.p_t < gates.phi_t && d.p_e > gates.phi_e)) continue;
    const double score =
        true_score(d, scenario.copula.rho, desirability, &minimize);
    if (!best || (minimize ? score < best_score : score > best_score)) {
      best = j;
      best_score = score;
    }
  }
  return best;
}

LoadedConfig parse_root(const json& root, const std::string& name) {
  check(root.is_object(), "config root must be a JSON object");
  reject_unknown_keys(root,
                      {"design", "doses", "control", "historical", "n1", "n2",
                       "alpha", "gates", "utility", "tradeoff", "rho",
                       "accrual_rate", "assess_time", "followup_min",
                       "stage1_endpoint"},
                      "config");

  LoadedConfig loaded;
  loaded.name = name;
  DesignConfig& cfg = loaded.design;
  ScenarioSpec& scen = loaded.scenario;

  check(root.contains("design") && root.at("design").is_string(),
        "design must be a string");
  cfg.design = parse_design(root.at("design").get<std::string>());

  check(root.contains("doses") && root.at("doses").is_array(),
        "doses must be an array");
  const json& doses = root.at("doses");
  check(doses.size() >= 2 && doses.size() <= 3,
        "doses must list 2 or 3 dose arms");
  for (std::size_t j = 0; j < doses.size(); ++j) {
    const json& d = doses[j];
    const std::string ctx = "doses[" + std::to_string(j) + "]";
    check(d.is_object(), ctx + " must be an object");
    reject_unknown_keys(d, {"p_e", "p_t", "hr"}, ctx);
    DoseTruth truth;
    truth.p_e = get_number(d, "p_e", ctx);
    truth.p_t = get_number(d, "p_t", ctx);
    truth.hr = get_number(d, "hr", ctx);
    check(truth.p_e >= 0.0 && truth.p_e <= 1.0 && truth.p_t >= 0.0 &&
              truth.p_t <= 1.0,
          ctx + ": rates must be in [0, 1]");
    check(truth.hr > 0.0, ctx + ": hr must be > 0");
    scen.doses.push_back(truth);
  }

  check(root.contains("control"), "missing key \"control\"");
  {
    const json& c = root.at("control");
    check(c.is_object(), "control must be an object");
    reject_unknown_keys(c, {"p_c", "lambda_resp", "lambda_nonresp"}, "control");
    scen.control.p_c = get_number(c, "p_c", "control");
    scen.control.lambda_resp = get_number(c, "lambda_resp", "control");
    scen.control.lambda_nonresp = get_number(c, "lambda_nonresp", "control");
    check(scen.control.p_c >= 0.0 && scen.control.p_c <= 1.0,
          "control p_c must be in [0, 1]");
    check(scen.control.lambda_resp > 0.0 && scen.control.lambda_nonresp > 0.0,
          "control hazards must be > 0");
  }

  const bool needs_benchmark =
      cfg.design == Design::B || cfg.design == Design::D;
  if (root.contains("historical")) {
    const json& h = root.at("historical");
    check(h.is_object(), "historical must be an object");
    reject_unknown_keys(h, {"p_c", "hazard"}, "historical");
    scen.historical.p_c = get_number(h, "p_c", "historical");
    scen.historical.hazard = get_number(h, "hazard", "historical");
    check(scen.historical.p_c > 0.0 && scen.historical.p_c < 1.0,
          "historical p_c must be in (0, 1)");
    check(scen.historical.hazard > 0.0, "historical hazard must be > 0");
  } else if (needs_benchmark) {
    throw ConfigError("designs B and D require a historical benchmark");
  }

  cfg.n1 = get_int(root, "n1", "config");
  cfg.n2 = get_int(root, "n2", "config");
  check(cfg.n1 >= 1 && cfg.n2 >= 1, "n1 and n2 must be >= 1");

  cfg.alpha = get_number_or(root, "alpha", cfg.alpha, "config");
  check(cfg.alpha > 0.0 && cfg.alpha < 0.5, "alpha must be in (0, 0.5)");

  cfg.gates = parse_gates(root);
  cfg.desirability = parse_desirability(root);

  scen.copula.rho = get_number_or(root, "rho", 0.0, "config");
  check(scen.copula.rho > -1.0 && scen.copula.rho < 1.0,
        "rho must be in (-1, 1)");

  cfg.accrual_rate =
      get_number_or(root, "accrual_rate", cfg.accrual_rate, "config");
  check(cfg.accrual_rate > 0.0, "accrual_rate must be > 0");
  cfg.assess_time = get_number_or(root, "assess_time", cfg.assess_time, "config");
  check(cfg.assess_time >= 0.0, "assess_time must be >= 0");
  cfg.followup_min =
      get_number_or(root, "followup_min", cfg.followup_min, "config");
  check(cfg.followup_min >= 0.0, "followup_min must be >= 0");

  if (root.contains("stage1_endpoint")) {
    check(root.at("stage1_endpoint").is_string(),
          "stage1_endpoint must be a string");
    const std::string s = root.at("stage1_endpoint").get<std::string>();
    check(cfg.design == Design::A || cfg.design == Design::B,
          "stage1_endpoint applies only to designs A and B");
    if (s == "survival") cfg.stage1_endpoint = Stage1Endpoint::survival;
    else if (s == "orr") cfg.stage1_endpoint = Stage1Endpoint::orr;
    else throw ConfigError("stage1_endpoint must be \"survival\" or \"orr\"");
  }

  scen.optimal_dose = derive_optimal(scen, cfg.gates, cfg.desirability);
  return loaded;
}

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file: " + path.string());
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return root;
}

}  // namespace

LoadedConfig load_config(const std::filesystem::path& path) {
  return parse_root(parse_json_file(path), path.stem().string());
}

LoadedConfig parse_config(const std::string& text, const std::string& name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_root(root, name);
}

GridSpec load_grid(const std::filesystem::path& path) {
  const json root = parse_json_file(path);
  check(root.is_object(), "grid root must be a JSON object");
  reject_unknown_keys(root, {"n1", "n2"}, "grid");
  GridSpec grid;
  for (const char* key : {"n1", "n2"}) {
    check(root.contains(key) && root.at(key).is_array(),
          std::string("grid key \"") + key + "\" must be an array");
    auto& target = std::string(key) == "n1" ? grid.n1 : grid.n2;
    for (const json& v : root.at(key)) {
      check(v.is_number_integer() && v.get<int>() >= 1,
            std::string("grid \"") + key + "\" entries must be integers >= 1");
      target.push_back(v.get<int>());
    }
    check(!target.empty(), std::string("grid \"") + key + "\" must be non-empty");
  }
  return grid;
}

}  // namespace p23
