#include "mdpabs/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mdpabs/errors.hpp"

namespace mdpabs {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw_error(ErrorCode::config_error, path + ": " + message);
}

const json& member(const json& j, const std::string& path, const std::string& key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double number_field(const json& j, const std::string& path, const std::string& key) {
  return number(member(j, path, key), path + "." + key);
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<std::vector<double>> matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  std::vector<std::vector<double>> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number_list(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

SystemConfig parse_system(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  SystemConfig sys;
  sys.family = member(j, path, "family").get<std::string>();
  if (j.contains("noise_mode")) {
    const std::string mode = j["noise_mode"].get<std::string>();
    if (mode == "paired") {
      sys.noise_mode = NoiseMode::paired;
    } else if (mode == "independent") {
      sys.noise_mode = NoiseMode::independent;
    } else {
      fail(path + ".noise_mode", "expected 'paired' or 'independent'");
    }
  }
  if (sys.family == "jet") {
    sys.tau = number_field(j, path, "tau");
    sys.noise_scale = number_field(j, path, "noise_scale");
    if (sys.tau <= 0.0) fail(path + ".tau", "must be positive");
    if (sys.noise_scale < 0.0) fail(path + ".noise_scale", "must be nonnegative");
    if (j.contains("inputs")) sys.scalar_inputs = number_list(j["inputs"], path + ".inputs");
  } else if (sys.family == "linear" || sys.family == "custom-affine" ||
             sys.family == "affine") {
    sys.a = matrix(member(j, path, "a"), path + ".a");
    sys.b = matrix(member(j, path, "b"), path + ".b");
    if (sys.family == "linear" && !j.contains("c")) {
      sys.c.assign(sys.a.size(), 0.0);
    } else {
      sys.c = number_list(member(j, path, "c"), path + ".c");
    }
    sys.noise_scale = number_field(j, path, "noise_scale");
    if (sys.noise_scale < 0.0) fail(path + ".noise_scale", "must be nonnegative");
    const json& box = member(j, path, "state_box");
    sys.box_lo = number_list(member(box, path + ".state_box", "lo"), path + ".state_box.lo");
    sys.box_hi = number_list(member(box, path + ".state_box", "hi"), path + ".state_box.hi");
    sys.vector_inputs = matrix(member(j, path, "inputs"), path + ".inputs");
  } else {
    fail(path + ".family",
         "unknown family '" + sys.family + "' (expected jet | linear | custom-affine)");
  }
  return sys;
}

LipschitzSpec parse_lipschitz(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  LipschitzSpec spec;
  spec.mode = member(j, path, "mode").get<std::string>();
  const auto radius_or = [&](const char* key, double fallback) {
    return j.contains(key) ? number_field(j, path, key) : fallback;
  };
  if (spec.mode == "direct") {
    spec.value = number_field(j, path, "value");
    if (spec.value <= 0.0) fail(path + ".value", "must be positive");
  } else if (spec.mode == "linear") {
    LinearSystemBounds b{};
    b.dynamics_gain = number_field(j, path, "dynamics_gain");
    b.input_gain = number_field(j, path, "input_gain");
    b.lambda_min = number_field(j, path, "lambda_min");
    b.lambda_max = number_field(j, path, "lambda_max");
    b.state_radius = radius_or("state_radius", -1.0);  // derived later if < 0
    b.input_radius = radius_or("input_radius", -1.0);
    spec.linear = b;
  } else if (spec.mode == "nonlinear") {
    NonlinearSystemBounds b{};
    b.dynamics_bound = number_field(j, path, "dynamics_bound");
    b.jacobian_bound = number_field(j, path, "jacobian_bound");
    b.lambda_min = number_field(j, path, "lambda_min");
    b.lambda_max = number_field(j, path, "lambda_max");
    b.state_radius = radius_or("state_radius", -1.0);
    spec.nonlinear = b;
  } else {
    fail(path + ".mode", "expected direct | linear | nonlinear");
  }
  return spec;
}

ScenarioSection parse_scenario(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  ScenarioSection s;
  s.gap = number_field(j, path, "gap");
  s.beta_scenario = number_field(j, path, "beta_scenario");
  s.beta_empirical = number_field(j, path, "beta_empirical");
  s.mean_error = number_field(j, path, "mean_error");
  if (s.gap < 0.0 || s.gap > 1.0) fail(path + ".gap", "must lie in [0, 1]");
  if (s.beta_scenario <= 0.0 || s.beta_scenario > 1.0) {
    fail(path + ".beta_scenario", "must lie in (0, 1]");
  }
  if (s.beta_empirical <= 0.0 || s.beta_empirical > 1.0) {
    fail(path + ".beta_empirical", "must lie in (0, 1]");
  }
  if (s.mean_error < 0.0) fail(path + ".mean_error", "must be nonnegative");
  if (j.contains("variance_bound")) {
    s.variance_bound = number_field(j, path, "variance_bound");
    if (*s.variance_bound <= 0.0) fail(path + ".variance_bound", "must be positive");
  }
  if (j.contains("variance_pilot")) {
    const json& p = j["variance_pilot"];
    s.pilot_points = member(p, path + ".variance_pilot", "points").get<std::uint64_t>();
    s.pilot_realizations =
        member(p, path + ".variance_pilot", "realizations").get<std::uint64_t>();
  }
  if (!s.variance_bound && !s.pilot_points) {
    fail(path, "one of variance_bound or variance_pilot is required");
  }
  s.lipschitz = parse_lipschitz(member(j, path, "lipschitz"), path + ".lipschitz");
  if (j.contains("samples")) s.samples = j["samples"].get<std::uint64_t>();
  if (j.contains("realizations")) s.realizations = j["realizations"].get<std::uint64_t>();
  if (j.contains("decision_vars")) {
    s.decision_vars = j["decision_vars"].get<int>();
    if (*s.decision_vars < 1) fail(path + ".decision_vars", "must be positive");
  }
  if (j.contains("dump_program")) s.dump_program = j["dump_program"].get<bool>();
  return s;
}

SpecConfig parse_spec(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  SpecConfig s;
  const json& safe = member(j, path, "safe");
  s.safe_lo = number_list(member(safe, path + ".safe", "lo"), path + ".safe.lo");
  s.safe_hi = number_list(member(safe, path + ".safe", "hi"), path + ".safe.hi");
  s.horizon = member(j, path, "horizon").get<int>();
  if (s.horizon < 0) fail(path + ".horizon", "must be nonnegative");
  if (j.contains("deflation")) {
    s.deflation = number_field(j, path, "deflation");
    if (s.deflation < 0.0) fail(path + ".deflation", "must be nonnegative");
  }
  s.initial = number_list(member(j, path, "initial"), path + ".initial");
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_error(ErrorCode::config_error, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw_error(ErrorCode::config_error, "config root must be an object");
  RunConfig cfg;
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected an unsigned integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("system")) cfg.system = parse_system(j["system"], "system");
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) fail("grid", "expected an object");
    GridConfig gc;
    const json& counts = member(g, "grid", "counts");
    if (!counts.is_array() || counts.empty()) fail("grid.counts", "expected a non-empty array");
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const int k = counts[i].get<int>();
      if (k < 1) fail("grid.counts[" + std::to_string(i) + "]", "must be at least 1");
      gc.counts.push_back(k);
    }
    cfg.grid = std::move(gc);
  }
  if (j.contains("sbf")) {
    const json& s = j["sbf"];
    if (!s.is_object()) fail("sbf", "expected an object");
    SbfConfig sc;
    if (s.contains("basis")) sc.basis = s["basis"].get<std::string>();
    if (s.contains("freeze")) {
      const json& f = s["freeze"];
      if (!f.is_object()) fail("sbf.freeze", "expected an object");
      for (const auto& [key, value] : f.items()) {
        sc.freeze[key] = number(value, "sbf.freeze." + key);
      }
    }
    if (s.contains("bounds")) {
      const json& b = s["bounds"];
      if (!b.is_object()) fail("sbf.bounds", "expected an object");
      for (const auto& [key, value] : b.items()) {
        const std::string where = "sbf.bounds." + key;
        if (!value.is_array() || value.size() != 2) fail(where, "expected [lo, hi]");
        const double lo = number(value[0], where + "[0]");
        const double hi = number(value[1], where + "[1]");
        if (lo > hi) fail(where, "lo must not exceed hi");
        sc.bounds[key] = {lo, hi};
      }
    }
    if (s.contains("alpha_min")) {
      sc.alpha_min = number_field(s, "sbf", "alpha_min");
      if (sc.alpha_min <= 0.0) fail("sbf.alpha_min", "must be positive");
    }
    if (s.contains("limit")) {
      sc.limit = number_field(s, "sbf", "limit");
      if (sc.limit <= 0.0) fail("sbf.limit", "must be positive");
    }
    if (s.contains("pilot_coefficients")) {
      sc.pilot_coefficients = number_list(s["pilot_coefficients"], "sbf.pilot_coefficients");
    }
    cfg.sbf = std::move(sc);
  }
  if (j.contains("scenario")) cfg.scenario = parse_scenario(j["scenario"], "scenario");
  if (j.contains("imdp")) {
    const json& s = j["imdp"];
    ImdpConfig ic;
    ic.half_width = number_field(s, "imdp", "half_width");
    ic.confidence = number_field(s, "imdp", "confidence");
    if (ic.half_width <= 0.0 || ic.half_width > 1.0) fail("imdp.half_width", "must lie in (0, 1]");
    if (ic.confidence <= 0.0 || ic.confidence >= 1.0) fail("imdp.confidence", "must lie in (0, 1)");
    cfg.imdp = ic;
  }
  if (j.contains("mle")) {
    const json& s = j["mle"];
    MleConfig mc;
    mc.residuals = member(s, "mle", "residuals").get<std::uint64_t>();
    if (mc.residuals < 2) fail("mle.residuals", "must be at least 2");
    if (s.contains("pilot")) {
      mc.pilot = s["pilot"].get<std::uint64_t>();
      if (mc.pilot < 1) fail("mle.pilot", "must be at least 1");
    }
    cfg.mle = mc;
  }
  if (j.contains("spec")) cfg.spec = parse_spec(j["spec"], "spec");
  if (j.contains("simulate")) {
    const json& s = j["simulate"];
    if (s.contains("runs")) {
      cfg.simulate.runs = s["runs"].get<int>();
      if (cfg.simulate.runs < 1) fail("simulate.runs", "must be at least 1");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error, "cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

BlackBoxSystem make_system(const RunConfig& config) {
  require(config.system.has_value(), ErrorCode::config_error,
          "system: section required for this command");
  const SystemConfig& s = *config.system;
  if (s.family == "jet") {
    BlackBoxSystem sys = s.scalar_inputs
                             ? jet_engine_system(s.tau, s.noise_scale, *s.scalar_inputs)
                             : jet_engine_system(s.tau, s.noise_scale);
    if (s.noise_mode == NoiseMode::independent) {
      return BlackBoxSystem(sys.state_box(), sys.inputs(),
                            [sys](std::span<const double> x, std::span<const double> u,
                                  NoiseStream& noise, std::span<double> out) {
                              sys.step_into(x, *sys.inputs().find(u), noise, out);
                            },
                            NoiseMode::independent);
    }
    return sys;
  }
  StateBox box(*s.box_lo, *s.box_hi);
  return affine_system(s.a, s.b, s.c, s.noise_scale, std::move(box), InputSet(s.vector_inputs));
}

Grid make_grid(const RunConfig& config, const StateBox& box) {
  require(config.grid.has_value(), ErrorCode::config_error,
          "grid: section required for this command");
  return Grid(box, config.grid->counts);
}

SbfBasis make_basis(const RunConfig& config, int dim) {
  const std::string family = config.sbf ? config.sbf->basis : std::string("percoord_const");
  return SbfBasis::named(family, dim);
}

DecisionBounds make_decision_bounds(const RunConfig& config, std::size_t basis_size) {
  DecisionBounds bounds;
  bounds.coeff_frozen.assign(basis_size, std::nullopt);
  bounds.coeff_range.assign(basis_size, std::nullopt);
  if (!config.sbf) return bounds;
  bounds.alpha_min = config.sbf->alpha_min;
  bounds.limit = config.sbf->limit;
  const auto coeff_slot = [&](const std::string& section, const std::string& key) {
    const std::size_t idx = static_cast<std::size_t>(std::stoul(key.substr(1)));
    require(idx >= 1 && idx <= basis_size, ErrorCode::config_error,
            section + "." + key + ": coefficient index out of range");
    return idx - 1;
  };
  for (const auto& [key, value] : config.sbf->freeze) {
    if (key == "alpha") {
      bounds.alpha_frozen = value;
    } else if (key == "psi") {
      bounds.psi_frozen = value;
    } else if (key.size() > 1 && key.front() == 'q') {
      bounds.coeff_frozen[coeff_slot("sbf.freeze", key)] = value;
    } else {
      throw_error(ErrorCode::config_error,
                  "sbf.freeze." + key + ": unknown variable (alpha | psi | q<k>)");
    }
  }
  for (const auto& [key, range] : config.sbf->bounds) {
    if (key == "alpha") {
      bounds.alpha_range = range;
    } else if (key == "psi") {
      bounds.psi_range = range;
    } else if (key.size() > 1 && key.front() == 'q') {
      bounds.coeff_range[coeff_slot("sbf.bounds", key)] = range;
    } else {
      throw_error(ErrorCode::config_error,
                  "sbf.bounds." + key + ": unknown variable (alpha | psi | q<k>)");
    }
  }
  return bounds;
}

SafetySpec make_safety_spec(const RunConfig& config) {
  require(config.spec.has_value(), ErrorCode::config_error,
          "spec: section required for this command");
  const SpecConfig& s = *config.spec;
  return SafetySpec{StateBox(s.safe_lo, s.safe_hi), s.horizon, s.deflation};
}

LipschitzConstant resolve_lipschitz(const RunConfig& config, const BlackBoxSystem& sys,
                                    const Grid& grid) {
  require(config.scenario.has_value(), ErrorCode::config_error,
          "scenario: section required for this command");
  const LipschitzSpec& spec = config.scenario->lipschitz;
  if (spec.mode == "direct") {
    return {spec.value, spec.value, spec.value};
  }
  if (spec.mode == "linear") {
    LinearSystemBounds b = *spec.linear;
    if (b.state_radius < 0.0) b.state_radius = sys.state_box().max_norm();
    if (b.input_radius < 0.0) b.input_radius = sys.inputs().max_norm();
    return lipschitz_linear(b, grid.cell_diameter());
  }
  NonlinearSystemBounds b = *spec.nonlinear;
  if (b.state_radius < 0.0) b.state_radius = sys.state_box().max_norm();
  return lipschitz_nonlinear(b, grid.cell_diameter());
}

}  // namespace mdpabs
