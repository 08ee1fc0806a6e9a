#include "mdpabs/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mdpabs/errors.hpp"

namespace mdpabs {

namespace {

using nlohmann::json;

json dump_doc_header(const char* format) {
  json j;
  j["format"] = format;
  j["version"] = kFileFormatVersion;
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io_error, "cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  require(out.good(), ErrorCode::io_error, "write to '" + path + "' failed");
}

json read_json(const std::string& path, const char* format) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io_error, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw_error(ErrorCode::incompatible_file,
                "'" + path + "' is not a JSON document: " + e.what());
  }
  require(j.is_object() && j.value("format", std::string()) == format,
          ErrorCode::incompatible_file,
          "'" + path + "' is not a " + std::string(format) + " document");
  require(j.value("version", -1) == kFileFormatVersion, ErrorCode::incompatible_file,
          "'" + path + "' has an unsupported format version");
  return j;
}

json basis_to_json(const SbfBasis& basis) {
  json terms = json::array();
  for (const auto& t : basis.terms()) {
    terms.push_back({static_cast<int>(t.kind), t.i, t.j});
  }
  return json{{"dim", basis.dim()}, {"terms", terms}};
}

SbfBasis basis_from_json(const json& j) {
  std::vector<BasisTerm> terms;
  for (const auto& t : j.at("terms")) {
    terms.push_back({static_cast<BasisTerm::Kind>(t.at(0).get<int>()), t.at(1).get<int>(),
                     t.at(2).get<int>()});
  }
  return SbfBasis(j.at("dim").get<int>(), std::move(terms));
}

json grid_to_json(const Grid& grid) {
  return json{{"lo", grid.box().lower()}, {"hi", grid.box().upper()}, {"counts", grid.counts()}};
}

Grid grid_from_json(const json& j) {
  return Grid(StateBox(j.at("lo").get<std::vector<double>>(),
                       j.at("hi").get<std::vector<double>>()),
              j.at("counts").get<std::vector<int>>());
}

json inputs_to_json(const InputSet& inputs) {
  json arr = json::array();
  for (int k = 0; k < inputs.size(); ++k) {
    const auto u = inputs.at(k);
    arr.push_back(std::vector<double>(u.begin(), u.end()));
  }
  return arr;
}

InputSet inputs_from_json(const json& j) {
  return InputSet(j.get<std::vector<std::vector<double>>>());
}

Verdict verdict_from_name(const std::string& name) {
  if (name == "CERTIFIED") return Verdict::certified;
  if (name == "INCONCLUSIVE") return Verdict::inconclusive;
  if (name == "UNSOUND-SCALE") return Verdict::unsound_scale;
  throw_error(ErrorCode::incompatible_file, "unknown verdict '" + name + "'");
}

}  // namespace

void save_certificate(const std::string& path, const CertificateFile& file) {
  json j = dump_doc_header("mdpabs-certificate");
  j["seed"] = file.seed;
  j["basis"] = basis_to_json(file.certificate.sbf.basis);
  j["coefficients"] = file.certificate.sbf.coefficients;
  j["alpha"] = file.certificate.sbf.alpha;
  j["psi"] = file.certificate.sbf.psi;
  j["optimum"] = file.certificate.optimum;
  j["gap"] = file.certificate.gap;
  j["margin"] = file.certificate.margin;
  j["verdict"] = verdict_name(file.certificate.verdict);
  j["confidence"] = file.certificate.confidence;
  j["beta_empirical"] = file.certificate.beta_empirical;
  j["beta_scenario"] = file.certificate.beta_scenario;
  j["samples_used"] = file.certificate.samples_used;
  j["realizations_used"] = file.certificate.realizations_used;
  j["min_samples_required"] = file.certificate.min_samples_required;
  j["mean_error"] = file.mean_error;
  j["variance_bound"] = file.variance_bound;
  j["lipschitz"] = file.lipschitz;
  j["violation_level"] = file.violation_level;
  j["state_dim"] = file.state_dim;
  j["rows"] = file.rows;
  j["outer_iterations"] = file.outer_iterations;
  j["simplex_pivots"] = file.simplex_pivots;
  j["max_violation"] = file.max_violation;
  j["paired_noise"] = file.paired_noise;
  write_json(path, j);
}

CertificateFile load_certificate(const std::string& path) {
  const json j = read_json(path, "mdpabs-certificate");
  SbfCertificate cert{
      SbfTemplate(basis_from_json(j.at("basis")),
                  j.at("coefficients").get<std::vector<double>>(), j.at("alpha").get<double>(),
                  j.at("psi").get<double>()),
      j.at("optimum").get<double>(),
      j.at("gap").get<double>(),
      j.at("margin").get<double>(),
      verdict_from_name(j.at("verdict").get<std::string>()),
      j.at("confidence").get<double>(),
      j.at("beta_empirical").get<double>(),
      j.at("beta_scenario").get<double>(),
      j.at("samples_used").get<std::uint64_t>(),
      j.at("realizations_used").get<std::uint64_t>(),
      j.at("min_samples_required").get<std::uint64_t>()};
  CertificateFile file{j.at("seed").get<std::uint64_t>(),
                       std::move(cert),
                       j.at("mean_error").get<double>(),
                       j.at("variance_bound").get<double>(),
                       j.at("lipschitz").get<double>(),
                       j.at("violation_level").get<double>(),
                       j.at("state_dim").get<int>(),
                       j.at("rows").get<std::size_t>(),
                       j.at("outer_iterations").get<int>(),
                       j.at("simplex_pivots").get<int>(),
                       j.at("max_violation").get<double>(),
                       j.at("paired_noise").get<bool>()};
  return file;
}

void save_abstraction(const std::string& path, const AbstractionFile& file) {
  require((file.kind == "imdp") == file.imdp.has_value() &&
              (file.kind == "mdp") == file.mdp.has_value(),
          ErrorCode::invalid_state, "abstraction kind does not match the payload");
  json j = dump_doc_header("mdpabs-abstraction");
  j["seed"] = file.seed;
  j["kind"] = file.kind;
  j["grid"] = grid_to_json(file.grid());
  j["inputs"] = inputs_to_json(file.inputs());
  if (file.imdp) {
    const IntervalMdp& imdp = *file.imdp;
    j["half_width"] = imdp.half_width;
    j["entry_confidence"] = imdp.entry_confidence;
    j["samples_per_pair"] = imdp.samples_per_pair;
    // Sparse per-row counts: [column, count] pairs.
    json rows = json::array();
    const std::size_t cols = imdp.column_count();
    for (std::size_t cell = 0; cell < imdp.state_count(); ++cell) {
      for (int u = 0; u < imdp.inputs.size(); ++u) {
        json row = json::array();
        for (std::size_t col = 0; col < cols; ++col) {
          const std::uint32_t c = imdp.counts[imdp.entry_index(cell, u, col)];
          if (c != 0) row.push_back({col, c});
        }
        rows.push_back(std::move(row));
      }
    }
    j["counts"] = std::move(rows);
  } else {
    const FiniteMdp& mdp = *file.mdp;
    const char* prov = mdp.provenance == FiniteMdp::Provenance::empirical ? "empirical"
                       : mdp.provenance == FiniteMdp::Provenance::gaussian_mle ? "gaussian_mle"
                                                                               : "model";
    j["provenance"] = prov;
    j["transitions"] = mdp.transitions;
  }
  write_json(path, j);
}

AbstractionFile load_abstraction(const std::string& path) {
  const json j = read_json(path, "mdpabs-abstraction");
  AbstractionFile file;
  file.seed = j.at("seed").get<std::uint64_t>();
  file.kind = j.at("kind").get<std::string>();
  Grid grid = grid_from_json(j.at("grid"));
  InputSet inputs = inputs_from_json(j.at("inputs"));
  if (file.kind == "imdp") {
    IntervalMdp imdp(std::move(grid), std::move(inputs), j.at("half_width").get<double>(),
                     j.at("entry_confidence").get<double>(),
                     j.at("samples_per_pair").get<std::uint64_t>());
    const json& rows = j.at("counts");
    const std::size_t n_inputs = static_cast<std::size_t>(imdp.inputs.size());
    require(rows.size() == imdp.state_count() * n_inputs, ErrorCode::incompatible_file,
            "interval count table has the wrong number of rows");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::size_t cell = r / n_inputs;
      const int u = static_cast<int>(r % n_inputs);
      for (const auto& pair : rows[r]) {
        const std::size_t col = pair.at(0).get<std::size_t>();
        require(col < imdp.column_count(), ErrorCode::incompatible_file,
                "interval count column out of range");
        imdp.counts[imdp.entry_index(cell, u, col)] = pair.at(1).get<std::uint32_t>();
      }
    }
    imdp.validate();
    file.imdp = std::move(imdp);
  } else if (file.kind == "mdp") {
    const std::string prov = j.at("provenance").get<std::string>();
    FiniteMdp::Provenance provenance;
    if (prov == "empirical") {
      provenance = FiniteMdp::Provenance::empirical;
    } else if (prov == "gaussian_mle") {
      provenance = FiniteMdp::Provenance::gaussian_mle;
    } else if (prov == "model") {
      provenance = FiniteMdp::Provenance::model;
    } else {
      throw_error(ErrorCode::incompatible_file, "unknown provenance '" + prov + "'");
    }
    FiniteMdp mdp(std::move(grid), std::move(inputs), provenance);
    const auto transitions = j.at("transitions").get<std::vector<double>>();
    require(transitions.size() == mdp.transitions.size(), ErrorCode::incompatible_file,
            "transition tensor has the wrong size");
    mdp.transitions = transitions;
    mdp.validate();
    file.mdp = std::move(mdp);
  } else {
    throw_error(ErrorCode::incompatible_file, "unknown abstraction kind '" + file.kind + "'");
  }
  return file;
}

void save_policy(const std::string& path, const PolicyFile& file) {
  require(file.grid.has_value(), ErrorCode::invalid_state, "policy file needs its grid");
  json j = dump_doc_header("mdpabs-policy");
  j["seed"] = file.seed;
  j["robust"] = file.robust;
  j["spec"] = {{"safe_lo", file.spec.safe_region.lower()},
               {"safe_hi", file.spec.safe_region.upper()},
               {"horizon", file.spec.horizon},
               {"deflation", file.spec.deflation}};
  j["grid"] = grid_to_json(*file.grid);
  j["states"] = file.policy.states;
  j["choice"] = file.policy.choice;
  j["values"] = file.values.values;
  j["initial"] = file.initial;
  j["initial_cell"] = file.initial_cell;
  j["initial_value"] = file.initial_value;
  j["safe_cells"] = file.safe_cells;
  j["straddling_cells"] = file.straddling_cells;
  j["repaired_rows"] = file.repaired_rows;
  write_json(path, j);
}

PolicyFile load_policy(const std::string& path) {
  const json j = read_json(path, "mdpabs-policy");
  PolicyFile file{
      j.at("seed").get<std::uint64_t>(),
      j.at("robust").get<bool>(),
      SafetySpec{StateBox(j.at("spec").at("safe_lo").get<std::vector<double>>(),
                          j.at("spec").at("safe_hi").get<std::vector<double>>()),
                 j.at("spec").at("horizon").get<int>(),
                 j.at("spec").at("deflation").get<double>()},
      grid_from_json(j.at("grid")),
      Policy{},
      ValueTable{},
      j.at("initial").get<std::vector<double>>(),
      j.at("initial_cell").get<std::size_t>(),
      j.at("initial_value").get<double>(),
      j.at("safe_cells").get<std::size_t>(),
      j.at("straddling_cells").get<std::size_t>(),
      j.at("repaired_rows").get<std::size_t>()};
  file.policy.horizon = file.spec.horizon;
  file.policy.states = j.at("states").get<std::size_t>();
  file.policy.choice = j.at("choice").get<std::vector<std::uint32_t>>();
  file.values.horizon = file.spec.horizon;
  file.values.states = file.policy.states;
  file.values.values = j.at("values").get<std::vector<double>>();
  require(file.policy.choice.size() ==
              static_cast<std::size_t>(file.spec.horizon) * file.policy.states,
          ErrorCode::incompatible_file, "policy table has the wrong size");
  require(file.values.values.size() ==
              static_cast<std::size_t>(file.spec.horizon + 1) * file.policy.states,
          ErrorCode::incompatible_file, "value table has the wrong size");
  return file;
}

void save_report(const std::string& path, const ReportFile& file) {
  json j = dump_doc_header("mdpabs-report");
  j["delta_raw"] = file.guarantee.delta_raw;
  j["delta"] = file.guarantee.delta;
  j["rho"] = file.guarantee.rho;
  j["epsilon"] = file.guarantee.epsilon;
  j["horizon"] = file.guarantee.horizon;
  j["abstract_probability"] = file.guarantee.abstract_probability;
  j["lower_bound_raw"] = file.guarantee.lower_bound_raw;
  j["lower_bound"] = file.guarantee.lower_bound;
  j["confidence_raw"] = file.guarantee.confidence_raw;
  j["confidence"] = file.guarantee.confidence;
  j["beta_empirical"] = file.guarantee.beta_empirical;
  j["beta_scenario"] = file.guarantee.beta_scenario;
  j["beta_intervals"] = file.guarantee.beta_intervals;
  j["vacuous"] = file.guarantee.vacuous;
  j["s_initial"] = file.s_initial;
  j["alpha"] = file.alpha;
  j["psi"] = file.psi;
  j["horizon_independent"] = file.horizon_independent;
  j["abstraction_has_intervals"] = file.abstraction_has_intervals;
  j["initial"] = file.initial;
  j["initial_rep"] = file.initial_rep;
  j["verdict"] = file.verdict;
  write_json(path, j);
}

ReportFile load_report(const std::string& path) {
  const json j = read_json(path, "mdpabs-report");
  ReportFile file;
  file.guarantee.delta_raw = j.at("delta_raw").get<double>();
  file.guarantee.delta = j.at("delta").get<double>();
  file.guarantee.rho = j.at("rho").get<double>();
  file.guarantee.epsilon = j.at("epsilon").get<double>();
  file.guarantee.horizon = j.at("horizon").get<int>();
  file.guarantee.abstract_probability = j.at("abstract_probability").get<double>();
  file.guarantee.lower_bound_raw = j.at("lower_bound_raw").get<double>();
  file.guarantee.lower_bound = j.at("lower_bound").get<double>();
  file.guarantee.confidence_raw = j.at("confidence_raw").get<double>();
  file.guarantee.confidence = j.at("confidence").get<double>();
  file.guarantee.beta_empirical = j.at("beta_empirical").get<double>();
  file.guarantee.beta_scenario = j.at("beta_scenario").get<double>();
  file.guarantee.beta_intervals = j.at("beta_intervals").get<double>();
  file.guarantee.vacuous = j.at("vacuous").get<bool>();
  file.s_initial = j.at("s_initial").get<double>();
  file.alpha = j.at("alpha").get<double>();
  file.psi = j.at("psi").get<double>();
  file.horizon_independent = j.at("horizon_independent").get<bool>();
  file.abstraction_has_intervals = j.at("abstraction_has_intervals").get<bool>();
  file.initial = j.at("initial").get<std::vector<double>>();
  file.initial_rep = j.at("initial_rep").get<std::vector<double>>();
  file.verdict = j.at("verdict").get<std::string>();
  return file;
}

namespace {

void write_csv(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io_error, "cannot open '" + path + "' for writing");
  out << content;
  require(out.good(), ErrorCode::io_error, "write to '" + path + "' failed");
}

void append_double(std::string& s, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  s += buf;
}

}  // namespace

void write_trajectories_csv(const std::string& path, const SimulationResult& result, int dim) {
  std::string s = "run,k";
  for (int d = 1; d <= dim; ++d) s += ",x_" + std::to_string(d);
  s += ",input,safe\n";
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const Trajectory& traj = result.runs[r];
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      s += std::to_string(r);
      s += ',';
      s += std::to_string(k);
      for (double v : traj.states[k]) {
        s += ',';
        append_double(s, v);
      }
      s += ',';
      s += std::to_string(k < traj.inputs.size() ? traj.inputs[k] : -1);
      s += ',';
      s += traj.safe ? '1' : '0';
      s += '\n';
    }
  }
  write_csv(path, s);
}

void write_distance_csv(const std::string& path,
                        const std::vector<std::vector<double>>& per_run_distance) {
  std::string s = "run,k,error\n";
  for (std::size_t r = 0; r < per_run_distance.size(); ++r) {
    for (std::size_t k = 0; k < per_run_distance[r].size(); ++k) {
      s += std::to_string(r);
      s += ',';
      s += std::to_string(k);
      s += ',';
      append_double(s, per_run_distance[r][k]);
      s += '\n';
    }
  }
  write_csv(path, s);
}

}  // namespace mdpabs
