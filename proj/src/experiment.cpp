#include "erasure_lab/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "erasure_lab/coherence.hpp"
#include "erasure_lab/measurement.hpp"
#include "erasure_lab/schmidt.hpp"

namespace erasure_lab {

namespace {

using nlohmann::json;

constexpr double kCutTol = 1e-10;

const std::set<std::string, std::less<>> kKnownKeys = {
    "command",       "output_path",    "tolerance",      "slit_separation", "envelope_width",
    "phase_gradient", "n_bins",        "bin_width",      "span",            "basis",
    "born_rule",     "quadrature_points", "grid_steps",  "seed",            "injections",
    "state"};

double positive_number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(key) + " must be positive");
  return x;
}

std::uint64_t positive_integer(const json& doc, const char* key, std::uint64_t fallback) {
  if (!doc.contains(key)) return fallback;
  const json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (!(x > 0.0)) throw ConfigError(std::string(key) + " must be positive");
    if (x != std::floor(x)) throw ConfigError(std::string(key) + " must be an integer");
    return static_cast<std::uint64_t>(x);
  }
  if (v.is_number_integer() && v.get<std::int64_t>() <= 0) {
    throw ConfigError(std::string(key) + " must be positive");
  }
  return v.get<std::uint64_t>();
}

std::string string_field(const json& doc, const char* key, std::string fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_string()) throw ConfigError(std::string(key) + " must be a string");
  return doc.at(key).get<std::string>();
}

StateVector parse_state(const json& v) {
  if (!v.is_object() || !v.contains("dims") || !v.contains("amplitudes")) {
    throw ConfigError("state must be an object with keys dims and amplitudes");
  }
  for (const auto& [key, _] : v.items()) {
    if (key != "dims" && key != "amplitudes") throw ConfigError("state: unknown key " + key);
  }
  std::vector<std::size_t> dims;
  for (const auto& d : v.at("dims")) {
    if (!d.is_number_integer() || d.get<std::int64_t>() <= 0) {
      throw ConfigError("state.dims entries must be positive integers");
    }
    dims.push_back(d.get<std::size_t>());
  }
  if (dims.size() < 2) throw ConfigError("state.dims must list at least two subsystems");
  const auto& amps = v.at("amplitudes");
  if (!amps.is_array()) throw ConfigError("state.amplitudes must be an array");
  CVector a(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto& z = amps[i];
    if (z.is_number()) {
      a(static_cast<Eigen::Index>(i)) = z.get<double>();
    } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
      a(static_cast<Eigen::Index>(i)) = Complex(z[0].get<double>(), z[1].get<double>());
    } else {
      throw ConfigError("state.amplitudes entries must be numbers or [re, im] pairs");
    }
  }
  try {
    return StateVector(HilbertShape(std::move(dims)), std::move(a));
  } catch (const ContractError& e) {
    throw ConfigError(std::string("state: ") + e.what());
  }
}

json state_to_json(const StateVector& s) {
  json amps = json::array();
  for (Eigen::Index i = 0; i < s.amplitudes().size(); ++i) {
    amps.push_back({s.amplitudes()(i).real(), s.amplitudes()(i).imag()});
  }
  return {{"dims", s.shape().dims()}, {"amplitudes", amps}};
}

json vector_to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

std::string format17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::filesystem::path write_file(const ExperimentConfig& config, const std::string& name,
                                 const std::string& contents, RunReport& report) {
  const std::filesystem::path dir(config.output_path);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
  report.files.push_back(path.string());
  return path;
}

CheckResult make_check(std::string name, double deviation, double tolerance) {
  return {std::move(name), deviation <= tolerance, deviation, tolerance};
}

std::string check_line(const CheckResult& c) {
  return c.name + ": max deviation " + format_short(c.max_deviation) + (c.pass ? " <= " : " > ") +
         format_short(c.tolerance) + ": " + (c.pass ? "PASS" : "FAIL");
}

void run_schmidt(const ExperimentConfig& config, RunReport& report) {
  const StateVector state = config.state ? *config.state : maximally_entangled_pair();
  const SchmidtDecomposition dec = schmidt_decompose(state, Bipartition{{0}});
  const bool epr = is_epr_type(dec);

  json doc;
  doc["coefficients"] = dec.coefficients();
  doc["rank"] = dec.rank();
  doc["epr_type"] = epr;
  doc["basis_first"] = json::array();
  doc["basis_second"] = json::array();
  for (std::size_t k = 0; k < dec.rank(); ++k) {
    doc["basis_first"].push_back(vector_to_json(dec.basis_first()[k]));
    doc["basis_second"].push_back(vector_to_json(dec.basis_second()[k]));
  }
  write_file(config, "schmidt.json", doc.dump(2) + "\n", report);

  std::string coeffs;
  for (std::size_t k = 0; k < dec.rank(); ++k) {
    if (k) coeffs += ", ";
    coeffs += shortest(dec.coefficients()[k]);
  }
  report.summary.push_back("coefficients: " + coeffs);
  report.summary.push_back("rank: " + std::to_string(dec.rank()));
  report.summary.push_back(std::string("EPR-type: ") + (epr ? "true" : "false"));
}

bool near_angle(double x, double target) { return std::abs(x - target) <= 1e-12; }

void run_search(const ExperimentConfig& config, RunReport& report) {
  const auto hits = search_symmetric_bases(config.grid_steps);
  std::string csv = "lambda,delta,class\n";
  std::size_t unexpected = 0;
  std::size_t termwise = 0;
  std::size_t swapping = 0;
  const double pi = std::numbers::pi;
  for (const auto& h : hits) {
    csv += format17(h.params.lambda) + "," + format17(h.params.delta) + "," +
           std::string(to_string(h.symmetry)) + "\n";
    const double l = h.params.lambda;
    const double d = h.params.delta;
    if (h.symmetry == SymmetryClass::TermwiseSymmetric) {
      ++termwise;
      if (!((near_angle(l, 0) || near_angle(l, pi)) && (near_angle(d, 0) || near_angle(d, pi)))) ++unexpected;
    } else {
      ++swapping;
      if (!(near_angle(l, 0) && (near_angle(d, pi / 2) || near_angle(d, 3 * pi / 2)))) ++unexpected;
    }
  }
  write_file(config, "search_bases.csv", csv, report);
  report.summary.push_back("grid " + std::to_string(config.grid_steps) + "x" +
                           std::to_string(config.grid_steps) + ": " + std::to_string(termwise) +
                           " TermwiseSymmetric, " + std::to_string(swapping) + " TermSwapping");
  CheckResult check{"symmetric-basis-uniqueness", unexpected == 0 && termwise == 4 && swapping == 2,
                    static_cast<double>(unexpected), 0.0};
  report.summary.push_back(check.name + ": " + std::to_string(unexpected) + " unexpected hits: " +
                           (check.pass ? "PASS" : "FAIL"));
  report.checks.push_back(std::move(check));
}

void run_erasure(const ExperimentConfig& config, RunReport& report) {
  ErasureConfig erasure = config.erasure();
  ProbabilityTable table = [&] {
    switch (config.command) {
      case Command::ErasureDelayed:
        return run_delayed_choice(erasure);
      case Command::ErasureWhichWay:
        erasure.basis = MeasurementBasis::WhichWay;
        return run_simple_erasure(erasure);
      default:
        return run_simple_erasure(erasure);
    }
  }();
  const std::string name = "erasure_" + std::string(to_string(table.mode())) + ".csv";
  write_file(config, name, to_csv(table), report);
  report.summary.push_back(std::string(to_string(table.mode())) + " table, basis " +
                           std::string(to_string(erasure.basis)) + ", " +
                           std::to_string(table.n_bins()) + " bins, total probability " +
                           format_short(table.total()));
}

void run_verify(const ExperimentConfig& config, RunReport& report) {
  const ErasureConfig erasure = config.erasure();
  const ProbabilityTable simple = run_simple_erasure(erasure);
  const ProbabilityTable delayed = run_delayed_choice(erasure);
  write_file(config, "simple.csv", to_csv(simple), report);
  write_file(config, "delayed.csv", to_csv(delayed), report);
  const EqualityReport eq = verify_equality(simple, delayed, config.tolerance);
  CheckResult check = make_check("simple-vs-delayed", eq.max_deviation, config.tolerance);
  report.summary.push_back("basis " + std::string(to_string(erasure.basis)) + ", born rule " +
                           std::string(to_string(erasure.rule)));
  report.summary.push_back("max deviation " + format_short(eq.max_deviation) +
                           (check.pass ? " < " : " >= ") + format_short(config.tolerance) + ": " +
                           (check.pass ? "PASS" : "FAIL"));
  report.checks.push_back(std::move(check));
}

void run_cut_demo(const ExperimentConfig& config, RunReport& report) {
  std::mt19937_64 rng(config.seed);
  std::string csv = "injection,trace_distance,complete\n";
  double worst = 0.0;
  for (std::size_t k = 0; k < config.injections; ++k) {
    const UnitaryOperator first = random_unitary(6, rng);
    const UnitaryOperator second = random_unitary(4, rng);
    const CutReport cut = simple_erasure_cut(first, second);
    worst = std::max(worst, cut.complete ? cut.distance : 1.0);
    csv += std::to_string(k + 1) + "," + format17(cut.distance) + "," + (cut.complete ? "1" : "0") + "\n";
  }
  write_file(config, "cut_demo.csv", csv, report);
  CheckResult check = make_check("proper-vs-improper", worst, kCutTol);
  report.summary.push_back(std::to_string(config.injections) + " random local-evolution injections");
  report.summary.push_back(check_line(check));
  report.checks.push_back(std::move(check));
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Schmidt:
      return "schmidt";
    case Command::SearchBases:
      return "search-bases";
    case Command::ErasureSimple:
      return "erasure-simple";
    case Command::ErasureDelayed:
      return "erasure-delayed";
    case Command::ErasureWhichWay:
      return "erasure-whichway";
    case Command::Verify:
      return "verify";
    case Command::CutDemo:
      return "cut-demo";
  }
  return "verify";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::Schmidt, Command::SearchBases, Command::ErasureSimple,
                    Command::ErasureDelayed, Command::ErasureWhichWay, Command::Verify,
                    Command::CutDemo}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

ErasureConfig ExperimentConfig::erasure() const {
  ErasureConfig e;
  e.model.slit_separation = slit_separation;
  e.model.envelope_width = envelope_width;
  e.model.phase_gradient = phase_gradient;
  e.array = DetectorArray(n_bins, bin_width);
  e.basis = basis;
  e.rule = born_rule;
  e.quadrature_points = quadrature_points;
  return e;
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key: " + key);
  }

  ExperimentConfig c;
  if (doc.contains("command")) {
    const auto name = string_field(doc, "command", "");
    const auto cmd = parse_command(name);
    if (!cmd) throw ConfigError("command must be one of schmidt, search-bases, erasure-simple, "
                                "erasure-delayed, erasure-whichway, verify, cut-demo (got " + name + ")");
    c.command = *cmd;
  }
  c.output_path = string_field(doc, "output_path", c.output_path);
  if (c.output_path.empty()) throw ConfigError("output_path must not be empty");
  c.tolerance = positive_number(doc, "tolerance", c.tolerance);
  c.slit_separation = positive_number(doc, "slit_separation", c.slit_separation);
  c.envelope_width = positive_number(doc, "envelope_width", c.envelope_width);
  c.phase_gradient = positive_number(doc, "phase_gradient", c.phase_gradient);
  c.n_bins = positive_integer(doc, "n_bins", c.n_bins);
  c.quadrature_points = positive_integer(doc, "quadrature_points", c.quadrature_points);
  c.grid_steps = positive_integer(doc, "grid_steps", c.grid_steps);
  c.seed = positive_integer(doc, "seed", c.seed);
  c.injections = positive_integer(doc, "injections", c.injections);
  if (c.grid_steps < 8) throw ConfigError("grid_steps must be at least 8");

  const bool has_span = doc.contains("span");
  const bool has_width = doc.contains("bin_width");
  const double n = static_cast<double>(c.n_bins);
  if (has_span && has_width) {
    c.span = positive_number(doc, "span", c.span);
    c.bin_width = positive_number(doc, "bin_width", c.bin_width);
    if (std::abs(n * c.bin_width - c.span) > 1e-12 * c.span) {
      throw ConfigError("span must equal n_bins * bin_width");
    }
  } else if (has_width) {
    c.bin_width = positive_number(doc, "bin_width", c.bin_width);
    c.span = n * c.bin_width;
  } else {
    c.span = positive_number(doc, "span", c.span);
    c.bin_width = c.span / n;
  }

  const std::string basis = string_field(doc, "basis", "pm");
  if (basis == "pm") {
    c.basis = MeasurementBasis::PlusMinus;
  } else if (basis == "pmi") {
    c.basis = MeasurementBasis::PlusMinusI;
  } else if (basis == "whichway") {
    c.basis = MeasurementBasis::WhichWay;
  } else {
    throw ConfigError("basis must be one of pm, pmi, whichway (got " + basis + ")");
  }
  const std::string rule = string_field(doc, "born_rule", "intensity");
  if (rule == "intensity") {
    c.born_rule = BornRule::IntensityIntegral;
  } else if (rule == "amplitude") {
    c.born_rule = BornRule::AmplitudeIntegral;
  } else {
    throw ConfigError("born_rule must be one of intensity, amplitude (got " + rule + ")");
  }
  if (doc.contains("state")) c.state = parse_state(doc.at("state"));

  try {
    validate_geometry(c.erasure().model, c.erasure().array, c.quadrature_points);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json doc = {
      {"command", std::string(to_string(c.command))},
      {"output_path", c.output_path},
      {"tolerance", c.tolerance},
      {"slit_separation", c.slit_separation},
      {"envelope_width", c.envelope_width},
      {"phase_gradient", c.phase_gradient},
      {"n_bins", c.n_bins},
      {"bin_width", c.bin_width},
      {"span", c.span},
      {"basis", std::string(to_string(c.basis))},
      {"born_rule", std::string(to_string(c.born_rule))},
      {"quadrature_points", c.quadrature_points},
      {"grid_steps", c.grid_steps},
      {"seed", c.seed},
      {"injections", c.injections},
  };
  if (c.state) doc["state"] = state_to_json(*c.state);
  return doc;
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : to_json(config).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

json RunReport::to_json() const {
  json doc;
  doc["command"] = command;
  doc["config_hash"] = config_hash;
  doc["passed"] = passed();
  doc["checks"] = json::array();
  for (const auto& c : checks) {
    doc["checks"].push_back({{"name", c.name},
                             {"pass", c.pass},
                             {"max_deviation", c.max_deviation},
                             {"tolerance", c.tolerance}});
  }
  doc["files"] = files;
  doc["summary"] = summary;
  return doc;
}

RunReport execute(const ExperimentConfig& config) {
  RunReport report;
  report.command = std::string(to_string(config.command));
  report.config_hash = config_hash(config);
  switch (config.command) {
    case Command::Schmidt:
      run_schmidt(config, report);
      break;
    case Command::SearchBases:
      run_search(config, report);
      break;
    case Command::ErasureSimple:
    case Command::ErasureDelayed:
    case Command::ErasureWhichWay:
      run_erasure(config, report);
      break;
    case Command::Verify:
      run_verify(config, report);
      break;
    case Command::CutDemo:
      run_cut_demo(config, report);
      break;
  }
  const auto report_path = std::filesystem::path(config.output_path) / "report.json";
  report.files.push_back(report_path.string());
  RunReport written = report;
  written.files.pop_back();
  write_file(config, "report.json", report.to_json().dump(2) + "\n", written);
  return report;
}

std::string shortest(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return format17(value);
  return std::string(buf, end);
}

}  // namespace erasure_lab
