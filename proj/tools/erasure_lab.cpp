// erasure-lab: command-line front end for the quantum eraser experiments.
//
//   erasure-lab <command> [--config PATH] [--out DIR] [--tolerance FLOAT]
//
// Exit codes: 0 ok, 1 a verification check failed, 2 bad config or
// arguments, 3 I/O failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "erasure_lab/experiment.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw erasure_lab::IoError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw erasure_lab::ConfigError(path + ": malformed JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schmidt-decomposition and quantum eraser experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  double tolerance = 0.0;
  std::string basis;
  std::string rule;
  std::string erasure_mode;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--tolerance", tolerance, "verification tolerance")->check(CLI::PositiveNumber);
  };
  auto add_optics = [&](CLI::App* sub) {
    sub->add_option("--basis", basis, "measurement basis of particle I")
        ->check(CLI::IsMember({"pm", "pmi", "whichway"}));
    sub->add_option("--born-rule", rule, "bin probability rule")
        ->check(CLI::IsMember({"intensity", "amplitude"}));
  };

  auto* schmidt = app.add_subcommand("schmidt", "Schmidt decomposition of a bipartite state");
  auto* search = app.add_subcommand("search-bases", "scan coherence bases for symmetric expansions");
  auto* erasure = app.add_subcommand("erasure", "single probability table");
  erasure->add_option("mode", erasure_mode, "simple | delayed | whichway")
      ->required()
      ->check(CLI::IsMember({"simple", "delayed", "whichway"}));
  auto* verify = app.add_subcommand("verify", "compare simple erasure against delayed choice");
  auto* cut = app.add_subcommand("cut-demo", "proper vs improper mixture under random evolutions");
  for (auto* sub : {schmidt, search, erasure, verify, cut}) add_common(sub);
  for (auto* sub : {erasure, verify}) add_optics(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  std::string command;
  if (schmidt->parsed()) command = "schmidt";
  if (search->parsed()) command = "search-bases";
  if (erasure->parsed()) command = "erasure-" + erasure_mode;
  if (verify->parsed()) command = "verify";
  if (cut->parsed()) command = "cut-demo";

  try {
    // Command-line values override the file and go through the same validation.
    nlohmann::json doc = load_config(config_path);
    if (!doc.is_object()) throw erasure_lab::ConfigError("config must be a JSON object");
    doc["command"] = command;
    if (!out_dir.empty()) doc["output_path"] = out_dir;
    if (tolerance > 0.0) doc["tolerance"] = tolerance;
    if (!basis.empty()) doc["basis"] = basis;
    if (!rule.empty()) doc["born_rule"] = rule;

    const erasure_lab::ExperimentConfig config = erasure_lab::parse_config(doc);
    const erasure_lab::RunReport report = erasure_lab::execute(config);

    std::cout << report.command << " (config " << report.config_hash << ")\n";
    for (const auto& line : report.summary) std::cout << "  " << line << '\n';
    for (const auto& f : report.files) std::cout << "  wrote " << f << '\n';
    return report.passed() ? 0 : kExitCheckFailed;
  } catch (const erasure_lab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const erasure_lab::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const erasure_lab::ContractError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  }
}
