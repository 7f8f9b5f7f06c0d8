#include "fiberscope/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "fiberscope/errors.hpp"
#include "fiberscope/report.hpp"

namespace fiberscope {

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool json = false;
  bool csv = false;
};

void add_flags(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config, "run configuration file")->required();
  sub->add_option("--out", flags.out, "output directory (overrides [run] out)");
  sub->add_option("--seed", flags.seed, "run seed (overrides [run] seed)");
  sub->add_flag("--json", flags.json, "write report.json only (combine with --csv for both)");
  sub->add_flag("--csv", flags.csv, "write the CSV plot data only (combine with --json for both)");
}

Json read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extra-invariance analysis of fiberized Heisenberg subspaces", "fiberscope"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"tile-check", "verify that the residue translates tile the fiber band"},
      {"analyze", "run the analyses listed in the config"},
      {"decompose", "residue decomposition of the generated space"},
      {"transform", "fiberize sampled functions and check Plancherel and intertwining"},
      {"beta", "coefficients of a target against the translates of one generator"},
      {"report", "summarize an existing report.json and re-emit its CSV plot data"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig config = load_config(flags.config);
    if (flags.seed) config.seed = *flags.seed;
    if (!flags.out.empty()) config.out = flags.out;
    const std::filesystem::path dir = config.out;
    OutputOptions options;
    if (flags.json || flags.csv) options = {flags.json, flags.csv};

    if (command == "report") {
      const Json report = read_report(dir / "report.json");
      print_summary(report, out);
      if (options.csv) emit_plotdata(report, dir);
      return exit_code_for(report);
    }

    RunResult result;
    if (command == "transform") {
      result = run_transform(config);
    } else {
      if (command == "tile-check") config.analyses = {"tile-check"};
      if (command == "decompose") config.analyses = {"range", "decompose"};
      if (command == "beta") config.analyses = {"beta"};
      result = run(config);
    }
    write_outputs(result, config, dir, options);
    print_summary(result.report, out);
    if (result.report.contains("error") && !result.report["error"].is_null())
      err << "fiberscope: " << result.report["error"]["message"].get<std::string>() << '\n';
    return result.exit_code;
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) err << "fiberscope: " << flags.config << ": " << p << '\n';
  } catch (const std::exception& e) {
    err << "fiberscope: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace fiberscope
