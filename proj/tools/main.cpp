#include <chrono>
#include <exception>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

enum ExitCode { kOk = 0, kPropertyFailed = 1, kInvalid = 2, kNumerical = 3 };

std::string joined_commands() {
  std::string s;
  for (auto const& n : bohmsim::command_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohmian trajectories along foliations of 1+1 Minkowski spacetime"};
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = -1;

  app.add_option("command", command, "one of: " + joined_commands())->required();
  app.add_option("-c,--config", config_path, "JSON configuration file");
  app.add_option("--set", overrides, "override a config value, e.g. --set hbd.ds=0.002")->take_all();
  app.add_option("-o,--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker threads (0: automatic)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  bohmsim::Config cfg;
  try {
    auto const& names = bohmsim::command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
      throw bohm::ValidationError("unknown command '" + command + "' (expected one of: " + joined_commands() + ")");
    }
    bohmsim::json doc = config_path.empty() ? bohmsim::json::object() : bohmsim::read_json_file(config_path);
    for (auto const& o : overrides) bohmsim::apply_override(doc, o);
    if (*seed_opt) doc["seed"] = seed;
    if (threads >= 0) doc["threads"] = threads;
    if (!out_dir.empty()) doc["output_dir"] = out_dir;
    cfg = bohmsim::parse_config(doc);
  } catch (std::exception const& e) {
    std::cerr << "bohmsim: " << e.what() << "\n";
    return kInvalid;
  }

  std::unique_ptr<bohmsim::OutputDir> out;
  try {
    out = std::make_unique<bohmsim::OutputDir>(cfg.output_dir);
  } catch (std::exception const& e) {
    std::cerr << "bohmsim: " << e.what() << "\n";
    return kInvalid;
  }

  bohmsim::Report report;
  report.set("command", command);
  report.set("config_hash", bohmsim::hash_text(cfg.hash));
  report.set("seed", cfg.seed);

  auto const started = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    code = bohmsim::run_command(command, cfg, *out, report, std::cerr);
    out->write("config_resolved.json", cfg.resolved.dump(2) + "\n");
    report.set("exit_code", std::uint64_t(code));
    report.set("timestamp", bohmsim::utc_timestamp());
    out->write("report.txt", report.render());
  } catch (bohm::ValidationError const& e) {
    std::cerr << "bohmsim: " << e.what() << "\n";
    out->discard();
    return kInvalid;
  } catch (std::exception const& e) {
    std::cerr << "bohmsim: numerical failure: " << e.what() << "\n";
    out->discard();
    return kNumerical;
  }

  double const seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::cout << report.render();
  std::cerr << "bohmsim: " << command << " finished in " << seconds << " s, output in " << out->path().string()
            << "\n";
  return code;
}
