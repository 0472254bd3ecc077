// sadic <task> --family F --seed S --out DIR [knobs]
//
// Every run-config key is also a command-line option (--n_steps 1000,
// --k_list "[1, 2, 4]", -N 100000, ...). Options override --config.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sadic/config.hpp"
#include "sadic/run.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random S-adic systems: spectral cocycle exponents and the singularity criterion"};
  app.set_help_all_flag("--help-all");

  std::string task_name;
  std::string config_path;
  bool uncentered = false;
  app.add_option("task", task_name, "props, matrix, cocycle-eval, lyapunov, spectrum, chi, mahler-bound, criterion, "
                                    "cone-verify, example-family, weyl, spectral-measure, dimension-scan");
  app.add_option("--config", config_path, "run config file (key = value)");
  app.add_flag("--uncentered", uncentered, "do not subtract the mean before correlating");

  std::map<std::string, std::string> knobs;
  for (const auto& key : sadic::config_keys()) {
    if (key == "task") continue;
    const std::string flag = key.size() == 1 ? "-" + key : "--" + key;
    app.add_option(flag, knobs[key], "config key '" + key + "'");
  }

  CLI11_PARSE(app, argc, argv);
  if (task_name.empty() && config_path.empty()) {
    std::cerr << "error: a task or --config is required\n" << app.help();
    return sadic::kExitError;
  }

  sadic::RunConfig cfg;
  try {
    cfg = config_path.empty() ? sadic::RunConfig{} : sadic::parse_config(read_file(config_path), task_name.empty());
  } catch (const sadic::ParseError& e) {
    std::cerr << config_path << ":" << e.line() << ":" << e.column() << ": " << e.message() << '\n';
    return sadic::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sadic::kExitError;
  }

  try {
    if (!task_name.empty()) {
      const auto t = sadic::parse_task(task_name);
      if (!t) throw std::invalid_argument("unknown task '" + task_name + "'");
      cfg.task = *t;
    }
    for (const auto& [key, text] : knobs) {
      if (app.count(key.size() == 1 ? "-" + key : "--" + key) == 0) continue;
      sadic::KeyValue kv;
      kv.key = key;
      // Bare words are accepted as strings; lists and numbers parse as usual.
      kv.value = sadic::parse_value(text, 1, 1);
      sadic::apply_setting(cfg, kv);
    }
    if (uncentered) cfg.centered = false;
  } catch (const sadic::ParseError& e) {
    std::cerr << "command line: " << e.message() << '\n';
    return sadic::kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sadic::kExitError;
  }

  const auto res = sadic::run(cfg, std::cerr);
  if (res.exit_code != sadic::kExitError) {
    std::cout << res.summary.dump(2) << '\n';
  }
  return res.exit_code;
}
