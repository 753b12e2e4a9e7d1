// structce: sweep runner and IIL benchmark.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "structce/errors.hpp"
#include "structce/harness.hpp"

using namespace structce;

namespace {

std::vector<IilKind> kinds_from(const std::string& s) {
  if (s == "both") return {IilKind::Shifting, IilKind::Modulo};
  return {parse_iil_kind(s)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MIMO-OFDM channel estimation lab"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an SNR sweep and write a CSV");
  std::string config_path, preset_name, out_path;
  Seed seed = 0;
  auto* config_opt = run->add_option("--config", config_path, "key=value config file");
  auto* preset_opt = run->add_option("--preset", preset_name, "start from a named preset instead of a file");
  config_opt->excludes(preset_opt);
  auto* out_opt = run->add_option("--out", out_path, "output CSV (overrides the config)");
  auto* seed_opt = run->add_option("--seed", seed, "master seed (overrides the config)");

  auto* bench = app.add_subcommand("bench-iil", "Time StructNet training with each IIL variant");
  BenchConfig bc;
  std::string sizes = "2,4,8";
  std::string iil = "both";
  std::string bench_out;
  bench->add_option("--sizes", sizes, "comma-separated n_tx = n_rx values")->capture_default_str();
  bench->add_option("--epochs", bc.epochs, "training epochs")->capture_default_str();
  bench->add_option("--iil", iil, "shifting, modulo or both")->capture_default_str();
  bench->add_option("--pilots", bc.pilots, "pilot symbols (at least n_tx are used)")->capture_default_str();
  bench->add_option("--window", bc.window, "shift window M")->capture_default_str();
  bench->add_option("--budget", bc.budget_s, "seconds per configuration before extrapolating")
      ->capture_default_str();
  bench->add_option("--repeats", bc.repeats, "runs per configuration, fastest reported")->capture_default_str();
  bench->add_option("--seed", bc.seed, "seed")->capture_default_str();
  bench->add_option("--out", bench_out, "output CSV (default: stdout)");

  auto* presets = app.add_subcommand("presets", "List or print the built-in configs");
  bool list = false;
  std::string show;
  presets->add_flag("--list", list, "list preset names");
  presets->add_option("--show", show, "print a preset as a config file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (config_opt->count() == 0 && preset_opt->count() == 0) {
        throw CLI::RequiredError("--config or --preset");
      }
      ExperimentConfig cfg = config_opt->count() > 0 ? parse_config(config_path) : preset(preset_name);
      if (out_opt->count() > 0) cfg.out = out_path;
      if (seed_opt->count() > 0) cfg.seed = seed;
      const auto rows = run_sweep(cfg);
      write_csv(rows, cfg.out);
      std::fprintf(stderr, "wrote %zu rows to %s\n", rows.size(), cfg.out.c_str());
    } else if (bench->parsed()) {
      bc.sizes.clear();
      std::size_t at = 0;
      while (at <= sizes.size()) {
        const auto comma = sizes.find(',', at);
        const auto item = sizes.substr(at, comma == std::string::npos ? std::string::npos : comma - at);
        bc.sizes.push_back(std::stoi(item));
        if (comma == std::string::npos) break;
        at = comma + 1;
      }
      bc.kinds = kinds_from(iil);
      const auto rows = bench_iil(bc);
      if (bench_out.empty()) {
        write_bench_csv(rows, std::cout);
      } else {
        write_bench_csv(rows, bench_out);
      }
    } else if (presets->parsed()) {
      if (!show.empty()) {
        std::cout << format_config(preset(show));
      } else {
        for (const auto& name : preset_names()) std::cout << name << '\n';
      }
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "structce: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "structce: %s\n", e.what());
    return 1;
  }
  return 0;
}
