// Command-line front end: single runs, parameter sweeps and the codec benchmark.
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 transmission cap hit.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rcnc/rcnc.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitCap = 4;

using namespace rcnc;
using namespace rcnc::harness;

struct Flags {
  std::string config_path;
  // Canonical key -> raw value, for every experiment flag given on the command line.
  std::map<std::string, std::string> overrides;
};

ExperimentConfig resolve(const Flags& flags) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) apply_config_file(config, flags.config_path);
  for (const auto& [key, value] : flags.overrides) apply_setting(config, key, value);
  validate(config);
  return config;
}

void print_summary(const SweepRow& row, std::ostream& out) {
  out << "\n" << row.mode << " with N=" << row.n_clients << " p=" << row.p << " k=" << row.k
      << ": airtime " << fixed6(row.airtime_units) << ", " << row.data_tx << " data frames, "
      << row.ack_count << " ACKs, " << row.retransmissions << " retransmissions, delivery "
      << fixed6(row.delivery_ratio) << (row.completed ? " (complete)" : " (incomplete)") << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Rateless coded multicast simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config_path, "key=value config file");
  for (const auto& key : config_keys()) {
    app.add_option("--" + key, flags.overrides[key], "overrides config key '" + key + "'");
  }

  auto* simulate = app.add_subcommand("simulate", "one run at the first mode/N/p of the config");
  std::size_t run_index = 0;
  simulate->add_option("--run-index", run_index, "run index used for seed derivation");

  auto* sweep = app.add_subcommand("sweep", "full grid to CSV");
  std::string out_path;
  sweep->add_option("--out", out_path, "CSV destination (stdout if omitted)");

  auto* bench = app.add_subcommand("codec-bench", "encoder/decoder throughput and overhead");
  std::vector<std::size_t> k_list{1, 8, 16, 32, 64, 128};
  std::size_t trials = 1000;
  std::size_t bench_segment = 1500;
  std::string bench_out;
  bench->add_option("--k-list", k_list, "segment counts to benchmark")->delimiter(',');
  bench->add_option("--trials", trials, "generations decoded per k");
  bench->add_option("--bench-segment-size", bench_segment, "bytes per segment");
  bench->add_option("--out", bench_out, "CSV destination (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  // Drop flags that were not given so they do not clobber the config file.
  for (auto it = flags.overrides.begin(); it != flags.overrides.end();) {
    if (app.count("--" + it->first) == 0) {
      it = flags.overrides.erase(it);
    } else {
      ++it;
    }
  }

  try {
    const ExperimentConfig config = resolve(flags);

    if (*simulate) {
      const SweepRow row = run_point(config, config.modes.front(), config.n_clients_list.front(),
                                     config.p_list.front(), run_index);
      std::cout << kCsvHeader << "\n" << format_row(row) << "\n";
      print_summary(row, std::cout);
    } else if (*sweep) {
      const auto rows = run_sweep(config);
      if (out_path.empty()) {
        emit_csv(rows, std::cout);
      } else {
        emit_csv(rows, out_path);
        std::cerr << "wrote " << rows.size() << " rows to " << out_path << "\n";
      }
    } else if (*bench) {
      const auto rows = codec_bench(k_list, bench_segment, trials, config.master_seed);
      if (bench_out.empty()) {
        emit_bench_csv(rows, std::cout);
      } else {
        std::ofstream out(bench_out, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + bench_out + "' for writing");
        emit_bench_csv(rows, out);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const EventCapExceeded& e) {
    std::cerr << "non-termination: " << e.what() << "\n";
    return kExitCap;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
