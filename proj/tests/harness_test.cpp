#include "rcnc/harness/bench.hpp"
#include "rcnc/harness/config.hpp"
#include "rcnc/harness/csv.hpp"
#include "rcnc/harness/sweep.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>

namespace rcnc::harness {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.modes = {SweepMode::Rcnc, SweepMode::Unicast};
  c.n_clients_list = {3, 12};
  c.p_list = {0.5, 0.9};
  c.k = 8;
  c.segment_size = 4;
  c.runs_per_point = 4;
  c.master_seed = 2024;
  return c;
}

std::string csv_text(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  emit_csv(rows, out);
  return out.str();
}

// ---- config ----

TEST(Config, ParsesKeysListsAndComments) {
  ExperimentConfig c;
  apply_config_text(c, R"(# sweep at half loss
p_list = 0.3, 0.5,0.8
n-list=2,4
modes=rcnc,plain,auto
k=16
runs=7
seed=99
t-data=2.5
cw-min=8
cw-max=64
unicast-threshold=4
capability-fraction=0.75
collocation-fraction=0.25
)");
  EXPECT_EQ(c.p_list, (std::vector<double>{0.3, 0.5, 0.8}));
  EXPECT_EQ(c.n_clients_list, (std::vector<std::size_t>{2, 4}));
  EXPECT_EQ(c.modes, (std::vector<SweepMode>{SweepMode::Rcnc, SweepMode::Plain, SweepMode::Auto}));
  EXPECT_EQ(c.k, 16u);
  EXPECT_EQ(c.runs_per_point, 7u);
  EXPECT_EQ(c.master_seed, 99u);
  EXPECT_EQ(c.airtime.t_data, 2.5);
  EXPECT_EQ(c.airtime.cw_min, 8u);
  EXPECT_EQ(c.airtime.cw_max, 64u);
  EXPECT_EQ(c.policy.unicast_threshold, 4u);
  EXPECT_EQ(c.capability_fraction, 0.75);
  EXPECT_EQ(c.collocation_fraction, 0.25);
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, EveryListedKeyIsAccepted) {
  const std::map<std::string, std::string> values{
      {"seed", "1"}, {"k", "2"}, {"segment-size", "3"}, {"p-list", "0.5"}, {"n-list", "4"},
      {"modes", "mixed"}, {"runs", "2"}, {"t-data", "1"}, {"t-ack", "0.1"}, {"t-slot", "0.02"},
      {"cw-min", "4"}, {"cw-max", "32"}, {"unicast-threshold", "3"}, {"rcnc-sweet-spot", "40"},
      {"collocation-fraction-limit", "0.6"}, {"capability-fraction", "0.5"},
      {"accept-prob", "0.9"}, {"collocation-fraction", "0"}, {"max-transmissions", "1000"}};
  ExperimentConfig c;
  for (const auto& key : config_keys()) {
    ASSERT_TRUE(values.count(key)) << key;
    EXPECT_NO_THROW(apply_setting(c, key, values.at(key))) << key;
  }
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  ExperimentConfig c;
  EXPECT_THROW(apply_setting(c, "colour", "red"), ConfigError);
  EXPECT_THROW(apply_setting(c, "k", "abc"), ConfigError);
  EXPECT_THROW(apply_setting(c, "k", "12x"), ConfigError);
  EXPECT_THROW(apply_setting(c, "modes", "rcnc,teleport"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "k 12\n"), ConfigError);
  EXPECT_THROW(apply_config_file(c, "/nonexistent/dir/x.conf"), IoError);
}

TEST(Config, ValidationCatchesBadGrid) {
  auto expect_bad = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    EXPECT_THROW(validate(c), ConfigError);
  };
  expect_bad([](ExperimentConfig& c) { c.p_list = {0.5, 0.0}; });
  expect_bad([](ExperimentConfig& c) { c.p_list = {1.2}; });
  expect_bad([](ExperimentConfig& c) { c.n_clients_list = {0}; });
  expect_bad([](ExperimentConfig& c) { c.runs_per_point = 0; });
  expect_bad([](ExperimentConfig& c) { c.k = 0; });
  expect_bad([](ExperimentConfig& c) { c.modes.clear(); });
  expect_bad([](ExperimentConfig& c) { c.capability_fraction = 1.5; });
  expect_bad([](ExperimentConfig& c) { c.airtime.cw_max = 100; });
  ExperimentConfig c;
  c.p_list = {0.0};
  EXPECT_THROW(run_sweep(c), ConfigError);
}

// ---- seeds ----

TEST(Seeds, Fnv1aReferenceVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST(Seeds, DerivedFromCanonicalTuple) {
  EXPECT_EQ(derive_seed(7, SweepMode::Rcnc, 30, 0.5, 3), fnv1a64("7|rcnc|30|0.5|3"));
  EXPECT_NE(derive_seed(7, SweepMode::Rcnc, 30, 0.5, 3), derive_seed(7, SweepMode::Unicast, 30, 0.5, 3));
  EXPECT_NE(derive_seed(7, SweepMode::Rcnc, 30, 0.5, 3), derive_seed(7, SweepMode::Rcnc, 30, 0.5, 4));
}

// ---- roster ----

TEST(Roster, CapabilityAndCollocationCounts) {
  Rng rng(1);
  const auto r = build_roster(20, 0.4, 0.75, 0.3, rng);
  ASSERT_EQ(r.size(), 20u);
  int capable = 0;
  int grouped = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_EQ(r[i].client_id, i);
    EXPECT_EQ(r[i].success_prob, 0.4);
    capable += r[i].supports_decoding;
    grouped += r[i].collocation_group.has_value();
  }
  EXPECT_EQ(capable, 15);
  EXPECT_EQ(grouped, 6);
}

// ---- sweep ----

TEST(Sweep, RowCountOrderAndFields) {
  const auto c = small_config();
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 2u * 2u * 2u * 4u);
  EXPECT_EQ(rows[0].mode, "rcnc");
  EXPECT_EQ(rows[0].n_clients, 3u);
  EXPECT_EQ(rows[0].p, 0.5);
  EXPECT_EQ(rows[3].run_index, 3u);
  EXPECT_EQ(rows[4].p, 0.9);
  EXPECT_EQ(rows[16].mode, "unicast");
  for (const auto& r : rows) {
    EXPECT_EQ(r.k, 8u);
    EXPECT_EQ(r.seed, derive_seed(c.master_seed, parse_mode(r.mode), r.n_clients, r.p, r.run_index));
    EXPECT_TRUE(r.completed);
    if (r.mode == "rcnc") {
      EXPECT_EQ(r.ack_count, r.n_clients);
    } else {
      EXPECT_EQ(r.ack_count, r.n_clients * r.k);
    }
  }
}

TEST(Sweep, UnicastCostsMoreAirtimeThanRcncAtThirtyClients) {
  ExperimentConfig c;
  c.modes = {SweepMode::Rcnc, SweepMode::Unicast};
  c.n_clients_list = {30};
  c.p_list = {0.5};
  c.k = 32;
  c.runs_per_point = 500;
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 1000u);
  double rcnc = 0;
  double unicast = 0;
  for (const auto& r : rows) (r.mode == "rcnc" ? rcnc : unicast) += r.airtime_units;
  EXPECT_GT(unicast / rcnc, 1.0);
}

TEST(Sweep, DeterministicCsv) {
  auto c = small_config();
  c.runs_per_point = 1;
  EXPECT_EQ(csv_text(run_sweep(c)), csv_text(run_sweep(c)));
}

TEST(Sweep, LosslessPlainMulticast) {
  ExperimentConfig c;
  c.modes = {SweepMode::Plain};
  c.n_clients_list = {1, 7};
  c.p_list = {1.0};
  c.k = 12;
  c.runs_per_point = 3;
  for (const auto& r : run_sweep(c)) {
    EXPECT_EQ(r.delivery_ratio, 1.0);
    EXPECT_EQ(r.airtime_units, 12 * c.airtime.t_data);
    EXPECT_TRUE(r.completed);
  }
}

TEST(Sweep, AddingRunsKeepsEarlierRows) {
  auto c = small_config();
  const auto before = run_sweep(c);
  c.runs_per_point = 5;
  const auto after = run_sweep(c);
  ASSERT_EQ(after.size(), before.size() / 4 * 5);
  for (std::size_t point = 0; point < before.size() / 4; ++point) {
    for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(before[point * 4 + r], after[point * 5 + r]);
  }
}

TEST(Sweep, AutoRowsCarryTheDecidedMode) {
  ExperimentConfig c;
  c.modes = {SweepMode::Auto};
  c.n_clients_list = {4, 15, 30};
  c.p_list = {0.5};
  c.k = 8;
  c.segment_size = 2;
  c.runs_per_point = 15;
  c.capability_fraction = 0.9;
  c.accept_prob = 0.8;
  std::map<std::string, int> seen;
  for (const auto& row : run_sweep(c)) {
    ++seen[row.mode];
    RunSetup setup = prepare_run(c, SweepMode::Auto, row.n_clients, row.p, row.run_index);
    const AutoResolution res = resolve_auto(setup.roster, c, setup.rng);
    EXPECT_EQ(row.mode, auto_label(res.decision.mode));
    EXPECT_EQ(res.decision, decide_mode(res.effective, c.policy));
    for (ClientId id : res.decision.rcnc_set) {
      EXPECT_TRUE(res.outcomes[id].accepted) << "client " << id << " in rcnc set without accepting";
    }
    if (row.mode == "auto:rcnc") {
      EXPECT_EQ(row.ack_count, row.n_clients);
    }
  }
  EXPECT_GT(seen["auto:unicast"], 0);
  EXPECT_GT(seen["auto:mixed"], 0);
}

TEST(Sweep, CollocatedRostersAreSentUnicastInAutoMode) {
  ExperimentConfig c;
  c.modes = {SweepMode::Auto};
  c.n_clients_list = {40};
  c.k = 4;
  c.runs_per_point = 3;
  c.collocation_fraction = 1.0;
  for (const auto& row : run_sweep(c)) EXPECT_EQ(row.mode, "auto:unicast");
}

TEST(Sweep, MixedModeSplitsByCapability) {
  ExperimentConfig c;
  c.modes = {SweepMode::Mixed};
  c.n_clients_list = {10};
  c.p_list = {1.0};
  c.k = 4;
  c.runs_per_point = 2;
  c.capability_fraction = 0.6;
  for (const auto& row : run_sweep(c)) {
    // Lossless: 6 coded clients finish in the same rounds and ACK once each,
    // 4 unicast clients ACK every segment.
    EXPECT_EQ(row.ack_count, 6u + 4u * 4u);
    EXPECT_EQ(row.mode, "mixed");
  }
}

// ---- csv ----

TEST(Csv, EmptyIsHeaderOnly) {
  EXPECT_EQ(csv_text({}), std::string(kCsvHeader) + "\n");
}

TEST(Csv, OneRowHasTwelveFields) {
  SweepRow r{"rcnc", 30, 0.5, 32, 0, 123, 88.5, 88, 30, 0, 1.0, true};
  const std::string text = csv_text({r});
  std::istringstream in(text);
  std::string header, line, extra;
  ASSERT_TRUE(std::getline(in, header));
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11);
  EXPECT_EQ(line, "rcnc,30,0.500000,32,0,123,88.500000,88,30,0,1.000000,true");
}

TEST(Csv, ParseRoundTripAtSixDecimals) {
  auto c = small_config();
  c.modes.push_back(SweepMode::Plain);
  const auto rows = run_sweep(c);
  std::istringstream in(csv_text(rows));
  const auto parsed = parse_csv(in);
  ASSERT_EQ(parsed.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(parsed[i].mode, rows[i].mode);
    EXPECT_EQ(parsed[i].seed, rows[i].seed);
    EXPECT_EQ(parsed[i].data_tx, rows[i].data_tx);
    EXPECT_EQ(parsed[i].completed, rows[i].completed);
    EXPECT_NEAR(parsed[i].airtime_units, rows[i].airtime_units, 5e-7);
    EXPECT_NEAR(parsed[i].delivery_ratio, rows[i].delivery_ratio, 5e-7);
    EXPECT_NEAR(parsed[i].p, rows[i].p, 5e-7);
  }
}

TEST(Csv, UnwritableDestinationNamesPath) {
  const std::string path = "/nonexistent-dir/out.csv";
  try {
    emit_csv(std::vector<SweepRow>{}, path);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(path), std::string::npos);
  }
}

// ---- codec bench ----

TEST(CodecBench, SingleSegmentNeedsOnePacket) {
  const std::vector<std::size_t> ks{1};
  const auto rows = codec_bench(ks, 64, 200, 1);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean_packets_to_complete, 1.0);
}

TEST(CodecBench, OverheadAtK32) {
  const std::vector<std::size_t> ks{32};
  const auto rows = codec_bench(ks, 16, 10000, 2);
  EXPECT_NEAR(rows[0].mean_packets_to_complete, 33.6, 0.02 * 33.6);
  EXPECT_GT(rows[0].encode_mbps_mean, 0.0);
  EXPECT_GT(rows[0].decode_mbps_mean, 0.0);
  EXPECT_LE(rows[0].encode_mbps_p50, rows[0].encode_mbps_p95);
  EXPECT_THROW(codec_bench(std::vector<std::size_t>{}, 16, 1, 1), InvalidInput);
}

// ---- CLI ----

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RCNC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Cli, ExitCodes) {
  const auto dir = std::filesystem::temp_directory_path() / "rcnc_cli_test";
  std::filesystem::create_directories(dir);
  EXPECT_EQ(run_cli("simulate --n-list 5 --k 4 --runs 1"), 0);
  EXPECT_EQ(run_cli("simulate --k 0"), 2);
  EXPECT_EQ(run_cli("simulate --modes warp"), 2);
  EXPECT_EQ(run_cli("--config " + (dir / "missing.conf").string() + " simulate"), 3);
  EXPECT_EQ(run_cli("sweep --n-list 2 --runs 1 --k 2 --out /nonexistent-dir/x.csv"), 3);
  EXPECT_EQ(run_cli("simulate --modes unicast --p-list 0.01 --max-transmissions 10"), 4);
  EXPECT_EQ(run_cli("codec-bench --k-list 1,4 --trials 5"), 0);
  EXPECT_EQ(run_cli(""), 2);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const auto dir = std::filesystem::temp_directory_path() / "rcnc_cli_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream conf(dir / "grid.conf");
    conf << "modes=rcnc\nn_list=3\np_list=0.5\nk=4\nruns=2\nseed=5\n";
  }
  const auto out = dir / "grid.csv";
  ASSERT_EQ(run_cli("--config " + (dir / "grid.conf").string() + " --runs 3 sweep --out " +
                    out.string()),
            0);
  std::istringstream in(slurp(out));
  const auto rows = parse_csv(in);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].mode, "rcnc");
  EXPECT_EQ(rows[0].n_clients, 3u);
  EXPECT_EQ(rows[0].k, 4u);
  EXPECT_EQ(rows[2].seed, derive_seed(5, SweepMode::Rcnc, 3, 0.5, 2));
}

}  // namespace
}  // namespace rcnc::harness
