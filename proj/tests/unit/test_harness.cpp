#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "structce/errors.hpp"
#include "structce/harness.hpp"

using namespace structce;

namespace {

std::string csv_text(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(rows, os);
  return os.str();
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.spec.n_sc = 16;
  cfg.n_subframes = 4;
  cfg.snr_db = {5.0, 15.0};
  cfg.train.epochs = 5;
  return cfg;
}

std::string config_error_key(std::string_view text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("method names") {
  for (Method m : {Method::LS, Method::GenieLMMSE, Method::EmLMMSE, Method::StructNetCE, Method::PerfectCSI}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK(parse_method("em-lmmse") == Method::EmLMMSE);
  CHECK(parse_method("structnet_ce") == Method::StructNetCE);
  CHECK_THROWS_AS(parse_method("mmse"), InvalidArgument);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config_text("n_sc=64\nsnr_db=0,5,10,15,20\n");
  CHECK(cfg.spec.n_sc == 64);
  CHECK(cfg.snr_db == std::vector<double>{0, 5, 10, 15, 20});
  CHECK(cfg.n_subframes == ExperimentConfig{}.n_subframes);
  CHECK(cfg.train.epochs == TrainConfig{}.epochs);

  const auto full = parse_config_text(
      "# comment\n\n n_rx = 4\nn_tx=2\npilot_pattern=orthogonal\nmethods=LS, PerfectCSI\niil=shifting\n"
      "iil_window=2\niil_order=given\nupdate_interference=false\nseed=18446744073709551615\nout=x.csv\n"
      "lr_channel=0.5\n");
  CHECK(full.spec.n_rx == 4);
  CHECK(full.spec.pilot_pattern == PilotPattern::Orthogonal);
  CHECK(full.methods == std::vector<Method>{Method::LS, Method::PerfectCSI});
  CHECK(full.train.iil_kind == IilKind::Shifting);
  CHECK(full.train.iil_window == 2);
  CHECK(full.train.iil_order == IilOrder::Given);
  CHECK_FALSE(full.train.update_interference);
  CHECK(full.seed == 18446744073709551615ULL);
  CHECK(full.out == "x.csv");
  CHECK(full.train.lr_channel == 0.5);

  const auto large = parse_config_text("n_sc=1024\nn_sym=14\nn_pilot=2\nn_h1=16\nn_h2=32\nn_rx=2\nn_tx=2\n");
  CHECK(large.spec.n_sc == 1024);
  CHECK(large.train.hidden1 == 16);
  CHECK(large.train.hidden2 == 32);
}

TEST_CASE("config errors name the key") {
  CHECK(config_error_key("n_pilot=0") == "n_pilot");
  CHECK(config_error_key("n_subframes=0") == "n_subframes");
  CHECK(config_error_key("snr_db=") == "snr_db");
  CHECK(config_error_key("bogus=1") == "bogus");
  CHECK(config_error_key("n_sc=12x") == "n_sc");
  CHECK(config_error_key("qam_order=8") == "qam_order");
  CHECK(config_error_key("methods=LS,foo") == "methods");
  CHECK(config_error_key("iil=fourier") == "iil");
  CHECK(config_error_key("n_pilot=1\nn_tx=2") == "n_pilot");
  CHECK_THROWS_AS(parse_config_text("just text"), ConfigError);
  CHECK_THROWS_AS(parse_config("/nonexistent/structce.cfg"), IoError);
}

TEST_CASE("config file and format round trip") {
  ExperimentConfig cfg = small_config();
  cfg.snr_db = {-2.5, 0.1, 33.3};
  cfg.train.lr_classifier = 0.0123456789012345;
  cfg.train.iil_kind = IilKind::Shifting;
  cfg.methods = {Method::EmLMMSE, Method::LS};
  cfg.seed = 0xDEADBEEFCAFEULL;
  cfg.timing = true;
  const auto back = parse_config_text(format_config(cfg));
  CHECK(format_config(back) == format_config(cfg));
  CHECK(back.train.lr_classifier == cfg.train.lr_classifier);
  CHECK(back.snr_db == cfg.snr_db);
  CHECK(back.methods == cfg.methods);

  const auto path = std::filesystem::path(STRUCTCE_TEST_TMP) / "harness_roundtrip.cfg";
  std::ofstream(path) << format_config(cfg);
  CHECK(format_config(parse_config(path)) == format_config(cfg));
}

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(std::find(names.begin(), names.end(), "paper-table3") != names.end());
  for (const auto& n : names) CHECK_NOTHROW(preset(n).validate());
  CHECK(preset("paper-table3").spec.n_sc == 1024);
  CHECK(preset("desk-default").spec.n_sc == 64);
  CHECK_THROWS_AS(preset("nope"), InvalidArgument);
}

TEST_CASE("noiseless LS sweep is exact") {
  ExperimentConfig cfg = small_config();
  cfg.snr_db = {200.0};
  cfg.methods = {Method::LS};
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].mse < 1e-15);
  CHECK(rows[0].subframes == 4);
  CHECK(rows[0].pilot_pattern == "nonorthogonal");
}

TEST_CASE("genie LMMSE never loses to LS") {
  ExperimentConfig cfg = small_config();
  cfg.n_subframes = 10;
  cfg.snr_db = {0.0, 10.0, 20.0};
  cfg.methods = {Method::GenieLMMSE, Method::LS};
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 6);
  for (std::size_t k = 0; k < rows.size(); k += 2) CHECK(rows[k].mse <= rows[k + 1].mse);
}

TEST_CASE("sweeps are reproducible and methods are isolated") {
  const ExperimentConfig cfg = small_config();
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  CHECK(csv_text(a) == csv_text(b));
  CHECK(a.size() == cfg.snr_db.size() * cfg.methods.size());

  ExperimentConfig only = cfg;
  only.methods = {Method::StructNetCE, Method::LS};
  const auto c = run_sweep(only);
  for (const auto& row : c) {
    const auto same = std::find_if(a.begin(), a.end(), [&](const ResultRow& r) {
      return r.method == row.method && r.snr_db == row.snr_db;
    });
    REQUIRE(same != a.end());
    CHECK(*same == row);
  }

  ExperimentConfig other = cfg;
  other.seed = 2;
  CHECK(csv_text(run_sweep(other)) != csv_text(a));
}

TEST_CASE("a failing estimator does not abort the sweep") {
  ExperimentConfig cfg = small_config();
  cfg.methods = {Method::LS, Method::StructNetCE};
  cfg.train.iil_kind = IilKind::Shifting;
  cfg.train.shifting_grid_cap = 1;
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    if (r.method == "LS") {
      CHECK(std::isfinite(r.mse));
      CHECK(r.subframes == 4);
    } else {
      CHECK(std::isnan(r.mse));
      CHECK(std::isnan(r.ber));
      CHECK(r.subframes == 0);
    }
  }
}

TEST_CASE("CSV output") {
  CHECK(csv_text({}) == std::string(kCsvHeader) + "\n");

  ResultRow row{"LS", "orthogonal", 10.0, 0.123456789012, 0.5, 7, 0.0, 42};
  const auto one = csv_text({row});
  CHECK(one == std::string(kCsvHeader) + "\nLS,orthogonal,10,0.123456789,0.5,7,0,42\n");

  std::vector<ResultRow> rows{{"LS", "nonorthogonal", -5.0, 0.25, 0.125, 200, 1.5, 1},
                              {"EmLMMSE", "nonorthogonal", 20.0, NAN, NAN, 0, 0.0, 18446744073709551615ULL}};
  std::istringstream in(csv_text(rows));
  const auto back = read_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == rows[0]);
  CHECK(back[1].method == "EmLMMSE");
  CHECK(std::isnan(back[1].mse));
  CHECK(back[1].seed == rows[1].seed);

  const auto path = std::filesystem::path(STRUCTCE_TEST_TMP) / "harness_rows.csv";
  write_csv({rows[0]}, path);
  CHECK(read_csv(path) == std::vector<ResultRow>{rows[0]});

  std::istringstream bad("method,snr\nLS,1\n");
  CHECK_THROWS_AS(read_csv(bad), IoError);
  CHECK_THROWS_AS(write_csv(rows, std::filesystem::path("/nonexistent/dir/out.csv")), IoError);
}

TEST_CASE("IIL benchmark rows") {
  BenchConfig cfg;
  cfg.sizes = {2, 16};
  cfg.epochs = 2;
  cfg.pilots = 4;
  cfg.budget_s = 5.0;
  const auto rows = bench_iil(cfg);
  REQUIRE(rows.size() == 4);
  int skipped = 0;
  for (const auto& r : rows) {
    CHECK(r.n_tx == r.n_rx);
    if (r.status == "skipped") {
      ++skipped;
      CHECK(r.n_tx == 16);
      CHECK(r.iil == "shifting");
      CHECK(std::isnan(r.wall_time_s));
    } else {
      CHECK(r.status == "ok");
      CHECK(r.epochs_timed == 2);
      CHECK(r.wall_time_s >= 0.0);
    }
  }
  CHECK(skipped == 1);
  std::ostringstream os;
  write_bench_csv(rows, os);
  CHECK(os.str().rfind(std::string(kBenchHeader) + "\n", 0) == 0);
}

}  // TEST_SUITE
