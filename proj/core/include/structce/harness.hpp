#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "structce/random.hpp"
#include "structce/signal_model.hpp"
#include "structce/structnet.hpp"

namespace structce {

enum class Method { LS, GenieLMMSE, EmLMMSE, StructNetCE, PerfectCSI };

std::string_view to_string(Method m) noexcept;
/// Accepts the canonical names case-insensitively, ignoring '-' and '_'.
Method parse_method(std::string_view s);

struct ExperimentConfig {
  SubframeSpec spec;
  int qam_order = 16;
  int pdp_taps = 8;
  double pdp_decay = 3.0;
  std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
  int n_subframes = 200;
  std::vector<Method> methods{Method::LS, Method::GenieLMMSE, Method::EmLMMSE, Method::StructNetCE,
                              Method::PerfectCSI};
  TrainConfig train;
  int em_window = 100;
  /// Pseudo-subframes credited to the identity prior of em-LMMSE.
  int em_prior = 1;
  Seed seed = 1;
  std::string out = "results.csv";
  /// Record estimator wall time. Off by default so repeated runs produce
  /// byte-identical CSV files.
  bool timing = false;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses `key=value` lines; blank lines and `#` comments are ignored.
ExperimentConfig parse_config_text(std::string_view text);
/// Throws IoError if the file cannot be read.
ExperimentConfig parse_config(const std::filesystem::path& path);
/// Config text that parse_config_text maps back to `cfg`.
std::string format_config(const ExperimentConfig& cfg);

std::vector<std::string> preset_names();
/// Throws InvalidArgument for an unknown name.
ExperimentConfig preset(std::string_view name);

struct ResultRow {
  std::string method;
  std::string pilot_pattern;
  double snr_db = 0.0;
  double mse = 0.0;
  double ber = 0.0;
  std::int64_t subframes = 0;
  double wall_time_s = 0.0;
  Seed seed = 0;

  bool operator==(const ResultRow&) const = default;
};

/// One row per (SNR, method), SNR-major. An estimator that throws gets NaN
/// mse and ber for that SNR; the other methods are unaffected.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg);

inline constexpr std::string_view kCsvHeader = "method,pilot_pattern,snr_db,mse,ber,subframes,wall_time_s,seed";

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void write_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_csv(std::istream& is);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

/// Single-subcarrier training-time benchmark of the two IIL variants.
struct BenchConfig {
  std::vector<int> sizes{2, 4, 8};  // n_tx = n_rx
  std::vector<IilKind> kinds{IilKind::Shifting, IilKind::Modulo};
  int epochs = 500;
  int pilots = 500;  // raised to n_tx when smaller
  int window = 3;
  double snr_db = 10.0;
  /// Per-configuration time limit in seconds. Once exceeded, the remaining
  /// epochs are extrapolated from the mean epoch time.
  double budget_s = 120.0;
  std::size_t grid_cap = 10'000'000;
  /// Runs per configuration; the fastest is reported. Stops early once the
  /// budget is spent.
  int repeats = 3;
  Seed seed = 1;
};

struct BenchRow {
  int n_tx = 0;
  int n_rx = 0;
  std::string iil;
  int epochs = 0;
  int epochs_timed = 0;
  double wall_time_s = 0.0;
  std::string status;  // ok | extrapolated | skipped
};

std::vector<BenchRow> bench_iil(const BenchConfig& cfg);

inline constexpr std::string_view kBenchHeader = "n_tx,n_rx,iil,epochs,epochs_timed,wall_time_s,status";

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& os);
void write_bench_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path);

std::string_view to_string(IilKind k) noexcept;
IilKind parse_iil_kind(std::string_view s);

}  // namespace structce
