#include "structce/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "structce/channel_sim.hpp"
#include "structce/classical_estimators.hpp"
#include "structce/errors.hpp"
#include "structce/evaluation.hpp"

namespace structce {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto at = s.find(sep);
    out.push_back(trim(s.substr(0, at)));
    if (at == std::string_view::npos) return out;
    s.remove_prefix(at + 1);
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

template <typename T>
T parse_number(const std::string& key, std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (v.empty() || res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError(key, "cannot parse '" + std::string(v) + "' as a number");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw ConfigError(key, "value must be finite");
  }
  return out;
}

int parse_int_min(const std::string& key, std::string_view v, int min) {
  const int out = parse_number<int>(key, v);
  if (out < min) throw ConfigError(key, "must be >= " + std::to_string(min));
  return out;
}

bool parse_bool(const std::string& key, std::string_view v) {
  const auto s = lower(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(v) + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_g10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n_rx", [](auto& c, auto& k, auto v) { c.spec.n_rx = parse_int_min(k, v, 1); }},
      {"n_tx", [](auto& c, auto& k, auto v) { c.spec.n_tx = parse_int_min(k, v, 1); }},
      {"n_sc", [](auto& c, auto& k, auto v) { c.spec.n_sc = parse_int_min(k, v, 1); }},
      {"n_cp", [](auto& c, auto& k, auto v) { c.spec.cp_len = parse_int_min(k, v, 0); }},
      {"n_sym", [](auto& c, auto& k, auto v) { c.spec.n_sym = parse_int_min(k, v, 1); }},
      {"n_pilot", [](auto& c, auto& k, auto v) { c.spec.n_pilot = parse_int_min(k, v, 1); }},
      {"pilot_pattern",
       [](auto& c, auto& k, auto v) {
         try {
           c.spec.pilot_pattern = parse_pilot_pattern(lower(v));
         } catch (const InvalidArgument& e) {
           throw ConfigError(k, e.what());
         }
       }},
      {"qam_order",
       [](auto& c, auto& k, auto v) {
         const int q = parse_number<int>(k, v);
         if (q != 4 && q != 16 && q != 64) throw ConfigError(k, "must be 4, 16 or 64");
         c.qam_order = q;
       }},
      {"pdp_taps", [](auto& c, auto& k, auto v) { c.pdp_taps = parse_int_min(k, v, 1); }},
      {"pdp_decay",
       [](auto& c, auto& k, auto v) {
         c.pdp_decay = parse_number<double>(k, v);
         if (!(c.pdp_decay > 0.0)) throw ConfigError(k, "must be > 0");
       }},
      {"snr_db",
       [](auto& c, auto& k, auto v) {
         c.snr_db.clear();
         for (auto item : split(v, ',')) c.snr_db.push_back(parse_number<double>(k, item));
       }},
      {"n_subframes", [](auto& c, auto& k, auto v) { c.n_subframes = parse_int_min(k, v, 1); }},
      {"methods",
       [](auto& c, auto& k, auto v) {
         c.methods.clear();
         for (auto item : split(v, ',')) {
           Method m{};
           try {
             m = parse_method(item);
           } catch (const InvalidArgument& e) {
             throw ConfigError(k, e.what());
           }
           if (std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end()) {
             throw ConfigError(k, "duplicate method '" + std::string(item) + "'");
           }
           c.methods.push_back(m);
         }
       }},
      {"epochs", [](auto& c, auto& k, auto v) { c.train.epochs = parse_int_min(k, v, 0); }},
      {"lr_classifier",
       [](auto& c, auto& k, auto v) {
         c.train.lr_classifier = parse_number<double>(k, v);
         if (c.train.lr_classifier < 0.0) throw ConfigError(k, "must be >= 0");
       }},
      {"lr_channel",
       [](auto& c, auto& k, auto v) {
         c.train.lr_channel = parse_number<double>(k, v);
         if (c.train.lr_channel < 0.0) throw ConfigError(k, "must be >= 0");
       }},
      {"iil",
       [](auto& c, auto& k, auto v) {
         try {
           c.train.iil_kind = parse_iil_kind(lower(v));
         } catch (const InvalidArgument& e) {
           throw ConfigError(k, e.what());
         }
       }},
      {"iil_window", [](auto& c, auto& k, auto v) { c.train.iil_window = parse_int_min(k, v, 0); }},
      {"iil_order",
       [](auto& c, auto& k, auto v) {
         const auto s = lower(v);
         if (s == "descending") {
           c.train.iil_order = IilOrder::DescendingStrength;
         } else if (s == "given") {
           c.train.iil_order = IilOrder::Given;
         } else {
           throw ConfigError(k, "expected descending or given, got '" + std::string(v) + "'");
         }
       }},
      {"update_interference", [](auto& c, auto& k, auto v) { c.train.update_interference = parse_bool(k, v); }},
      {"seed", [](auto& c, auto& k, auto v) { c.seed = parse_number<Seed>(k, v); }},
      {"out",
       [](auto& c, auto& k, auto v) {
         if (v.empty()) throw ConfigError(k, "must not be empty");
         c.out = std::string(v);
       }},
      {"n_h1", [](auto& c, auto& k, auto v) { c.train.hidden1 = parse_int_min(k, v, 1); }},
      {"n_h2", [](auto& c, auto& k, auto v) { c.train.hidden2 = parse_int_min(k, v, 1); }},
      {"eps_mod",
       [](auto& c, auto& k, auto v) {
         c.train.epsilon_mod = parse_number<double>(k, v);
         if (c.train.epsilon_mod < 0.0) throw ConfigError(k, "must be >= 0");
       }},
      {"em_window", [](auto& c, auto& k, auto v) { c.em_window = parse_int_min(k, v, 1); }},
      {"em_prior", [](auto& c, auto& k, auto v) { c.em_prior = parse_int_min(k, v, 0); }},
      {"timing", [](auto& c, auto& k, auto v) { c.timing = parse_bool(k, v); }},
  };
  return table;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::LS: return "LS";
    case Method::GenieLMMSE: return "GenieLMMSE";
    case Method::EmLMMSE: return "EmLMMSE";
    case Method::StructNetCE: return "StructNetCE";
    case Method::PerfectCSI: return "PerfectCSI";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  std::string key;
  for (char ch : s) {
    if (ch != '-' && ch != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  for (Method m : {Method::LS, Method::GenieLMMSE, Method::EmLMMSE, Method::StructNetCE, Method::PerfectCSI}) {
    if (key == lower(to_string(m))) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(s) + "'");
}

std::string_view to_string(IilKind k) noexcept { return k == IilKind::Shifting ? "shifting" : "modulo"; }

IilKind parse_iil_kind(std::string_view s) {
  if (s == "shifting") return IilKind::Shifting;
  if (s == "modulo") return IilKind::Modulo;
  throw InvalidArgument("unknown IIL kind '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
  if (spec.n_tx < 1) throw ConfigError("n_tx", "must be >= 1");
  if (spec.n_rx < 1) throw ConfigError("n_rx", "must be >= 1");
  if (spec.n_sc < 1) throw ConfigError("n_sc", "must be >= 1");
  if (spec.cp_len < 0) throw ConfigError("n_cp", "must be >= 0");
  if (spec.n_pilot < 1) throw ConfigError("n_pilot", "must be >= 1");
  if (spec.n_pilot < spec.n_tx) throw ConfigError("n_pilot", "must be >= n_tx for a solvable pilot block");
  if (spec.n_sym <= spec.n_pilot) throw ConfigError("n_sym", "must exceed n_pilot to leave data symbols");
  if (qam_order != 4 && qam_order != 16 && qam_order != 64) throw ConfigError("qam_order", "must be 4, 16 or 64");
  if (pdp_taps < 1 || pdp_taps > spec.n_sc) throw ConfigError("pdp_taps", "must be in [1, n_sc]");
  if (!(pdp_decay > 0.0)) throw ConfigError("pdp_decay", "must be > 0");
  if (snr_db.empty()) throw ConfigError("snr_db", "list must not be empty");
  if (n_subframes < 1) throw ConfigError("n_subframes", "must be >= 1");
  if (methods.empty()) throw ConfigError("methods", "list must not be empty");
  if (em_window < 1) throw ConfigError("em_window", "must be >= 1");
  if (em_prior < 0) throw ConfigError("em_prior", "must be >= 0");
  try {
    train.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("train", e.what());
  }
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  const auto& table = setters();
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), "line " + std::to_string(line_no) + " is not key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown key");
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  auto list = [](const auto& items, auto fmt) {
    std::string s;
    for (const auto& x : items) {
      if (!s.empty()) s += ',';
      s += fmt(x);
    }
    return s;
  };
  os << "n_rx=" << cfg.spec.n_rx << '\n'
     << "n_tx=" << cfg.spec.n_tx << '\n'
     << "n_sc=" << cfg.spec.n_sc << '\n'
     << "n_cp=" << cfg.spec.cp_len << '\n'
     << "n_sym=" << cfg.spec.n_sym << '\n'
     << "n_pilot=" << cfg.spec.n_pilot << '\n'
     << "pilot_pattern=" << to_string(cfg.spec.pilot_pattern) << '\n'
     << "qam_order=" << cfg.qam_order << '\n'
     << "pdp_taps=" << cfg.pdp_taps << '\n'
     << "pdp_decay=" << format_double(cfg.pdp_decay) << '\n'
     << "snr_db=" << list(cfg.snr_db, format_double) << '\n'
     << "n_subframes=" << cfg.n_subframes << '\n'
     << "methods=" << list(cfg.methods, [](Method m) { return std::string(to_string(m)); }) << '\n'
     << "epochs=" << cfg.train.epochs << '\n'
     << "lr_classifier=" << format_double(cfg.train.lr_classifier) << '\n'
     << "lr_channel=" << format_double(cfg.train.lr_channel) << '\n'
     << "iil=" << to_string(cfg.train.iil_kind) << '\n'
     << "iil_window=" << cfg.train.iil_window << '\n'
     << "iil_order=" << (cfg.train.iil_order == IilOrder::Given ? "given" : "descending") << '\n'
     << "update_interference=" << (cfg.train.update_interference ? "true" : "false") << '\n'
     << "n_h1=" << cfg.train.hidden1 << '\n'
     << "n_h2=" << cfg.train.hidden2 << '\n'
     << "eps_mod=" << format_double(cfg.train.epsilon_mod) << '\n'
     << "em_window=" << cfg.em_window << '\n'
     << "em_prior=" << cfg.em_prior << '\n'
     << "seed=" << cfg.seed << '\n'
     << "out=" << cfg.out << '\n'
     << "timing=" << (cfg.timing ? "true" : "false") << '\n';
  return os.str();
}

std::vector<std::string> preset_names() { return {"desk-default", "paper-table3"}; }

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig cfg;
  if (name == "desk-default") return cfg;
  if (name == "paper-table3") {
    cfg.spec.n_sc = 1024;
    cfg.spec.cp_len = 32;
    cfg.spec.n_sym = 14;
    cfg.spec.n_pilot = 2;
    cfg.spec.n_tx = 2;
    cfg.spec.n_rx = 2;
    cfg.train.hidden1 = 16;
    cfg.train.hidden2 = 32;
    cfg.out = "paper-table3.csv";
    return cfg;
  }
  throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// sweep

namespace {

struct Accumulator {
  double mse_sum = 0.0;
  std::int64_t bit_errors = 0;
  std::int64_t bits_total = 0;
  std::int64_t subframes = 0;
  double wall_time_s = 0.0;
  bool failed = false;
};

std::vector<Eigen::MatrixXcd> ls_all(const std::vector<Eigen::MatrixXcd>& y_p,
                                     const std::vector<Eigen::MatrixXcd>& x_p) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(y_p.size());
  for (std::size_t c = 0; c < y_p.size(); ++c) out.push_back(estimate_ls(y_p[c], x_p[c]));
  return out;
}

void put_antenna_pair(std::vector<Eigen::MatrixXcd>& per_subcarrier, int rx, int tx, const Eigen::VectorXcd& v) {
  for (std::size_t c = 0; c < per_subcarrier.size(); ++c) per_subcarrier[c](rx, tx) = v(static_cast<Eigen::Index>(c));
}

}  // namespace

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& spec = cfg.spec;
  const Constellation constellation(cfg.qam_order);
  const PowerDelayProfile pdp = exponential_pdp(cfg.pdp_taps, cfg.pdp_decay);
  const bool need_genie =
      std::find(cfg.methods.begin(), cfg.methods.end(), Method::GenieLMMSE) != cfg.methods.end();
  const Eigen::MatrixXcd r_hh = need_genie ? analytic_freq_correlation(pdp, spec.n_sc) : Eigen::MatrixXcd();
  const auto n_sc = static_cast<std::size_t>(spec.n_sc);

  std::vector<ResultRow> rows;
  for (double snr : cfg.snr_db) {
    const double sigma2 = snr_to_noise_var(snr, constellation, spec.n_tx);
    std::vector<Accumulator> acc(cfg.methods.size());
    std::vector<EmLmmseState> em(static_cast<std::size_t>(spec.n_rx * spec.n_tx),
                                 EmLmmseState::fresh(spec.n_sc, cfg.em_window, cfg.em_prior));

    for (int s = 0; s < cfg.n_subframes; ++s) {
      // per-subframe seeds are independent of the SNR and the method list
      const Seed sub = derive_seed(cfg.seed, {static_cast<std::uint64_t>(s)});
      const ChannelRealization h = sample_channel(pdp, spec, derive_seed(sub, {1}));
      const TransmitGrid grid = generate_transmit_grid(spec, constellation, derive_seed(sub, {2}), derive_seed(sub, {3}));
      const auto y = apply_channel(grid, h, NoiseSpec{sigma2}, derive_seed(sub, {4}));
      const Seed net_seed = derive_seed(sub, {5});

      std::vector<Eigen::MatrixXcd> y_p(n_sc), y_d(n_sc);
      for (std::size_t c = 0; c < n_sc; ++c) {
        y_p[c] = y[c].leftCols(spec.n_pilot);
        y_d[c] = y[c].rightCols(spec.n_data());
      }

      for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
        auto& a = acc[k];
        if (a.failed) continue;
        try {
          const auto t0 = Clock::now();
          std::vector<Eigen::MatrixXcd> est;
          switch (cfg.methods[k]) {
            case Method::LS:
              est = ls_all(y_p, grid.pilots);
              break;
            case Method::GenieLMMSE:
            case Method::EmLMMSE: {
              est = ls_all(y_p, grid.pilots);
              const auto ls = est;
              for (int t = 0; t < spec.n_tx; ++t) {
                const double e_p = effective_pilot_energy(grid.pilots, t);
                for (int r = 0; r < spec.n_rx; ++r) {
                  const Eigen::VectorXcd h_ls = antenna_pair_response(ls, r, t);
                  if (cfg.methods[k] == Method::GenieLMMSE) {
                    put_antenna_pair(est, r, t, estimate_lmmse(h_ls, r_hh, sigma2, e_p));
                  } else {
                    auto& st = em[static_cast<std::size_t>(r * spec.n_tx + t)];
                    const Eigen::VectorXcd h_em = estimate_em_lmmse(st, h_ls, sigma2, e_p);
                    st = update_empirical_correlation(std::move(st), h_em);
                    put_antenna_pair(est, r, t, h_em);
                  }
                }
              }
              break;
            }
            case Method::StructNetCE:
              est.reserve(n_sc);
              for (std::size_t c = 0; c < n_sc; ++c) {
                est.push_back(estimate_channel_structnet(y_p[c], grid.pilots[c], constellation, cfg.train,
                                                         derive_seed(net_seed, {c})));
              }
              break;
            case Method::PerfectCSI:
              est = h.freq_response;
              break;
          }
          if (cfg.timing) a.wall_time_s += seconds_since(t0);

          a.mse_sum += compute_mse(h, est);
          for (std::size_t c = 0; c < n_sc; ++c) {
            const auto x_hat = equalize_lmmse(y_d[c], est[c], sigma2, constellation.avg_energy());
            const auto bits = demap_block(x_hat, constellation);
            const auto m = compute_ber(grid.data_bits[c], bits);
            a.bit_errors += m.bit_errors;
            a.bits_total += m.bits_total;
          }
          ++a.subframes;
        } catch (const std::exception&) {
          a.failed = true;
        }
      }
    }

    for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
      const auto& a = acc[k];
      ResultRow row;
      row.method = std::string(to_string(cfg.methods[k]));
      row.pilot_pattern = std::string(to_string(spec.pilot_pattern));
      row.snr_db = snr;
      row.subframes = a.subframes;
      row.wall_time_s = a.wall_time_s;
      row.seed = cfg.seed;
      if (a.failed || a.subframes == 0) {
        row.mse = std::numeric_limits<double>::quiet_NaN();
        row.ber = std::numeric_limits<double>::quiet_NaN();
      } else {
        row.mse = a.mse_sum / static_cast<double>(a.subframes);
        row.ber = a.bits_total > 0 ? static_cast<double>(a.bit_errors) / static_cast<double>(a.bits_total) : 0.0;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.method << ',' << r.pilot_pattern << ',' << format_g10(r.snr_db) << ',' << format_g10(r.mse) << ','
       << format_g10(r.ber) << ',' << r.subframes << ',' << format_g10(r.wall_time_s) << ',' << r.seed << '\n';
  }
}

void write_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

namespace {

double csv_double(std::string_view v, int line_no) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw IoError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return out;
}

template <typename T>
T csv_integer(std::string_view v, int line_no) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (v.empty() || res.ec != std::errc{} || res.ptr != end) {
    throw IoError("line " + std::to_string(line_no) + ": bad integer '" + std::string(v) + "'");
  }
  return out;
}

}  // namespace

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw IoError("missing or unexpected CSV header");
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw IoError("line " + std::to_string(line_no) + ": expected 8 fields");
    ResultRow r;
    r.method = std::string(f[0]);
    r.pilot_pattern = std::string(f[1]);
    r.snr_db = csv_double(f[2], line_no);
    r.mse = csv_double(f[3], line_no);
    r.ber = csv_double(f[4], line_no);
    r.subframes = csv_integer<std::int64_t>(f[5], line_no);
    r.wall_time_s = csv_double(f[6], line_no);
    r.seed = csv_integer<Seed>(f[7], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

// ---------------------------------------------------------------------------
// IIL benchmark

std::vector<BenchRow> bench_iil(const BenchConfig& cfg) {
  if (cfg.epochs < 0) throw InvalidArgument("epochs must be >= 0");
  if (cfg.pilots < 1) throw InvalidArgument("pilots must be >= 1");
  if (cfg.window < 0) throw InvalidArgument("window must be >= 0");
  const Constellation constellation(16);
  const auto points = constellation.points();

  std::vector<BenchRow> rows;
  for (int n : cfg.sizes) {
    if (n < 1) throw InvalidArgument("sizes must be >= 1");
    const int n_p = std::max(cfg.pilots, n);
    // one flat subcarrier with non-orthogonal pilots, shared by both IIL kinds
    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(n)}));
    std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
    Eigen::MatrixXcd h(n, n), x(n, n_p);
    for (Eigen::Index j = 0; j < h.size(); ++j) h.data()[j] = complex_gaussian(rng, 1.0);
    for (Eigen::Index j = 0; j < x.size(); ++j) x.data()[j] = points[pick(rng)];
    const double sigma2 = snr_to_noise_var(cfg.snr_db, constellation, n);
    Eigen::MatrixXcd y = h * x;
    for (Eigen::Index j = 0; j < y.size(); ++j) y.data()[j] += complex_gaussian(rng, sigma2);
    const Eigen::MatrixXcd h_ls = estimate_ls(y, x);

    std::vector<PilotObservation> obs;
    for (int p = 0; p < n_p; ++p) obs.push_back({x(0, p).real(), realify_signal(y.col(p))});
    const auto samples = make_training_samples(obs, constellation);

    for (IilKind kind : cfg.kinds) {
      BenchRow row{n, n, std::string(to_string(kind)), cfg.epochs, 0, 0.0, "ok"};
      TrainConfig tc;
      tc.epochs = cfg.epochs;
      tc.iil_kind = kind;
      tc.iil_window = cfg.window;
      tc.shifting_grid_cap = cfg.grid_cap;
      const StructNetModel initial =
          init_model(h_ls, 0, tc, derive_seed(cfg.seed, {static_cast<std::uint64_t>(n), 7}));
      try {
        const auto start = Clock::now();
        for (int rep = 0; rep < std::max(cfg.repeats, 1); ++rep) {
          StructNetModel model = initial;
          const auto t0 = Clock::now();
          StructNetTrainer trainer(model, samples, tc);
          const double setup = seconds_since(t0);
          const auto t1 = Clock::now();
          int done = 0;
          while (done < cfg.epochs) {
            trainer.run_epoch();
            ++done;
            if (done < cfg.epochs && seconds_since(t0) > cfg.budget_s) break;
          }
          const double train = seconds_since(t1);
          const double wall = done < cfg.epochs ? setup + train / done * cfg.epochs : setup + train;
          if (rep == 0 || wall < row.wall_time_s) row.wall_time_s = wall;
          row.epochs_timed = done;
          if (done < cfg.epochs) {
            row.status = "extrapolated";
            break;
          }
          if (seconds_since(start) > cfg.budget_s) break;
        }
      } catch (const ResourceLimit&) {
        row.status = "skipped";
        row.wall_time_s = std::numeric_limits<double>::quiet_NaN();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& os) {
  os << kBenchHeader << '\n';
  for (const auto& r : rows) {
    os << r.n_tx << ',' << r.n_rx << ',' << r.iil << ',' << r.epochs << ',' << r.epochs_timed << ','
       << format_g10(r.wall_time_s) << ',' << r.status << '\n';
  }
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_bench_csv(rows, out);
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace structce
