#include "structce/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "structce/errors.hpp"

namespace structce {

namespace {

constexpr double kConditioningFloor = 0.05;
constexpr int kMaxPilotRedraws = 100;

}  // namespace

Constellation::Constellation(int order) : order_(order) {
  switch (order) {
    case 4: levels_per_axis_ = 2; bits_per_axis_ = 1; break;
    case 16: levels_per_axis_ = 4; bits_per_axis_ = 2; break;
    case 64: levels_per_axis_ = 8; bits_per_axis_ = 3; break;
    default:
      throw InvalidArgument("unsupported QAM order " + std::to_string(order) + " (expected 4, 16 or 64)");
  }
  for (int q = 0; q < levels_per_axis_; ++q) levels_.push_back(2.0 * q - (levels_per_axis_ - 1));

  word_to_index_.resize(static_cast<std::size_t>(levels_per_axis_));
  for (std::size_t q = 0; q < levels_.size(); ++q) word_to_index_[gray_word(q)] = q;

  double energy = 0.0;
  for (double re : levels_) {
    for (double im : levels_) {
      points_.emplace_back(re, im);
      energy += re * re + im * im;
    }
  }
  avg_energy_ = energy / static_cast<double>(points_.size());
}

unsigned Constellation::gray_word(std::size_t level_index) const {
  if (level_index >= levels_.size()) throw InvalidArgument("PAM level index out of range");
  const auto q = static_cast<unsigned>(level_index);
  return q ^ (q >> 1U);
}

std::size_t Constellation::index_of_word(unsigned word) const {
  if (word >= word_to_index_.size()) throw InvalidArgument("Gray word out of range");
  return word_to_index_[word];
}

std::size_t Constellation::level_index(double level) const {
  for (std::size_t q = 0; q < levels_.size(); ++q) {
    if (levels_[q] == level) return q;
  }
  throw InvalidArgument("value " + std::to_string(level) + " is not a PAM level of " +
                        std::to_string(order_) + "-QAM");
}

bool Constellation::is_level(double level) const noexcept {
  return std::find(levels_.begin(), levels_.end(), level) != levels_.end();
}

bool Constellation::is_point(cd symbol) const noexcept {
  return is_level(symbol.real()) && is_level(symbol.imag());
}

std::size_t Constellation::nearest_level_index(double x) const noexcept {
  // position on the index grid; ceil(pos - 0.5) rounds halves down
  const double pos = (x + (levels_per_axis_ - 1)) / 2.0;
  const double q = std::ceil(pos - 0.5);
  if (!(q > 0.0)) return 0;  // also catches NaN
  const auto top = static_cast<double>(levels_per_axis_ - 1);
  return static_cast<std::size_t>(std::min(q, top));
}

Constellation build_constellation(int order) { return Constellation(order); }

std::vector<cd> modulate_bits(std::span<const Bit> bits, const Constellation& c) {
  const auto bps = static_cast<std::size_t>(c.bits_per_symbol());
  const auto bpa = static_cast<std::size_t>(c.bits_per_axis());
  if (bits.size() % bps != 0) {
    throw InvalidArgument("bit count " + std::to_string(bits.size()) + " is not a multiple of " +
                          std::to_string(bps));
  }
  std::vector<cd> out;
  out.reserve(bits.size() / bps);
  for (std::size_t s = 0; s < bits.size(); s += bps) {
    unsigned re_word = 0;
    unsigned im_word = 0;
    for (std::size_t b = 0; b < bpa; ++b) {
      re_word = (re_word << 1U) | (bits[s + b] & 1U);
      im_word = (im_word << 1U) | (bits[s + bpa + b] & 1U);
    }
    out.emplace_back(c.pam_levels()[c.index_of_word(re_word)], c.pam_levels()[c.index_of_word(im_word)]);
  }
  return out;
}

void demodulate_hard_into(cd symbol, const Constellation& c, std::vector<Bit>& out) {
  const int bpa = c.bits_per_axis();
  const unsigned re_word = c.gray_word(c.nearest_level_index(symbol.real()));
  const unsigned im_word = c.gray_word(c.nearest_level_index(symbol.imag()));
  for (int b = bpa - 1; b >= 0; --b) out.push_back(static_cast<Bit>((re_word >> b) & 1U));
  for (int b = bpa - 1; b >= 0; --b) out.push_back(static_cast<Bit>((im_word >> b) & 1U));
}

std::vector<Bit> demodulate_hard(cd symbol, const Constellation& c) {
  std::vector<Bit> out;
  out.reserve(static_cast<std::size_t>(c.bits_per_symbol()));
  demodulate_hard_into(symbol, c, out);
  return out;
}

std::string_view to_string(PilotPattern p) noexcept {
  return p == PilotPattern::Orthogonal ? "orthogonal" : "nonorthogonal";
}

PilotPattern parse_pilot_pattern(std::string_view s) {
  if (s == "orthogonal") return PilotPattern::Orthogonal;
  if (s == "nonorthogonal" || s == "non-orthogonal") return PilotPattern::NonOrthogonal;
  throw InvalidArgument("unknown pilot pattern '" + std::string(s) + "'");
}

void SubframeSpec::validate() const {
  if (n_tx < 1 || n_rx < 1) throw InvalidArgument("antenna counts must be >= 1");
  if (n_sc < 1) throw InvalidArgument("n_sc must be >= 1");
  if (n_pilot < 1) throw InvalidArgument("n_pilot must be >= 1");
  if (n_sym < n_pilot) throw InvalidArgument("n_sym must be >= n_pilot");
  if (cp_len < 0) throw InvalidArgument("cp_len must be >= 0");
  if (pilot_pattern == PilotPattern::Orthogonal && n_pilot < n_tx) {
    throw InvalidArgument("orthogonal pilots need n_pilot >= n_tx");
  }
}

RealizedStream::RealizedStream(std::size_t index, int n_tx) : index_(index), n_tx_(n_tx) {
  if (n_tx < 1) throw InvalidArgument("n_tx must be >= 1");
  if (index >= 2 * static_cast<std::size_t>(n_tx)) {
    throw InvalidArgument("realized stream index " + std::to_string(index) + " out of range for n_tx=" +
                          std::to_string(n_tx));
  }
}

Eigen::VectorXd realify_signal(const Eigen::VectorXcd& y) {
  const auto n = y.size();
  Eigen::VectorXd out(2 * n);
  out.head(n) = y.real();
  out.tail(n) = y.imag();
  return out;
}

Eigen::VectorXd realify_channel_column(const Eigen::VectorXcd& h, std::size_t stream, int n_tx) {
  const RealizedStream s(stream, n_tx);
  const auto n = h.size();
  Eigen::VectorXd out(2 * n);
  if (!s.is_imaginary()) {
    out.head(n) = h.real();
    out.tail(n) = h.imag();
  } else {
    out.head(n) = -h.imag();
    out.tail(n) = h.real();
  }
  return out;
}

Eigen::MatrixXcd complexify_channel(std::span<const Eigen::VectorXd> desired) {
  if (desired.empty() || desired.size() % 2 != 0) {
    throw InvalidArgument("complexify_channel needs 2*n_tx stream vectors");
  }
  const auto n_tx = static_cast<Eigen::Index>(desired.size() / 2);
  const auto dim = desired.front().size();
  if (dim % 2 != 0) throw InvalidArgument("stream vectors must have even length 2*n_rx");
  for (const auto& v : desired) {
    if (v.size() != dim) throw InvalidArgument("stream vectors differ in length");
  }
  const auto n_rx = dim / 2;
  Eigen::MatrixXcd h(n_rx, n_tx);
  for (Eigen::Index t = 0; t < n_tx; ++t) {
    const auto& direct = desired[static_cast<std::size_t>(t)];
    const auto& rotated = desired[static_cast<std::size_t>(t + n_tx)];
    for (Eigen::Index r = 0; r < n_rx; ++r) {
      // rotated = [-Im h; Re h]
      const double re = (direct(r) + rotated(n_rx + r)) / 2.0;
      const double im = (direct(n_rx + r) - rotated(r)) / 2.0;
      h(r, t) = cd(re, im);
    }
  }
  return h;
}

namespace {

cd random_point(Rng& rng, const Constellation& c) {
  std::uniform_int_distribution<std::size_t> pick(0, c.points().size() - 1);
  return c.points()[pick(rng)];
}

bool well_conditioned(const Eigen::MatrixXcd& x) {
  const Eigen::MatrixXcd gram = x * x.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return ev.minCoeff() >= kConditioningFloor * ev.maxCoeff();
}

}  // namespace

std::vector<Eigen::MatrixXcd> generate_pilot_grid(const SubframeSpec& spec, const Constellation& c,
                                                  Seed seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<Eigen::MatrixXcd> grid;
  grid.reserve(static_cast<std::size_t>(spec.n_sc));
  for (int sc = 0; sc < spec.n_sc; ++sc) {
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(spec.n_tx, spec.n_pilot);
    if (spec.pilot_pattern == PilotPattern::Orthogonal) {
      for (int t = 0; t < spec.n_tx; ++t) x(t, t) = random_point(rng, c);
    } else {
      int attempt = 0;
      for (;; ++attempt) {
        if (attempt == kMaxPilotRedraws) {
          throw GenerationFailure("no well-conditioned non-orthogonal pilot block after " +
                                  std::to_string(kMaxPilotRedraws) + " redraws (n_tx=" +
                                  std::to_string(spec.n_tx) + ", n_pilot=" + std::to_string(spec.n_pilot) +
                                  ")");
        }
        for (int p = 0; p < spec.n_pilot; ++p) {
          for (int t = 0; t < spec.n_tx; ++t) x(t, p) = random_point(rng, c);
        }
        if (well_conditioned(x)) break;
      }
    }
    grid.push_back(std::move(x));
  }
  return grid;
}

TransmitGrid generate_transmit_grid(const SubframeSpec& spec, const Constellation& c, Seed pilot_seed,
                                    Seed data_seed) {
  TransmitGrid grid;
  grid.pilots = generate_pilot_grid(spec, c, pilot_seed);

  Rng rng(data_seed);
  std::bernoulli_distribution coin(0.5);
  const auto n_bits = static_cast<std::size_t>(spec.n_tx) * static_cast<std::size_t>(spec.n_data()) *
                      static_cast<std::size_t>(c.bits_per_symbol());
  grid.data.reserve(static_cast<std::size_t>(spec.n_sc));
  grid.data_bits.reserve(static_cast<std::size_t>(spec.n_sc));
  for (int sc = 0; sc < spec.n_sc; ++sc) {
    std::vector<Bit> bits(n_bits);
    for (auto& b : bits) b = coin(rng) ? 1 : 0;
    const auto symbols = modulate_bits(bits, c);
    Eigen::MatrixXcd x(spec.n_tx, spec.n_data());
    std::size_t k = 0;
    for (int d = 0; d < spec.n_data(); ++d) {
      for (int t = 0; t < spec.n_tx; ++t) x(t, d) = symbols[k++];
    }
    grid.data.push_back(std::move(x));
    grid.data_bits.push_back(std::move(bits));
  }
  return grid;
}

}  // namespace structce
