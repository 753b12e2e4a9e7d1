#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "structce/random.hpp"

namespace structce {

using cd = std::complex<double>;
using Bit = std::uint8_t;

/// Square QAM alphabet built as the product of two identical PAM axes.
///
/// Points are unnormalized: adjacent PAM levels are exactly 2 apart, so a
/// 16-QAM axis is {-3, -1, +1, +3}. Each axis carries log2(sqrt(order)) bits
/// through a binary-reflected Gray code over the ascending level index.
class Constellation {
 public:
  /// Throws InvalidArgument unless order is 4, 16 or 64.
  explicit Constellation(int order);

  int order() const noexcept { return order_; }
  int bits_per_symbol() const noexcept { return 2 * bits_per_axis_; }
  int bits_per_axis() const noexcept { return bits_per_axis_; }
  std::span<const double> pam_levels() const noexcept { return levels_; }
  std::span<const cd> points() const noexcept { return points_; }
  double spacing() const noexcept { return 2.0; }
  double avg_energy() const noexcept { return avg_energy_; }

  /// Gray word of the level at ascending index `level_index`, MSB first.
  unsigned gray_word(std::size_t level_index) const;
  /// Inverse of gray_word.
  std::size_t index_of_word(unsigned word) const;
  /// Index of a PAM level; throws InvalidArgument if `level` is not one.
  std::size_t level_index(double level) const;
  bool is_level(double level) const noexcept;
  bool is_point(cd symbol) const noexcept;

  /// Nearest level index on one axis; ties go to the smaller level.
  std::size_t nearest_level_index(double x) const noexcept;

 private:
  int order_;
  int levels_per_axis_;
  int bits_per_axis_;
  std::vector<double> levels_;
  std::vector<cd> points_;
  std::vector<std::size_t> word_to_index_;
  double avg_energy_;
};

Constellation build_constellation(int order);

/// Gray-maps bits to symbols: the first half of each symbol's bits selects
/// the real level, the second half the imaginary level.
std::vector<cd> modulate_bits(std::span<const Bit> bits, const Constellation& c);

/// Hard decision to the nearest point; returns that point's bits.
std::vector<Bit> demodulate_hard(cd symbol, const Constellation& c);
void demodulate_hard_into(cd symbol, const Constellation& c, std::vector<Bit>& out);

enum class PilotPattern { Orthogonal, NonOrthogonal };

std::string_view to_string(PilotPattern p) noexcept;
PilotPattern parse_pilot_pattern(std::string_view s);

/// Layout of one block-fading subframe: the first n_pilot OFDM symbols carry
/// pilots, the remaining n_sym - n_pilot carry data.
struct SubframeSpec {
  int n_tx = 2;
  int n_rx = 2;
  int n_sc = 64;
  int n_sym = 14;
  int n_pilot = 2;
  int cp_len = 16;  // metadata only; no time-domain processing happens here
  PilotPattern pilot_pattern = PilotPattern::NonOrthogonal;

  int n_data() const noexcept { return n_sym - n_pilot; }
  /// Throws InvalidArgument when the layout is inconsistent.
  void validate() const;
};

/// Frequency-domain transmit symbols. pilots[c] is n_tx x n_pilot and
/// data[c] is n_tx x n_data. data_bits[c] holds the bits of data[c] in
/// column-major symbol order (all antennas of data symbol 0 first).
struct TransmitGrid {
  std::vector<Eigen::MatrixXcd> pilots;
  std::vector<Eigen::MatrixXcd> data;
  std::vector<std::vector<Bit>> data_bits;
};

/// Index into the 2*n_tx realified streams. Indices below n_tx select the
/// real PAM axis of antenna `index`, the rest the imaginary axis of antenna
/// `index - n_tx`.
class RealizedStream {
 public:
  RealizedStream(std::size_t index, int n_tx);

  std::size_t index() const noexcept { return index_; }
  int n_tx() const noexcept { return n_tx_; }
  int antenna() const noexcept { return static_cast<int>(index_ % static_cast<std::size_t>(n_tx_)); }
  bool is_imaginary() const noexcept { return index_ >= static_cast<std::size_t>(n_tx_); }

 private:
  std::size_t index_;
  int n_tx_;
};

/// [Re(y); Im(y)]
Eigen::VectorXd realify_signal(const Eigen::VectorXcd& y);

/// Realified column for stream i: [Re(h); Im(h)] on the real branch and
/// [-Im(h); Re(h)] (the realification of j*h) on the imaginary branch.
Eigen::VectorXd realify_channel_column(const Eigen::VectorXcd& h, std::size_t stream, int n_tx);

/// Inverse of realify_channel_column over all 2*n_tx streams. Column t is
/// the average of the direct reconstruction from stream t and the
/// de-rotated reconstruction from stream t + n_tx.
Eigen::MatrixXcd complexify_channel(std::span<const Eigen::VectorXd> desired);

/// Random pilot symbols for every subcarrier. Orthogonal grids place a
/// symbol on antenna t only in pilot slot t. Non-orthogonal grids are
/// redrawn per subcarrier until the pilot Gram matrix is well conditioned.
std::vector<Eigen::MatrixXcd> generate_pilot_grid(const SubframeSpec& spec, const Constellation& c,
                                                  Seed seed);

/// Pilots from `pilot_seed` plus uniformly random data bits from `data_seed`.
TransmitGrid generate_transmit_grid(const SubframeSpec& spec, const Constellation& c, Seed pilot_seed,
                                    Seed data_seed);

}  // namespace structce
