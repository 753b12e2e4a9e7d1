#pragma once

#include <vector>

#include <Eigen/Dense>

#include "structce/random.hpp"
#include "structce/signal_model.hpp"

namespace structce {

/// Integer-delay tap line with unit total power.
struct PowerDelayProfile {
  std::vector<int> delays;
  std::vector<double> powers;

  /// Throws InvalidArgument if powers are non-positive, do not sum to one,
  /// delays are not strictly increasing, or the last delay is >= n_sc.
  void validate(int n_sc) const;
};

/// delays 0..num_taps-1, powers proportional to exp(-p / decay).
PowerDelayProfile exponential_pdp(int num_taps, double decay);

/// One block-fading draw. taps[p] is the n_rx x n_tx gain matrix of tap p;
/// freq_response[c] = sum_p taps[p] * exp(-j 2 pi delays[p] c / n_sc).
struct ChannelRealization {
  std::vector<int> delays;
  std::vector<Eigen::MatrixXcd> taps;
  std::vector<Eigen::MatrixXcd> freq_response;
};

struct NoiseSpec {
  double variance = 0.0;  // per complex receive sample
};

/// DFT of a tap line onto n_sc subcarriers.
std::vector<Eigen::MatrixXcd> frequency_response(const std::vector<Eigen::MatrixXcd>& taps,
                                                 const std::vector<int>& delays, int n_sc);

/// Independent Rayleigh taps, tap p with variance powers[p].
ChannelRealization sample_channel(const PowerDelayProfile& pdp, const SubframeSpec& spec, Seed seed);

/// R[k, l] = sum_p powers[p] exp(-j 2 pi delays[p] (k - l) / n_sc).
Eigen::MatrixXcd analytic_freq_correlation(const PowerDelayProfile& pdp, int n_sc);

/// Y(c) = H(c) [X_p(c) X_d(c)] + N(c); result[c] is n_rx x n_sym.
///
/// Noise is drawn as unit-variance samples scaled by sqrt(variance), so
/// calls sharing a seed see the same noise shape at every noise level.
std::vector<Eigen::MatrixXcd> apply_channel(const TransmitGrid& x, const ChannelRealization& h,
                                            NoiseSpec noise, Seed seed);

}  // namespace structce
