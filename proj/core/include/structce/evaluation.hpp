#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "structce/channel_sim.hpp"
#include "structce/signal_model.hpp"

namespace structce {

struct MetricsRecord {
  double mse = 0.0;
  double ber = 0.0;
  std::int64_t bits_total = 0;
  std::int64_t bit_errors = 0;
  double wall_time_s = 0.0;
};

/// sigma^2 = n_tx * E_s / 10^(snr_db / 10): per-receive-antenna signal power
/// over noise power for a unit-power channel.
double snr_to_noise_var(double snr_db, const Constellation& c, int n_tx);

/// X_hat = (H^H H + sigma2 / E_s I)^-1 H^H Y. Throws NumericalFailure if the
/// system is singular.
Eigen::MatrixXcd equalize_lmmse(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& h_hat, double sigma2,
                                double symbol_energy);

/// sum_c ||H(c) - H_hat(c)||_F^2 / (n_tx n_rx n_c)
double compute_mse(std::span<const Eigen::MatrixXcd> h_true, std::span<const Eigen::MatrixXcd> h_est);
double compute_mse(const ChannelRealization& h_true, std::span<const Eigen::MatrixXcd> h_est);

/// Hamming distance; mse and wall_time_s are left zero.
MetricsRecord compute_ber(std::span<const Bit> bits_true, std::span<const Bit> bits_est);

/// Hard-decision bits of an n_tx x n_d symbol block, column-major like
/// TransmitGrid::data_bits.
std::vector<Bit> demap_block(const Eigen::MatrixXcd& x_hat, const Constellation& c);

}  // namespace structce
