#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace structce {

/// H_ls = Y_p X_p^H (X_p X_p^H)^-1. Throws NumericalFailure (with the Gram
/// condition number in the message) when X_p X_p^H is singular.
Eigen::MatrixXcd estimate_ls(const Eigen::MatrixXcd& y_p, const Eigen::MatrixXcd& x_p);

/// Frequency-domain LMMSE smoothing of one antenna pair:
/// R (R + sigma_eff^2 I)^-1 h_ls with sigma_eff^2 = sigma2 / pilot_energy.
Eigen::VectorXcd estimate_lmmse(const Eigen::VectorXcd& h_ls, const Eigen::MatrixXcd& r_hh, double sigma2,
                                double pilot_energy);

/// Pilot energy that makes sigma2 / energy the mean LS error variance of
/// the coefficients of transmit antenna `tx`, averaged over subcarriers:
/// 1 / mean_c [(X_p(c) X_p(c)^H)^-1]_{tx,tx}.
double effective_pilot_energy(std::span<const Eigen::MatrixXcd> pilots, int tx);

/// Running correlation estimate of one (rx, tx) antenna pair.
struct EmLmmseState {
  Eigen::MatrixXcd corr;
  int subframes_seen = 0;
  int window = 100;
  /// Number of subframes the identity initialization counts as. With 0 the
  /// first update replaces it outright.
  int prior_weight = 0;

  /// Identity-initialized state.
  static EmLmmseState fresh(int n_sc, int window = 100, int prior_weight = 0);
};

/// corr <- (1 - 1/w) corr + (1/w) h h^H with
/// w = min(subframes_seen + prior_weight + 1, window).
EmLmmseState update_empirical_correlation(EmLmmseState state, const Eigen::VectorXcd& h_hat);

/// LMMSE filter with the running correlation in place of the true one.
Eigen::VectorXcd estimate_em_lmmse(const EmLmmseState& state, const Eigen::VectorXcd& h_ls, double sigma2,
                                   double pilot_energy);

/// Collects h^{r,t} across subcarriers from per-subcarrier matrices.
Eigen::VectorXcd antenna_pair_response(std::span<const Eigen::MatrixXcd> per_subcarrier, int rx, int tx);

}  // namespace structce
