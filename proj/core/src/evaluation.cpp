#include "structce/evaluation.hpp"

#include <cmath>
#include <string>

#include "structce/errors.hpp"

namespace structce {

double snr_to_noise_var(double snr_db, const Constellation& c, int n_tx) {
  if (n_tx < 1) throw InvalidArgument("n_tx must be >= 1");
  return n_tx * c.avg_energy() / std::pow(10.0, snr_db / 10.0);
}

Eigen::MatrixXcd equalize_lmmse(const Eigen::MatrixXcd& y, const Eigen::MatrixXcd& h_hat, double sigma2,
                                double symbol_energy) {
  if (y.rows() != h_hat.rows()) throw InvalidArgument("y and h_hat disagree on receive antennas");
  if (sigma2 < 0.0) throw InvalidArgument("sigma2 must be >= 0");
  if (!(symbol_energy > 0.0)) throw InvalidArgument("symbol energy must be > 0");
  Eigen::MatrixXcd a = h_hat.adjoint() * h_hat;
  a.diagonal().array() += sigma2 / symbol_energy;
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  const double scale = a.diagonal().real().maxCoeff();
  const Eigen::VectorXd pivots = Eigen::MatrixXcd(llt.matrixL()).diagonal().real().cwiseAbs2();
  if (llt.info() != Eigen::Success || !(scale > 0.0) || pivots.minCoeff() <= 1e-12 * scale) {
    throw NumericalFailure("equalizer system is singular");
  }
  Eigen::MatrixXcd x = llt.solve(h_hat.adjoint() * y);
  if (!x.allFinite()) throw NumericalFailure("equalizer produced non-finite symbols");
  return x;
}

double compute_mse(std::span<const Eigen::MatrixXcd> h_true, std::span<const Eigen::MatrixXcd> h_est) {
  if (h_true.size() != h_est.size() || h_true.empty()) {
    throw InvalidArgument("channel lists differ in subcarrier count");
  }
  double acc = 0.0;
  for (std::size_t c = 0; c < h_true.size(); ++c) {
    if (h_true[c].rows() != h_est[c].rows() || h_true[c].cols() != h_est[c].cols()) {
      throw InvalidArgument("channel shape mismatch at subcarrier " + std::to_string(c));
    }
    acc += (h_true[c] - h_est[c]).squaredNorm();
  }
  const auto& h0 = h_true.front();
  return acc / static_cast<double>(h0.rows() * h0.cols() * static_cast<Eigen::Index>(h_true.size()));
}

double compute_mse(const ChannelRealization& h_true, std::span<const Eigen::MatrixXcd> h_est) {
  return compute_mse(std::span<const Eigen::MatrixXcd>(h_true.freq_response), h_est);
}

MetricsRecord compute_ber(std::span<const Bit> bits_true, std::span<const Bit> bits_est) {
  if (bits_true.size() != bits_est.size()) throw InvalidArgument("bit streams differ in length");
  MetricsRecord m;
  m.bits_total = static_cast<std::int64_t>(bits_true.size());
  for (std::size_t i = 0; i < bits_true.size(); ++i) m.bit_errors += (bits_true[i] != bits_est[i]) ? 1 : 0;
  m.ber = m.bits_total > 0 ? static_cast<double>(m.bit_errors) / static_cast<double>(m.bits_total) : 0.0;
  return m;
}

std::vector<Bit> demap_block(const Eigen::MatrixXcd& x_hat, const Constellation& c) {
  std::vector<Bit> out;
  out.reserve(static_cast<std::size_t>(x_hat.size() * c.bits_per_symbol()));
  for (Eigen::Index d = 0; d < x_hat.cols(); ++d) {
    for (Eigen::Index t = 0; t < x_hat.rows(); ++t) demodulate_hard_into(x_hat(t, d), c, out);
  }
  return out;
}

}  // namespace structce
