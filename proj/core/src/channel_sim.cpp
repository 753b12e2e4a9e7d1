#include "structce/channel_sim.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "structce/errors.hpp"

namespace structce {

void PowerDelayProfile::validate(int n_sc) const {
  if (delays.empty() || delays.size() != powers.size()) {
    throw InvalidArgument("power delay profile needs matching, nonempty delay and power lists");
  }
  for (std::size_t p = 0; p < delays.size(); ++p) {
    if (!(powers[p] > 0.0)) throw InvalidArgument("tap powers must be strictly positive");
    if (delays[p] < 0) throw InvalidArgument("tap delays must be non-negative");
    if (p > 0 && delays[p] <= delays[p - 1]) throw InvalidArgument("tap delays must be strictly increasing");
  }
  if (delays.back() >= n_sc) {
    throw InvalidArgument("max tap delay " + std::to_string(delays.back()) + " must be below n_sc=" +
                          std::to_string(n_sc));
  }
  const double total = std::accumulate(powers.begin(), powers.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("tap powers must sum to 1");
}

PowerDelayProfile exponential_pdp(int num_taps, double decay) {
  if (num_taps < 1) throw InvalidArgument("num_taps must be >= 1");
  if (!(decay > 0.0)) throw InvalidArgument("decay must be > 0");
  PowerDelayProfile pdp;
  double total = 0.0;
  for (int p = 0; p < num_taps; ++p) {
    pdp.delays.push_back(p);
    pdp.powers.push_back(std::exp(-p / decay));
    total += pdp.powers.back();
  }
  for (auto& w : pdp.powers) w /= total;
  return pdp;
}

std::vector<Eigen::MatrixXcd> frequency_response(const std::vector<Eigen::MatrixXcd>& taps,
                                                 const std::vector<int>& delays, int n_sc) {
  if (taps.size() != delays.size() || taps.empty()) throw InvalidArgument("tap/delay count mismatch");
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(static_cast<std::size_t>(n_sc));
  for (int c = 0; c < n_sc; ++c) {
    Eigen::MatrixXcd hc = Eigen::MatrixXcd::Zero(taps.front().rows(), taps.front().cols());
    for (std::size_t p = 0; p < taps.size(); ++p) {
      // reduce the phase index mod n_sc so large c*delay stays exact
      const long k = (static_cast<long>(delays[p]) * c) % n_sc;
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) / n_sc;
      hc += taps[p] * std::polar(1.0, phase);
    }
    out.push_back(std::move(hc));
  }
  return out;
}

ChannelRealization sample_channel(const PowerDelayProfile& pdp, const SubframeSpec& spec, Seed seed) {
  spec.validate();
  pdp.validate(spec.n_sc);
  Rng rng(seed);
  ChannelRealization h;
  h.delays = pdp.delays;
  for (double power : pdp.powers) {
    Eigen::MatrixXcd tap(spec.n_rx, spec.n_tx);
    for (Eigen::Index t = 0; t < tap.cols(); ++t) {
      for (Eigen::Index r = 0; r < tap.rows(); ++r) tap(r, t) = complex_gaussian(rng, power);
    }
    h.taps.push_back(std::move(tap));
  }
  h.freq_response = frequency_response(h.taps, h.delays, spec.n_sc);
  return h;
}

Eigen::MatrixXcd analytic_freq_correlation(const PowerDelayProfile& pdp, int n_sc) {
  pdp.validate(n_sc);
  Eigen::MatrixXcd r(n_sc, n_sc);
  for (int k = 0; k < n_sc; ++k) {
    for (int l = 0; l < n_sc; ++l) {
      cd acc{0.0, 0.0};
      for (std::size_t p = 0; p < pdp.delays.size(); ++p) {
        const long m = (static_cast<long>(pdp.delays[p]) * (k - l)) % n_sc;
        acc += pdp.powers[p] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(m) / n_sc);
      }
      r(k, l) = acc;
    }
  }
  return r;
}

std::vector<Eigen::MatrixXcd> apply_channel(const TransmitGrid& x, const ChannelRealization& h,
                                            NoiseSpec noise, Seed seed) {
  if (noise.variance < 0.0) throw InvalidArgument("noise variance must be >= 0");
  const auto n_sc = x.pilots.size();
  if (n_sc != h.freq_response.size() || x.data.size() != n_sc) {
    throw InvalidArgument("transmit grid and channel disagree on subcarrier count");
  }
  Rng rng(seed);
  const double scale = std::sqrt(noise.variance);
  std::vector<Eigen::MatrixXcd> y;
  y.reserve(n_sc);
  for (std::size_t c = 0; c < n_sc; ++c) {
    const auto& hc = h.freq_response[c];
    const auto& xp = x.pilots[c];
    const auto& xd = x.data[c];
    if (hc.cols() != xp.rows() || xp.rows() != xd.rows()) {
      throw InvalidArgument("channel columns must match transmit antennas");
    }
    Eigen::MatrixXcd xc(xp.rows(), xp.cols() + xd.cols());
    xc << xp, xd;
    Eigen::MatrixXcd yc = hc * xc;
    for (Eigen::Index s = 0; s < yc.cols(); ++s) {
      for (Eigen::Index r = 0; r < yc.rows(); ++r) yc(r, s) += scale * complex_gaussian(rng, 1.0);
    }
    y.push_back(std::move(yc));
  }
  return y;
}

}  // namespace structce
