#include <doctest.h>

#include <cmath>

#include "structce/channel_sim.hpp"
#include "structce/classical_estimators.hpp"
#include "structce/errors.hpp"
#include "structce/evaluation.hpp"
#include "structce/harness.hpp"
#include "common/helpers.hpp"

using namespace structce;

TEST_SUITE("evaluation") {

TEST_CASE("noise variance from SNR") {
  const Constellation c(16);
  CHECK(snr_to_noise_var(0.0, c, 2) == doctest::Approx(20.0));
  CHECK(snr_to_noise_var(10.0, c, 2) == doctest::Approx(2.0));
  CHECK(snr_to_noise_var(20.0, Constellation(4), 1) == doctest::Approx(0.02));
}

TEST_CASE("empirical receive SNR matches the target") {
  SubframeSpec spec;
  const Constellation c(16);
  const auto pdp = exponential_pdp(8, 3.0);
  const double snr_db = 10.0;
  const double sigma2 = snr_to_noise_var(snr_db, c, spec.n_tx);
  double signal = 0.0, noise = 0.0;
  int subcarriers = 0;
  for (std::uint64_t s = 0; subcarriers < 10000; ++s) {
    const auto grid = generate_transmit_grid(spec, c, derive_seed(1, {s, 1}), derive_seed(1, {s, 2}));
    const auto h = sample_channel(pdp, spec, derive_seed(1, {s, 3}));
    const auto y = apply_channel(grid, h, {sigma2}, derive_seed(1, {s, 4}));
    for (int k = 0; k < spec.n_sc; ++k) {
      const Eigen::MatrixXcd clean = h.freq_response[k] * grid.data[k];
      signal += clean.squaredNorm();
      noise += (y[k].rightCols(spec.n_data()) - clean).squaredNorm();
    }
    subcarriers += spec.n_sc;
  }
  CHECK(std::abs(10.0 * std::log10(signal / noise) - snr_db) <= 0.3);
}

TEST_CASE("equalizer examples") {
  Rng rng(1);
  const Eigen::MatrixXcd h = test::random_complex(2, 2, rng);
  const Eigen::MatrixXcd x = test::random_complex(2, 5, rng);
  CHECK((equalize_lmmse(h * x, h, 0.0, 10.0) - x).cwiseAbs().maxCoeff() <= 1e-10);

  const Eigen::MatrixXcd y = test::random_complex(2, 5, rng);
  const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(2, 2);
  CHECK((equalize_lmmse(y, eye, 10.0, 10.0) - y / 2.0).cwiseAbs().maxCoeff() <= 1e-14);

  Eigen::MatrixXcd rank1(2, 2);
  rank1 << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(equalize_lmmse(y, rank1, 0.0, 10.0), NumericalFailure);
  CHECK_NOTHROW(equalize_lmmse(y, rank1, 1.0, 10.0));
  CHECK_THROWS_AS(equalize_lmmse(Eigen::MatrixXcd::Zero(3, 5), eye, 1.0, 10.0), InvalidArgument);
}

TEST_CASE("equalizer error shrinks with the noise variance") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXcd h = test::random_complex(2, 2, rng) + Eigen::MatrixXcd::Identity(2, 2);
    const Eigen::MatrixXcd x = test::random_complex(2, 8, rng);
    double prev = INFINITY;
    for (double s2 : {1e-2, 1e-4, 1e-6}) {
      const double err = (equalize_lmmse(h * x, h, s2, 10.0) - x).norm();
      CHECK(err < prev);
      prev = err;
    }
  }
}

TEST_CASE("MSE examples") {
  std::vector<Eigen::MatrixXcd> a{Eigen::MatrixXcd::Ones(1, 1)};
  std::vector<Eigen::MatrixXcd> b{Eigen::MatrixXcd::Constant(1, 1, cd{1.0, 1.0})};
  CHECK(compute_mse(a, a) == 0.0);
  CHECK(compute_mse(a, b) == doctest::Approx(1.0));

  std::vector<Eigen::MatrixXcd> h(2, Eigen::MatrixXcd::Zero(2, 2)), e(2, Eigen::MatrixXcd::Zero(2, 2));
  h[0] << 1.0, 2.0, cd(0, 1), 0.0;
  h[1] << 0.0, 1.0, 1.0, cd(3, 0);
  e[0] << 0.0, 2.0, 0.0, 1.0;
  e[1] << 0.0, cd(1, 1), 1.0, 1.0;
  // |1|^2 + |j|^2 + |1|^2 + |j|^2 + |2|^2 = 8 over 2*2*2
  CHECK(compute_mse(h, e) == doctest::Approx(1.0));

  std::vector<Eigen::MatrixXcd> short_e(1, Eigen::MatrixXcd::Zero(2, 2));
  CHECK_THROWS_AS(compute_mse(h, short_e), InvalidArgument);
  std::vector<Eigen::MatrixXcd> wrong(2, Eigen::MatrixXcd::Zero(2, 3));
  CHECK_THROWS_AS(compute_mse(h, wrong), InvalidArgument);

  ChannelRealization r;
  r.freq_response = h;
  CHECK(compute_mse(r, e) == doctest::Approx(1.0));
}

TEST_CASE("BER examples and additivity") {
  const std::vector<Bit> a{0, 1, 1, 0, 1, 0, 0, 0};
  std::vector<Bit> flipped = a;
  for (auto& b : flipped) b ^= 1;
  CHECK(compute_ber(a, a).ber == 0.0);
  const auto all = compute_ber(a, flipped);
  CHECK(all.ber == 1.0);
  CHECK(all.bit_errors == 8);
  CHECK(all.bits_total == 8);
  const std::vector<Bit> shorter(a.begin(), a.end() - 1);
  CHECK_THROWS_AS(compute_ber(a, shorter), InvalidArgument);

  Rng rng(3);
  std::bernoulli_distribution coin(0.5), err(0.1);
  std::vector<Bit> t1(1000), e1(1000), t2(300), e2(300);
  for (std::size_t k = 0; k < t1.size(); ++k) {
    t1[k] = coin(rng);
    e1[k] = t1[k] ^ static_cast<Bit>(err(rng));
  }
  for (std::size_t k = 0; k < t2.size(); ++k) {
    t2[k] = coin(rng);
    e2[k] = t2[k] ^ static_cast<Bit>(err(rng) || err(rng));
  }
  std::vector<Bit> t = t1, e = e1;
  t.insert(t.end(), t2.begin(), t2.end());
  e.insert(e.end(), e2.begin(), e2.end());
  const auto r1 = compute_ber(t1, e1), r2 = compute_ber(t2, e2), r = compute_ber(t, e);
  CHECK(r.ber == doctest::Approx((r1.ber * 1000 + r2.ber * 300) / 1300).epsilon(1e-14));
  CHECK(r.bit_errors == r1.bit_errors + r2.bit_errors);
}

TEST_CASE("demapping matches the transmit bit order") {
  SubframeSpec spec;
  spec.n_sc = 4;
  for (int order : {4, 16, 64}) {
    const Constellation c(order);
    const auto grid = generate_transmit_grid(spec, c, 4, 5);
    for (int k = 0; k < spec.n_sc; ++k) {
      CHECK(demap_block(grid.data[k], c) == grid.data_bits[k]);
      const Eigen::MatrixXcd nudged = grid.data[k] * 1.1 + Eigen::MatrixXcd::Constant(2, spec.n_data(), cd{0.2, -0.3});
      CHECK(demap_block(nudged, c) == grid.data_bits[k]);
    }
  }
}

TEST_CASE("LS MSE matches sigma^2 / E_p") {
  SubframeSpec spec;
  spec.pilot_pattern = PilotPattern::Orthogonal;
  const Constellation c(16);
  const auto pdp = exponential_pdp(8, 3.0);
  const double sigma2 = snr_to_noise_var(10.0, c, spec.n_tx);
  double err = 0.0, predicted = 0.0;
  std::int64_t count = 0;
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto grid = generate_transmit_grid(spec, c, derive_seed(2, {s, 1}), derive_seed(2, {s, 2}));
    const auto h = sample_channel(pdp, spec, derive_seed(2, {s, 3}));
    const auto y = apply_channel(grid, h, {sigma2}, derive_seed(2, {s, 4}));
    for (int k = 0; k < spec.n_sc; ++k) {
      const Eigen::MatrixXcd est = estimate_ls(y[k].leftCols(spec.n_pilot), grid.pilots[k]);
      err += (est - h.freq_response[k]).squaredNorm();
      for (int t = 0; t < spec.n_tx; ++t) predicted += spec.n_rx * sigma2 / std::norm(grid.pilots[k](t, t));
      count += spec.n_rx * spec.n_tx;
    }
  }
  CHECK(err / predicted == doctest::Approx(1.0).epsilon(0.05));
  CHECK(count == 60 * 64 * 4);
}

TEST_CASE("perfect CSI BER never exceeds LS BER") {
  ExperimentConfig cfg;
  cfg.spec.n_sc = 32;
  cfg.n_subframes = 20;
  cfg.snr_db = {0.0, 10.0, 20.0};
  cfg.methods = {Method::LS, Method::PerfectCSI};
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 6);
  for (std::size_t k = 0; k < rows.size(); k += 2) {
    CHECK(rows[k].method == "LS");
    CHECK(rows[k + 1].method == "PerfectCSI");
    CHECK(rows[k + 1].ber <= rows[k].ber);
    CHECK(rows[k + 1].mse == 0.0);
  }
}

}  // TEST_SUITE
