#include "structce/classical_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "structce/errors.hpp"

namespace structce {

namespace {

constexpr double kSingularGram = 1e-12;
constexpr double kHermitianTol = 1e-9;

void require_hermitian(const Eigen::MatrixXcd& r) {
  if (r.rows() != r.cols()) throw InvalidArgument("correlation matrix must be square");
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  if ((r - r.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale) {
    throw InvalidArgument("correlation matrix is not Hermitian");
  }
}

Eigen::VectorXcd lmmse_filter(const Eigen::MatrixXcd& r_hh, const Eigen::VectorXcd& h_ls, double sigma2,
                              double pilot_energy) {
  require_hermitian(r_hh);
  if (h_ls.size() != r_hh.rows()) throw InvalidArgument("LS vector length must match correlation size");
  if (sigma2 < 0.0) throw InvalidArgument("sigma2 must be >= 0");
  if (!(pilot_energy > 0.0)) throw InvalidArgument("pilot energy must be > 0");
  if (sigma2 == 0.0) return h_ls;

  const double sigma_eff2 = sigma2 / pilot_energy;
  Eigen::MatrixXcd a = r_hh;
  a.diagonal().array() += sigma_eff2;
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalFailure("R + sigma^2 I is not positive definite");
  return r_hh * llt.solve(h_ls);
}

}  // namespace

Eigen::MatrixXcd estimate_ls(const Eigen::MatrixXcd& y_p, const Eigen::MatrixXcd& x_p) {
  if (y_p.cols() != x_p.cols()) throw InvalidArgument("pilot blocks disagree on pilot count");
  const Eigen::MatrixXcd gram = x_p * x_p.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= kSingularGram * hi) {
    std::ostringstream msg;
    msg << "pilot Gram matrix is singular (condition number " << (lo > 0.0 ? hi / lo : INFINITY) << ")";
    throw NumericalFailure(msg.str());
  }
  // H^T = (X X^H)^-T (Y X^H)^T, solved on the Hermitian Gram matrix
  const Eigen::MatrixXcd rhs = (y_p * x_p.adjoint()).adjoint();
  return gram.llt().solve(rhs).adjoint();
}

Eigen::VectorXcd estimate_lmmse(const Eigen::VectorXcd& h_ls, const Eigen::MatrixXcd& r_hh, double sigma2,
                                double pilot_energy) {
  return lmmse_filter(r_hh, h_ls, sigma2, pilot_energy);
}

double effective_pilot_energy(std::span<const Eigen::MatrixXcd> pilots, int tx) {
  if (pilots.empty()) throw InvalidArgument("no pilot blocks");
  double mean_inv = 0.0;
  for (const auto& x : pilots) {
    if (tx < 0 || tx >= x.rows()) throw InvalidArgument("transmit antenna index out of range");
    const Eigen::MatrixXcd gram = x * x.adjoint();
    const Eigen::MatrixXcd inv = gram.llt().solve(Eigen::MatrixXcd::Identity(gram.rows(), gram.cols()));
    mean_inv += inv(tx, tx).real();
  }
  mean_inv /= static_cast<double>(pilots.size());
  return 1.0 / mean_inv;
}

EmLmmseState EmLmmseState::fresh(int n_sc, int window, int prior_weight) {
  if (n_sc < 1) throw InvalidArgument("n_sc must be >= 1");
  if (window < 1) throw InvalidArgument("window must be >= 1");
  if (prior_weight < 0) throw InvalidArgument("prior_weight must be >= 0");
  return EmLmmseState{Eigen::MatrixXcd::Identity(n_sc, n_sc), 0, window, prior_weight};
}

EmLmmseState update_empirical_correlation(EmLmmseState state, const Eigen::VectorXcd& h_hat) {
  if (h_hat.size() != state.corr.rows()) throw InvalidArgument("estimate length must match correlation size");
  const double w = std::min(state.subframes_seen + state.prior_weight + 1, state.window);
  state.corr *= (1.0 - 1.0 / w);
  state.corr.noalias() += (1.0 / w) * (h_hat * h_hat.adjoint());
  ++state.subframes_seen;
  return state;
}

Eigen::VectorXcd estimate_em_lmmse(const EmLmmseState& state, const Eigen::VectorXcd& h_ls, double sigma2,
                                   double pilot_energy) {
  return lmmse_filter(state.corr, h_ls, sigma2, pilot_energy);
}

Eigen::VectorXcd antenna_pair_response(std::span<const Eigen::MatrixXcd> per_subcarrier, int rx, int tx) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(per_subcarrier.size()));
  for (std::size_t c = 0; c < per_subcarrier.size(); ++c) v(static_cast<Eigen::Index>(c)) = per_subcarrier[c](rx, tx);
  return v;
}

}  // namespace structce
