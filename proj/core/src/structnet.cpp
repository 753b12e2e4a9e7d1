#include "structce/structnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "structce/classical_estimators.hpp"
#include "structce/errors.hpp"

namespace structce {

void TrainConfig::validate() const {
  if (epochs < 0) throw InvalidArgument("epochs must be >= 0");
  if (!(lr_classifier >= 0.0) || !(lr_channel >= 0.0)) throw InvalidArgument("learning rates must be >= 0");
  if (iil_window < 0) throw InvalidArgument("iil_window must be >= 0");
  if (!(epsilon_mod >= 0.0)) throw InvalidArgument("epsilon_mod must be >= 0");
  if (hidden1 < 1 || hidden2 < 1) throw InvalidArgument("hidden layer sizes must be >= 1");
  if (!(init_std >= 0.0)) throw InvalidArgument("init_std must be >= 0");
}

Mlp Mlp::gaussian(Eigen::Index input, Eigen::Index hidden1, Eigen::Index hidden2, double std, Seed seed) {
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, std);
  auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = std > 0.0 ? n(rng) : 0.0;
    }
    return m;
  };
  Mlp mlp;
  mlp.w1 = draw(hidden1, input);
  mlp.b1 = Eigen::VectorXd::Zero(hidden1);
  mlp.w2 = draw(hidden2, hidden1);
  mlp.b2 = Eigen::VectorXd::Zero(hidden2);
  mlp.w3 = draw(2, hidden2);
  mlp.b3 = Eigen::VectorXd::Zero(2);
  return mlp;
}

Mlp Mlp::zeros_like(const Mlp& shape) {
  return Mlp{Eigen::MatrixXd::Zero(shape.w1.rows(), shape.w1.cols()), Eigen::VectorXd::Zero(shape.b1.size()),
             Eigen::MatrixXd::Zero(shape.w2.rows(), shape.w2.cols()), Eigen::VectorXd::Zero(shape.b2.size()),
             Eigen::MatrixXd::Zero(shape.w3.rows(), shape.w3.cols()), Eigen::VectorXd::Zero(shape.b3.size())};
}

std::size_t Mlp::parameter_count() const noexcept {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size());
}

std::size_t StructNetModel::shifting_span() const noexcept {
  // one shift index per interfering antenna: n_tx - 1 of the realified list
  const auto span = static_cast<std::size_t>(n_tx() - 1);
  return std::min(span, interference.size());
}

namespace {

template <typename F>
void for_each_parameter_block(const StructNetModel& m, F&& f) {
  f(m.desired.data(), m.desired.size());
  for (const auto& v : m.interference) f(v.data(), v.size());
  f(m.mlp.w1.data(), m.mlp.w1.size());
  f(m.mlp.b1.data(), m.mlp.b1.size());
  f(m.mlp.w2.data(), m.mlp.w2.size());
  f(m.mlp.b2.data(), m.mlp.b2.size());
  f(m.mlp.w3.data(), m.mlp.w3.size());
  f(m.mlp.b3.data(), m.mlp.b3.size());
}

}  // namespace

std::vector<double> StructNetModel::to_record() const {
  std::vector<double> out;
  for_each_parameter_block(*this, [&](const double* p, Eigen::Index n) { out.insert(out.end(), p, p + n); });
  return out;
}

void StructNetModel::load_record(std::span<const double> record) {
  std::size_t total = 0;
  for_each_parameter_block(*this, [&](const double*, Eigen::Index n) { total += static_cast<std::size_t>(n); });
  if (record.size() != total) throw InvalidArgument("record length does not match model shape");
  std::size_t at = 0;
  // the blocks are owned by *this; const_cast only strips the visitor's view
  for_each_parameter_block(*this, [&](const double* p, Eigen::Index n) {
    std::copy_n(record.begin() + static_cast<std::ptrdiff_t>(at), n, const_cast<double*>(p));
    at += static_cast<std::size_t>(n);
  });
}

// ---------------------------------------------------------------------------
// batched kernels

namespace {

std::size_t grid_size(std::size_t k, int window, std::size_t cap) {
  const auto base = static_cast<std::size_t>(2 * window + 1);
  std::size_t g = 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (g > cap / base) {
      throw ResourceLimit("shifting IIL grid (" + std::to_string(base) + ")^" + std::to_string(k) +
                          " exceeds cap " + std::to_string(cap));
    }
    g *= base;
  }
  if (g > cap) {
    throw ResourceLimit("shifting IIL grid of " + std::to_string(g) + " terms exceeds cap " + std::to_string(cap));
  }
  return g;
}

/// out = sum_g tanh(zin + off_g). With `grads`, also
/// a = sum_g (1 - t^2) and b[k] = sum_g m_k (1 - t^2).
void shifting_kernel(const Eigen::MatrixXd& zin, std::span<const Eigen::VectorXd> vecs, int window,
                     std::size_t cap, Eigen::MatrixXd& out, Eigen::MatrixXd* a, std::vector<Eigen::MatrixXd>* b) {
  const auto k_count = vecs.size();
  grid_size(k_count, window, cap);
  const Eigen::Index dim = zin.rows();
  for (const auto& v : vecs) {
    if (v.size() != dim) throw InvalidArgument("interference vector length mismatch");
  }

  out.setZero(zin.rows(), zin.cols());
  const bool grads = a != nullptr;
  if (grads) {
    a->setZero(zin.rows(), zin.cols());
    b->assign(k_count, Eigen::MatrixXd::Zero(zin.rows(), zin.cols()));
  }

  std::vector<int> digit(k_count, -window);
  // prefix[k] = sum_{l < k} 2 m_l h_l
  std::vector<Eigen::VectorXd> prefix(k_count + 1, Eigen::VectorXd::Zero(dim));
  auto refresh = [&](std::size_t from) {
    for (std::size_t l = from; l < k_count; ++l) prefix[l + 1] = prefix[l] + (2.0 * digit[l]) * vecs[l];
  };
  refresh(0);

  Eigen::ArrayXXd t(zin.rows(), zin.cols());
  Eigen::ArrayXXd u(grads ? zin.rows() : 0, grads ? zin.cols() : 0);

  for (;;) {
    t = (zin.colwise() + prefix[k_count]).array().tanh();
    out.array() += t;
    if (grads) {
      u = 1.0 - t.square();
      a->array() += u;
      for (std::size_t k = 0; k < k_count; ++k) {
        if (digit[k] != 0) (*b)[k].array() += static_cast<double>(digit[k]) * u;
      }
    }

    // odometer, last digit fastest
    if (k_count == 0) return;
    std::size_t k = k_count;
    while (k > 0) {
      --k;
      if (digit[k] < window) {
        ++digit[k];
        refresh(k);
        break;
      }
      digit[k] = -window;
      if (k == 0) return;
    }
  }
}

/// Sequential modulo, in place. alpha[k] receives the quotients of vector k.
void modulo_kernel(Eigen::MatrixXd& z, std::span<const Eigen::VectorXd> vecs, double eps, ModuloQuotient mode,
                   std::vector<Eigen::MatrixXd>* alpha) {
  const Eigen::Index dim = z.rows();
  if (alpha != nullptr) alpha->assign(vecs.size(), Eigen::MatrixXd::Zero(z.rows(), z.cols()));
  for (std::size_t k = 0; k < vecs.size(); ++k) {
    const auto& h = vecs[k];
    if (h.size() != dim) throw InvalidArgument("interference vector length mismatch");
    if (mode == ModuloQuotient::Elementwise) {
      for (Eigen::Index s = 0; s < z.cols(); ++s) {
        for (Eigen::Index d = 0; d < dim; ++d) {
          const double hd = h(d);
          if (std::abs(hd) < eps) continue;
          const double q = std::floor(z(d, s) / (2.0 * hd));
          z(d, s) -= 2.0 * hd * q;
          if (alpha != nullptr) (*alpha)[k](d, s) = q;
        }
      }
    } else {
      const double hh = h.squaredNorm();
      if (std::sqrt(hh) < eps) continue;
      for (Eigen::Index s = 0; s < z.cols(); ++s) {
        const double q = std::floor(h.dot(z.col(s)) / (2.0 * hh));
        z.col(s) -= (2.0 * q) * h;
        if (alpha != nullptr) (*alpha)[k].col(s).setConstant(q);
      }
    }
  }
}

struct Batch {
  Eigen::MatrixXd y;          // dim x S
  Eigen::RowVectorXd shift;   // 1 x S
  std::vector<int> positive;  // 1 for label +1
};

Batch make_batch(std::span<const TrainingSample> samples, Eigen::Index dim) {
  Batch b;
  const auto s_count = static_cast<Eigen::Index>(samples.size());
  b.y.resize(dim, s_count);
  b.shift.resize(s_count);
  b.positive.resize(samples.size());
  for (Eigen::Index s = 0; s < s_count; ++s) {
    const auto& smp = samples[static_cast<std::size_t>(s)];
    if (smp.y_raw.size() != dim) throw InvalidArgument("sample length does not match the channel layer");
    if (smp.label != 1 && smp.label != -1) throw InvalidArgument("labels must be +1 or -1");
    b.y.col(s) = smp.y_raw;
    b.shift(s) = smp.shift;
    b.positive[static_cast<std::size_t>(s)] = smp.label > 0 ? 1 : 0;
  }
  return b;
}

struct IilCache {
  Eigen::MatrixXd z;                   // IIL output
  std::vector<Eigen::MatrixXd> alpha;  // modulo quotients
  Eigen::MatrixXd dz_dzin;             // shifting: elementwise derivative
  std::vector<Eigen::MatrixXd> dz_dm;  // shifting: sum_g m_k (1 - t^2)
};

void iil_batch(const StructNetModel& m, const Batch& b, bool grads, IilCache& cache) {
  Eigen::MatrixXd zin = b.y;
  zin.noalias() += m.desired * b.shift;
  if (m.iil_kind == IilKind::Modulo) {
    cache.z = std::move(zin);
    modulo_kernel(cache.z, m.interference, m.epsilon_mod, m.modulo_quotient, grads ? &cache.alpha : nullptr);
  } else {
    const std::span<const Eigen::VectorXd> vecs(m.interference.data(), m.shifting_span());
    shifting_kernel(zin, vecs, m.iil_window, m.shifting_grid_cap, cache.z, grads ? &cache.dz_dzin : nullptr,
                    grads ? &cache.dz_dm : nullptr);
  }
}

struct MlpCache {
  Eigen::MatrixXd h1;
  Eigen::MatrixXd h2;
  Eigen::MatrixXd logp;  // 2 x S, row 0 = class -1, row 1 = class +1
};

void mlp_forward(const Mlp& mlp, const Eigen::MatrixXd& z, MlpCache& c) {
  c.h1.noalias() = mlp.w1 * z;
  c.h1.colwise() += mlp.b1;
  c.h1 = c.h1.array().tanh();
  c.h2.noalias() = mlp.w2 * c.h1;
  c.h2.colwise() += mlp.b2;
  c.h2 = c.h2.array().tanh();
  c.logp.noalias() = mlp.w3 * c.h2;
  c.logp.colwise() += mlp.b3;
  for (Eigen::Index s = 0; s < c.logp.cols(); ++s) {
    const double s0 = c.logp(0, s);
    const double s1 = c.logp(1, s);
    const double mx = std::max(s0, s1);
    const double lse = mx + std::log(std::exp(s0 - mx) + std::exp(s1 - mx));
    c.logp(0, s) = s0 - lse;
    c.logp(1, s) = s1 - lse;
  }
}

double batch_loss(const MlpCache& c, const Batch& b) {
  double acc = 0.0;
  for (Eigen::Index s = 0; s < c.logp.cols(); ++s) acc -= c.logp(b.positive[static_cast<std::size_t>(s)], s);
  return acc / static_cast<double>(c.logp.cols());
}

/// Backpropagates the mean cross-entropy. Fills parameter gradients and/or
/// the gradient with respect to the classifier input.
void mlp_backward(const Mlp& mlp, const Eigen::MatrixXd& z, const MlpCache& c, const Batch& b, Mlp* grads,
                  Eigen::MatrixXd* gz) {
  const auto s_count = c.logp.cols();
  Eigen::MatrixXd g3 = c.logp.array().exp();
  for (Eigen::Index s = 0; s < s_count; ++s) g3(b.positive[static_cast<std::size_t>(s)], s) -= 1.0;
  g3 /= static_cast<double>(s_count);

  Eigen::MatrixXd g2 = mlp.w3.transpose() * g3;
  g2.array() *= 1.0 - c.h2.array().square();
  Eigen::MatrixXd g1 = mlp.w2.transpose() * g2;
  g1.array() *= 1.0 - c.h1.array().square();

  if (grads != nullptr) {
    grads->w3.noalias() = g3 * c.h2.transpose();
    grads->b3 = g3.rowwise().sum();
    grads->w2.noalias() = g2 * c.h1.transpose();
    grads->b2 = g2.rowwise().sum();
    grads->w1.noalias() = g1 * z.transpose();
    grads->b1 = g1.rowwise().sum();
  }
  if (gz != nullptr) gz->noalias() = mlp.w1.transpose() * g1;
}

void channel_gradients(const StructNetModel& m, const Batch& b, const IilCache& cache, const Eigen::MatrixXd& gz,
                       Eigen::VectorXd& d_desired, std::vector<Eigen::VectorXd>& d_interference) {
  d_interference.assign(m.interference.size(), Eigen::VectorXd::Zero(m.desired.size()));
  if (m.iil_kind == IilKind::Modulo) {
    d_desired.noalias() = gz * b.shift.transpose();
    for (std::size_t k = 0; k < m.interference.size(); ++k) {
      d_interference[k] = -2.0 * (cache.alpha[k].array() * gz.array()).rowwise().sum().matrix();
    }
  } else {
    const Eigen::MatrixXd g0 = cache.dz_dzin.cwiseProduct(gz);
    d_desired.noalias() = g0 * b.shift.transpose();
    for (std::size_t k = 0; k < cache.dz_dm.size(); ++k) {
      d_interference[k] = 2.0 * (cache.dz_dm[k].array() * gz.array()).rowwise().sum().matrix();
    }
  }
}

void check_model(const StructNetModel& m) {
  for (const auto& v : m.interference) {
    if (v.size() != m.desired.size()) throw InvalidArgument("interference vector length mismatch");
  }
  if (m.mlp.w1.cols() != m.desired.size()) throw InvalidArgument("classifier input size must equal 2*n_rx");
}

}  // namespace

// ---------------------------------------------------------------------------
// single-sample API

StructNetModel init_model(const Eigen::MatrixXcd& h_ls, std::size_t stream, const TrainConfig& cfg, Seed seed) {
  cfg.validate();
  const int n_tx = static_cast<int>(h_ls.cols());
  const RealizedStream target(stream, n_tx);

  StructNetModel m;
  m.desired = realify_channel_column(h_ls.col(target.antenna()), stream, n_tx);
  for (std::size_t j = 0; j < 2 * static_cast<std::size_t>(n_tx); ++j) {
    if (j == stream) continue;
    const RealizedStream other(j, n_tx);
    m.interference.push_back(realify_channel_column(h_ls.col(other.antenna()), j, n_tx));
  }
  if (cfg.iil_order == IilOrder::DescendingStrength) {
    std::stable_sort(m.interference.begin(), m.interference.end(),
                     [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                       return a.squaredNorm() > b.squaredNorm();
                     });
  }
  m.mlp = Mlp::gaussian(m.desired.size(), cfg.hidden1, cfg.hidden2, cfg.init_std, seed);
  m.iil_kind = cfg.iil_kind;
  m.iil_window = cfg.iil_window;
  m.epsilon_mod = cfg.epsilon_mod;
  m.modulo_quotient = cfg.modulo_quotient;
  m.shifting_grid_cap = cfg.shifting_grid_cap;
  return m;
}

Eigen::VectorXd channel_layer_forward(const StructNetModel& model, const Eigen::VectorXd& y_raw, double shift) {
  if (y_raw.size() != model.desired.size()) throw InvalidArgument("input length does not match the channel layer");
  return y_raw + shift * model.desired;
}

Eigen::VectorXd iil_shifting_forward(const Eigen::VectorXd& z, std::span<const Eigen::VectorXd> interference,
                                     int window, std::size_t grid_cap) {
  if (window < 0) throw InvalidArgument("window must be >= 0");
  Eigen::MatrixXd out;
  shifting_kernel(z, interference, window, grid_cap, out, nullptr, nullptr);
  return out.col(0);
}

ModuloOutput iil_modulo_forward(const Eigen::VectorXd& z, std::span<const Eigen::VectorXd> interference, double eps,
                                ModuloQuotient quotient) {
  Eigen::MatrixXd work = z;
  std::vector<Eigen::MatrixXd> alpha;
  modulo_kernel(work, interference, eps, quotient, &alpha);
  ModuloOutput out;
  out.out = work.col(0);
  for (const auto& a : alpha) out.quotients.emplace_back(a.col(0));
  return out;
}

Eigen::VectorXd iil_forward(const StructNetModel& model, const Eigen::VectorXd& z) {
  if (model.iil_kind == IilKind::Modulo) {
    Eigen::MatrixXd work = z;
    modulo_kernel(work, model.interference, model.epsilon_mod, model.modulo_quotient, nullptr);
    return work.col(0);
  }
  return iil_shifting_forward(z, std::span<const Eigen::VectorXd>(model.interference.data(), model.shifting_span()),
                              model.iil_window, model.shifting_grid_cap);
}

ProbabilityPair classifier_forward(const Mlp& mlp, const Eigen::VectorXd& z) {
  if (z.size() != mlp.w1.cols()) throw InvalidArgument("classifier input has the wrong length");
  MlpCache c;
  mlp_forward(mlp, z, c);
  return {std::exp(c.logp(0, 0)), std::exp(c.logp(1, 0))};
}

ProbabilityPair predict(const StructNetModel& model, const Eigen::VectorXd& y_raw, double shift) {
  return classifier_forward(model.mlp, iil_forward(model, channel_layer_forward(model, y_raw, shift)));
}

std::vector<TrainingSample> make_training_samples(std::span<const PilotObservation> pilots, const Constellation& c) {
  std::vector<TrainingSample> out;
  out.reserve(2 * pilots.size());
  for (const auto& p : pilots) {
    if (!c.is_level(p.level)) {
      throw InvalidArgument("pilot value " + std::to_string(p.level) + " is not a PAM level");
    }
    out.push_back({+1, p.y, -p.level + 1.0});
    out.push_back({-1, p.y, -p.level - 1.0});
  }
  return out;
}

double loss(const StructNetModel& model, std::span<const TrainingSample> samples) {
  check_model(model);
  if (samples.empty()) throw InvalidArgument("no training samples");
  const Batch b = make_batch(samples, model.desired.size());
  IilCache iil;
  iil_batch(model, b, false, iil);
  MlpCache mc;
  mlp_forward(model.mlp, iil.z, mc);
  return batch_loss(mc, b);
}

Gradients loss_and_gradients(const StructNetModel& model, std::span<const TrainingSample> samples) {
  check_model(model);
  if (samples.empty()) throw InvalidArgument("no training samples");
  const Batch b = make_batch(samples, model.desired.size());
  IilCache iil;
  iil_batch(model, b, true, iil);
  MlpCache mc;
  mlp_forward(model.mlp, iil.z, mc);

  Gradients g;
  g.loss = batch_loss(mc, b);
  g.mlp = Mlp::zeros_like(model.mlp);
  Eigen::MatrixXd gz;
  mlp_backward(model.mlp, iil.z, mc, b, &g.mlp, &gz);
  channel_gradients(model, b, iil, gz, g.desired, g.interference);
  return g;
}

// ---------------------------------------------------------------------------
// training

struct StructNetTrainer::State {
  Batch batch;
  IilCache iil;
  MlpCache mlp;
  Mlp mlp_grads;
  Eigen::MatrixXd gz;
  Eigen::VectorXd d_desired;
  std::vector<Eigen::VectorXd> d_interference;
  double loss = 0.0;
};

StructNetTrainer::StructNetTrainer(StructNetModel& model, std::vector<TrainingSample> samples, const TrainConfig& cfg)
    : model_(model), cfg_(cfg), state_(std::make_unique<State>()) {
  cfg_.validate();
  check_model(model_);
  if (samples.empty()) throw InvalidArgument("no training samples");
  state_->batch = make_batch(samples, model_.desired.size());
  state_->mlp_grads = Mlp::zeros_like(model_.mlp);
  iil_batch(model_, state_->batch, true, state_->iil);
  mlp_forward(model_.mlp, state_->iil.z, state_->mlp);
  state_->loss = batch_loss(state_->mlp, state_->batch);
}

StructNetTrainer::~StructNetTrainer() = default;

double StructNetTrainer::current_loss() const noexcept { return state_->loss; }

double StructNetTrainer::run_epoch() {
  auto& st = *state_;
  auto& m = model_;

  // classifier step on the cached forward state; channel weights frozen
  if (cfg_.lr_classifier > 0.0) {
    mlp_backward(m.mlp, st.iil.z, st.mlp, st.batch, &st.mlp_grads, nullptr);
    m.mlp.w1 -= cfg_.lr_classifier * st.mlp_grads.w1;
    m.mlp.b1 -= cfg_.lr_classifier * st.mlp_grads.b1;
    m.mlp.w2 -= cfg_.lr_classifier * st.mlp_grads.w2;
    m.mlp.b2 -= cfg_.lr_classifier * st.mlp_grads.b2;
    m.mlp.w3 -= cfg_.lr_classifier * st.mlp_grads.w3;
    m.mlp.b3 -= cfg_.lr_classifier * st.mlp_grads.b3;
    mlp_forward(m.mlp, st.iil.z, st.mlp);
  }

  // channel step through the IIL; classifier frozen, quotients constant
  if (cfg_.lr_channel > 0.0) {
    mlp_backward(m.mlp, st.iil.z, st.mlp, st.batch, nullptr, &st.gz);
    channel_gradients(m, st.batch, st.iil, st.gz, st.d_desired, st.d_interference);
    m.desired -= cfg_.lr_channel * st.d_desired;
    if (cfg_.update_interference) {
      for (std::size_t k = 0; k < m.interference.size(); ++k) m.interference[k] -= cfg_.lr_channel * st.d_interference[k];
    }
    iil_batch(m, st.batch, true, st.iil);
    mlp_forward(m.mlp, st.iil.z, st.mlp);
  }

  st.loss = batch_loss(st.mlp, st.batch);
  if (!std::isfinite(st.loss)) {
    throw TrainingDivergence("non-finite training loss (desired norm " + std::to_string(m.desired.norm()) +
                             ", w1 norm " + std::to_string(m.mlp.w1.norm()) + ")");
  }
  return st.loss;
}

double train_epoch(StructNetModel& model, std::span<const TrainingSample> samples, const TrainConfig& cfg) {
  StructNetTrainer trainer(model, std::vector<TrainingSample>(samples.begin(), samples.end()), cfg);
  return trainer.run_epoch();
}

Eigen::MatrixXcd estimate_channel_structnet(const Eigen::MatrixXcd& y_p, const Eigen::MatrixXcd& x_p,
                                            const Constellation& c, const TrainConfig& cfg, Seed seed) {
  cfg.validate();
  const Eigen::MatrixXcd h_ls = estimate_ls(y_p, x_p);
  const int n_tx = static_cast<int>(x_p.rows());

  std::vector<Eigen::VectorXd> desired;
  desired.reserve(2 * static_cast<std::size_t>(n_tx));
  for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_tx); ++i) {
    const RealizedStream stream(i, n_tx);
    StructNetModel model = init_model(h_ls, i, cfg, derive_seed(seed, {i}));
    if (cfg.epochs > 0) {
      std::vector<PilotObservation> obs;
      for (Eigen::Index p = 0; p < x_p.cols(); ++p) {
        const cd x = x_p(stream.antenna(), p);
        if (x == cd{0.0, 0.0}) continue;
        obs.push_back({stream.is_imaginary() ? x.imag() : x.real(), realify_signal(y_p.col(p))});
      }
      if (!obs.empty()) {
        StructNetTrainer trainer(model, make_training_samples(obs, c), cfg);
        for (int e = 0; e < cfg.epochs; ++e) trainer.run_epoch();
      }
    }
    desired.push_back(std::move(model.desired));
  }
  return complexify_channel(desired);
}

std::array<double, 4> detect_multinomial(const BinaryPosterior& classify, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& desired) {
  if (y.size() != desired.size()) throw InvalidArgument("received vector and channel differ in length");
  auto log_ratio = [&](const Eigen::VectorXd& v) {
    const ProbabilityPair p = classify(v);
    if (!(p.negative > 0.0) || !(p.positive > 0.0)) {
      throw DegenerateRatio("binary posterior has a zero probability (" + std::to_string(p.negative) + ", " +
                            std::to_string(p.positive) + ")");
    }
    return std::log(p.negative) - std::log(p.positive);
  };
  const double r_m3_m1 = log_ratio(y + 2.0 * desired);  // P(-3)/P(-1)
  const double r_m1_p1 = log_ratio(y);                  // P(-1)/P(+1)
  const double r_p1_p3 = log_ratio(y - 2.0 * desired);  // P(+1)/P(+3)

  // log P relative to P(+3)
  std::array<double, 4> lp{};
  lp[3] = 0.0;
  lp[2] = r_p1_p3;
  lp[1] = lp[2] + r_m1_p1;
  lp[0] = lp[1] + r_m3_m1;
  const double mx = *std::max_element(lp.begin(), lp.end());
  double total = 0.0;
  for (auto& v : lp) {
    v = std::exp(v - mx);
    total += v;
  }
  for (auto& v : lp) v /= total;
  return lp;
}

std::array<double, 4> detect_multinomial(const StructNetModel& model, const Eigen::VectorXd& y) {
  return detect_multinomial(
      [&](const Eigen::VectorXd& v) { return classifier_forward(model.mlp, iil_forward(model, v)); }, y,
      model.desired);
}

}  // namespace structce
