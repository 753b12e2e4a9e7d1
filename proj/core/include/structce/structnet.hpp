#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "structce/random.hpp"
#include "structce/signal_model.hpp"

namespace structce {

// Online channel learner for one (subcarrier, realified stream) pair.
//
//   y_raw --(+ shift * desired)--> channel layer
//         --> interference-invariant layer (IIL), periodic in 2*h_j for the
//             interference columns h_j
//         --> tanh MLP binary classifier --> P(x = -1), P(x = +1)
//
// The desired weights start from the LS estimate and are refined by the
// classification loss of shifted pilot observations; after training they
// are read out as the channel estimate.

enum class IilKind { Shifting, Modulo };
enum class IilOrder { DescendingStrength, Given };
/// How the modulo IIL computes its integer quotient. Elementwise uses
/// floor(z_k / 2h_k) per coordinate; Projection uses the scalar
/// floor(h.z / 2h.h) along the interference direction.
enum class ModuloQuotient { Elementwise, Projection };

struct TrainConfig {
  int epochs = 200;
  double lr_classifier = 0.01;
  double lr_channel = 0.001;
  IilKind iil_kind = IilKind::Modulo;
  int iil_window = 3;  // shifting IIL sums m over [-iil_window, iil_window]
  IilOrder iil_order = IilOrder::DescendingStrength;
  bool update_interference = true;
  double epsilon_mod = 1e-6;
  ModuloQuotient modulo_quotient = ModuloQuotient::Elementwise;
  int hidden1 = 16;
  int hidden2 = 32;
  double init_std = 0.1;
  std::size_t shifting_grid_cap = 10'000'000;

  void validate() const;
};

/// Two tanh hidden layers and a two-score output layer.
struct Mlp {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
  Eigen::MatrixXd w3;
  Eigen::VectorXd b3;

  /// Weights i.i.d. N(0, std^2), biases zero.
  static Mlp gaussian(Eigen::Index input, Eigen::Index hidden1, Eigen::Index hidden2, double std, Seed seed);
  static Mlp zeros_like(const Mlp& shape);
  std::size_t parameter_count() const noexcept;
};

struct StructNetModel {
  Eigen::VectorXd desired;                    // channel layer, length 2*n_rx
  std::vector<Eigen::VectorXd> interference;  // IIL weights, 2*n_tx - 1 vectors in IIL order
  Mlp mlp;
  IilKind iil_kind = IilKind::Modulo;
  int iil_window = 3;
  double epsilon_mod = 1e-6;
  ModuloQuotient modulo_quotient = ModuloQuotient::Elementwise;
  std::size_t shifting_grid_cap = 10'000'000;

  int n_tx() const noexcept { return static_cast<int>((interference.size() + 1) / 2); }
  /// Number of leading interference vectors the shifting IIL sums over.
  std::size_t shifting_span() const noexcept;

  /// All trainable parameters in a fixed order: desired, interference,
  /// then w1, b1, w2, b2, w3, b3 (column-major).
  std::vector<double> to_record() const;
  /// Inverse of to_record for a model of the same shape.
  void load_record(std::span<const double> record);
};

struct ProbabilityPair {
  double negative = 0.5;  // P(x = -1)
  double positive = 0.5;  // P(x = +1)
};

struct TrainingSample {
  int label = 1;  // +1 or -1
  Eigen::VectorXd y_raw;
  double shift = 0.0;
};

/// A transmitted pilot PAM level and the realified received vector.
struct PilotObservation {
  double level = 0.0;
  Eigen::VectorXd y;
};

/// LS-initialized model for realified stream `stream`. The interference list
/// holds the realified columns of every other stream, strongest first under
/// IilOrder::DescendingStrength.
StructNetModel init_model(const Eigen::MatrixXcd& h_ls, std::size_t stream, const TrainConfig& cfg, Seed seed);

/// y_raw + shift * desired
Eigen::VectorXd channel_layer_forward(const StructNetModel& model, const Eigen::VectorXd& y_raw, double shift);

/// sum over (m_1..m_K) in [-window, window]^K of tanh(z + sum_k 2 m_k h_k).
/// Throws ResourceLimit if (2*window + 1)^K exceeds grid_cap.
Eigen::VectorXd iil_shifting_forward(const Eigen::VectorXd& z, std::span<const Eigen::VectorXd> interference,
                                     int window, std::size_t grid_cap = 10'000'000);

struct ModuloOutput {
  Eigen::VectorXd out;
  std::vector<Eigen::VectorXd> quotients;  // one per interference vector, in order
};

/// Sequential z <- z - 2 h_j * alpha_j over the interference list.
ModuloOutput iil_modulo_forward(const Eigen::VectorXd& z, std::span<const Eigen::VectorXd> interference,
                                double eps, ModuloQuotient quotient = ModuloQuotient::Elementwise);

/// The model's IIL applied to an already shifted input.
Eigen::VectorXd iil_forward(const StructNetModel& model, const Eigen::VectorXd& z);

ProbabilityPair classifier_forward(const Mlp& mlp, const Eigen::VectorXd& z);

/// Full forward pass: channel layer, IIL, classifier.
ProbabilityPair predict(const StructNetModel& model, const Eigen::VectorXd& y_raw, double shift);

/// Two samples per pilot: (+1, y, 1 - x) and (-1, y, -1 - x). The shift is
/// stored, not applied, so training can move the desired weights.
std::vector<TrainingSample> make_training_samples(std::span<const PilotObservation> pilots,
                                                  const Constellation& c);

struct Gradients {
  double loss = 0.0;
  Eigen::VectorXd desired;
  std::vector<Eigen::VectorXd> interference;
  Mlp mlp;
};

/// Mean cross-entropy of the samples.
double loss(const StructNetModel& model, std::span<const TrainingSample> samples);

/// Loss and its gradient with respect to every trainable parameter. Modulo
/// quotients are held constant.
Gradients loss_and_gradients(const StructNetModel& model, std::span<const TrainingSample> samples);

/// Alternating full-batch gradient descent over a fixed sample set. Keeps
/// the forward state of the last update so each epoch evaluates the IIL once.
class StructNetTrainer {
 public:
  StructNetTrainer(StructNetModel& model, std::vector<TrainingSample> samples, const TrainConfig& cfg);
  ~StructNetTrainer();
  StructNetTrainer(const StructNetTrainer&) = delete;
  StructNetTrainer& operator=(const StructNetTrainer&) = delete;

  /// One classifier step (channel frozen) then one channel step (classifier
  /// frozen). Returns the loss after both updates; throws
  /// TrainingDivergence if it is not finite.
  double run_epoch();
  double current_loss() const noexcept;

 private:
  struct State;
  StructNetModel& model_;
  TrainConfig cfg_;
  std::unique_ptr<State> state_;
};

/// One epoch of StructNetTrainer on a fresh trainer.
double train_epoch(StructNetModel& model, std::span<const TrainingSample> samples, const TrainConfig& cfg);

/// Channel estimate of one subcarrier from its pilot block.
///
/// Each of the 2*n_tx realified streams gets its own LS-initialized model,
/// trained on the pilots where that stream's antenna transmits. The
/// trained desired weights are folded back into an n_rx x n_tx matrix.
Eigen::MatrixXcd estimate_channel_structnet(const Eigen::MatrixXcd& y_p, const Eigen::MatrixXcd& x_p,
                                            const Constellation& c, const TrainConfig& cfg, Seed seed);

using BinaryPosterior = std::function<ProbabilityPair(const Eigen::VectorXd&)>;

/// 4-PAM posteriors (for levels -3, -1, +1, +3) from a binary posterior
/// evaluated at y + 2h, y and y - 2h. Throws DegenerateRatio if any
/// evaluated probability is zero.
std::array<double, 4> detect_multinomial(const BinaryPosterior& classify, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& desired);
std::array<double, 4> detect_multinomial(const StructNetModel& model, const Eigen::VectorXd& y);

}  // namespace structce
