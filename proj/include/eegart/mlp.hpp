#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eegart/matrix.hpp"

namespace eegart {

inline constexpr std::size_t kHidden1 = 128;
inline constexpr std::size_t kHidden2 = 64;
inline constexpr double kDefaultDropout = 0.6;

/// weights is out x in, row-major.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;
};

/// input -> 128 -> ReLU -> dropout -> 64 -> ReLU -> C -> softmax.
struct Mlp {
  std::array<DenseLayer, 3> layers;
  double dropout_p = kDefaultDropout;
  int n_classes = 3;

  std::size_t input_dim() const { return layers[0].in; }
  /// W1, b1, W2, b2, W3, b3.
  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;
};

/// Weights uniform in +-sqrt(6 / fan_in) from the Init substream; zero biases.
Mlp init_mlp(std::size_t input_dim, int n_classes, std::uint64_t seed,
             double dropout_p = kDefaultDropout);

/// Eval disables dropout. Train draws an inverted-dropout mask on the 128-unit
/// activation that is a pure function of (seed, step, row in batch, unit).
struct ForwardMode {
  bool train = false;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;

  static ForwardMode eval() { return {}; }
  static ForwardMode training(std::uint64_t seed, std::uint64_t step) { return {true, seed, step}; }
};

/// Inverted-dropout multiplier (0 or 1 / (1 - p)) for one unit.
double dropout_scale(const ForwardMode& mode, double p, std::size_t row, std::size_t unit);

/// Class probabilities for one input (row 0 of the dropout mask in Train mode).
std::vector<double> forward(const Mlp& mlp, std::span<const double> x,
                            const ForwardMode& mode = ForwardMode::eval());

/// Post-dropout 128-unit activation; exposed for checking the dropout policy.
std::vector<double> hidden1_activation(const Mlp& mlp, std::span<const double> x,
                                       const ForwardMode& mode, std::size_t row = 0);

struct Gradients {
  /// Same order and shapes as Mlp::parameters().
  std::array<std::vector<double>, 6> tensors;
};

struct LossAndGrad {
  double loss = 0.0;
  Gradients grads;
};

/// Mean cross-entropy over the batch and its exact gradient. Throws
/// DimMismatch for wrong input width and BadLabel for labels outside [0, C).
LossAndGrad loss_and_grad(const Mlp& mlp, const Matrix& inputs, std::span<const int> labels,
                          const ForwardMode& mode = ForwardMode::eval());

/// Mean cross-entropy only, Eval mode.
double mean_loss(const Mlp& mlp, const Matrix& inputs, std::span<const int> labels);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

/// Bias-corrected Adam step on one tensor at timestep `t` (1-based).
void adam_step_tensor(std::span<double> param, std::span<const double> grad,
                      std::span<double> m, std::span<double> v, double lr, std::uint64_t t,
                      const AdamState& hyper);

/// Increments the timestep once, then updates every tensor. Moments are
/// created on first use; throws ShapeMismatch if shapes change or disagree.
void adam_update(AdamState& state, std::span<const std::span<double>> params,
                 std::span<const std::span<const double>> grads, double lr);

}  // namespace eegart
