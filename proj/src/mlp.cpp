#include "eegart/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eegart/error.hpp"
#include "eegart/rng.hpp"

namespace eegart {

std::vector<std::span<double>> Mlp::parameters() {
  std::vector<std::span<double>> p;
  for (auto& layer : layers) {
    p.emplace_back(layer.weights);
    p.emplace_back(layer.bias);
  }
  return p;
}

std::vector<std::span<const double>> Mlp::parameters() const {
  std::vector<std::span<const double>> p;
  for (const auto& layer : layers) {
    p.emplace_back(layer.weights);
    p.emplace_back(layer.bias);
  }
  return p;
}

Mlp init_mlp(std::size_t input_dim, int n_classes, std::uint64_t seed, double dropout_p) {
  if (input_dim == 0) fail(ErrorCode::DimMismatch, "MLP input dimension must be >= 1");
  if (n_classes != 2 && n_classes != 3) fail(ErrorCode::ConfigError, "MLP supports 2 or 3 classes");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) fail(ErrorCode::ConfigError, "dropout must be in [0, 1)");

  Mlp mlp;
  mlp.dropout_p = dropout_p;
  mlp.n_classes = n_classes;
  const std::array<std::size_t, 4> widths = {input_dim, kHidden1, kHidden2,
                                             static_cast<std::size_t>(n_classes)};
  Rng rng(seed, Stream::Init);
  for (std::size_t l = 0; l < 3; ++l) {
    DenseLayer& layer = mlp.layers[l];
    layer.in = widths[l];
    layer.out = widths[l + 1];
    layer.weights.resize(layer.in * layer.out);
    layer.bias.assign(layer.out, 0.0);
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.in));
    for (double& w : layer.weights) w = rng.uniform(-bound, bound);
  }
  return mlp;
}

double dropout_scale(const ForwardMode& mode, double p, std::size_t row, std::size_t unit) {
  if (!mode.train || p == 0.0) return 1.0;
  const std::uint64_t key = Rng::stream_key(mode.seed, Stream::Dropout);
  const std::uint64_t counter = (mode.step << 32) + static_cast<std::uint64_t>(row) * kHidden1 + unit;
  return Rng::uniform_at(key, counter) < p ? 0.0 : 1.0 / (1.0 - p);
}

namespace {

// y = W x + b
void affine(const DenseLayer& layer, std::span<const double> x, std::span<double> y) {
  for (std::size_t o = 0; o < layer.out; ++o) {
    const double* w = layer.weights.data() + o * layer.in;
    double acc = layer.bias[o];
    for (std::size_t i = 0; i < layer.in; ++i) acc += w[i] * x[i];
    y[o] = acc;
  }
}

void softmax_inplace(std::span<double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : logits) v /= sum;
}

struct Activations {
  std::vector<double> pre1, h1d, pre2, h2, logits;
  std::vector<double> mask;

  explicit Activations(const Mlp& mlp)
      : pre1(kHidden1), h1d(kHidden1), pre2(kHidden2), h2(kHidden2),
        logits(static_cast<std::size_t>(mlp.n_classes)), mask(kHidden1, 1.0) {}
};

void run_forward(const Mlp& mlp, std::span<const double> x, const ForwardMode& mode,
                 std::size_t row, Activations& a) {
  affine(mlp.layers[0], x, a.pre1);
  for (std::size_t j = 0; j < kHidden1; ++j) {
    a.mask[j] = dropout_scale(mode, mlp.dropout_p, row, j);
    a.h1d[j] = std::max(a.pre1[j], 0.0) * a.mask[j];
  }
  affine(mlp.layers[1], a.h1d, a.pre2);
  for (std::size_t j = 0; j < kHidden2; ++j) a.h2[j] = std::max(a.pre2[j], 0.0);
  affine(mlp.layers[2], a.h2, a.logits);
}

void check_input(const Mlp& mlp, std::size_t width) {
  if (width != mlp.input_dim()) {
    fail(ErrorCode::LengthMismatch, "MLP expects " + std::to_string(mlp.input_dim()) +
                                        " inputs, got " + std::to_string(width));
  }
}

// -log softmax(logits)[label]
double cross_entropy(std::span<const double> logits, int label) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  return mx + std::log(sum) - logits[static_cast<std::size_t>(label)];
}

}  // namespace

std::vector<double> forward(const Mlp& mlp, std::span<const double> x, const ForwardMode& mode) {
  check_input(mlp, x.size());
  Activations a(mlp);
  run_forward(mlp, x, mode, 0, a);
  softmax_inplace(a.logits);
  return a.logits;
}

std::vector<double> hidden1_activation(const Mlp& mlp, std::span<const double> x,
                                       const ForwardMode& mode, std::size_t row) {
  check_input(mlp, x.size());
  Activations a(mlp);
  run_forward(mlp, x, mode, row, a);
  return a.h1d;
}

LossAndGrad loss_and_grad(const Mlp& mlp, const Matrix& inputs, std::span<const int> labels,
                          const ForwardMode& mode) {
  if (inputs.cols != mlp.input_dim()) {
    fail(ErrorCode::DimMismatch, "batch has " + std::to_string(inputs.cols) +
                                     " features, MLP expects " + std::to_string(mlp.input_dim()));
  }
  if (labels.size() != inputs.rows || inputs.rows == 0) {
    fail(ErrorCode::LengthMismatch, "batch needs one label per row and at least one row");
  }
  const auto n_classes = static_cast<std::size_t>(mlp.n_classes);
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= n_classes) {
      fail(ErrorCode::BadLabel, "label " + std::to_string(y) + " outside [0, " +
                                    std::to_string(n_classes) + ")");
    }
  }

  LossAndGrad out;
  auto params = mlp.parameters();
  for (std::size_t t = 0; t < 6; ++t) out.grads.tensors[t].assign(params[t].size(), 0.0);
  auto& gW1 = out.grads.tensors[0];
  auto& gb1 = out.grads.tensors[1];
  auto& gW2 = out.grads.tensors[2];
  auto& gb2 = out.grads.tensors[3];
  auto& gW3 = out.grads.tensors[4];
  auto& gb3 = out.grads.tensors[5];
  const auto& L1 = mlp.layers[0];
  const auto& L2 = mlp.layers[1];
  const auto& L3 = mlp.layers[2];

  const double inv_batch = 1.0 / static_cast<double>(inputs.rows);
  Activations a(mlp);
  std::vector<double> dlogits(n_classes), dh2(kHidden2), dh1(kHidden1);

  for (std::size_t r = 0; r < inputs.rows; ++r) {
    const auto x = inputs.row(r);
    run_forward(mlp, x, mode, r, a);
    const int y = labels[r];
    out.loss += cross_entropy(a.logits, y);

    softmax_inplace(a.logits);
    for (std::size_t c = 0; c < n_classes; ++c) {
      dlogits[c] = (a.logits[c] - (static_cast<int>(c) == y ? 1.0 : 0.0)) * inv_batch;
    }

    std::fill(dh2.begin(), dh2.end(), 0.0);
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double g = dlogits[c];
      gb3[c] += g;
      double* gw = gW3.data() + c * L3.in;
      const double* w = L3.weights.data() + c * L3.in;
      for (std::size_t j = 0; j < kHidden2; ++j) {
        gw[j] += g * a.h2[j];
        dh2[j] += g * w[j];
      }
    }
    for (std::size_t j = 0; j < kHidden2; ++j) {
      if (!(a.pre2[j] > 0.0)) dh2[j] = 0.0;
    }

    std::fill(dh1.begin(), dh1.end(), 0.0);
    for (std::size_t o = 0; o < kHidden2; ++o) {
      const double g = dh2[o];
      if (g == 0.0) continue;
      gb2[o] += g;
      double* gw = gW2.data() + o * L2.in;
      const double* w = L2.weights.data() + o * L2.in;
      for (std::size_t j = 0; j < kHidden1; ++j) {
        gw[j] += g * a.h1d[j];
        dh1[j] += g * w[j];
      }
    }
    for (std::size_t j = 0; j < kHidden1; ++j) {
      dh1[j] = a.pre1[j] > 0.0 ? dh1[j] * a.mask[j] : 0.0;
    }

    for (std::size_t o = 0; o < kHidden1; ++o) {
      const double g = dh1[o];
      if (g == 0.0) continue;
      gb1[o] += g;
      double* gw = gW1.data() + o * L1.in;
      for (std::size_t i = 0; i < L1.in; ++i) gw[i] += g * x[i];
    }
  }
  out.loss *= inv_batch;
  return out;
}

double mean_loss(const Mlp& mlp, const Matrix& inputs, std::span<const int> labels) {
  if (inputs.cols != mlp.input_dim()) fail(ErrorCode::DimMismatch, "feature width mismatch");
  if (inputs.rows == 0 || labels.size() != inputs.rows) {
    fail(ErrorCode::LengthMismatch, "need one label per row and at least one row");
  }
  Activations a(mlp);
  double total = 0.0;
  for (std::size_t r = 0; r < inputs.rows; ++r) {
    run_forward(mlp, inputs.row(r), ForwardMode::eval(), r, a);
    total += cross_entropy(a.logits, labels[r]);
  }
  return total / static_cast<double>(inputs.rows);
}

void adam_step_tensor(std::span<double> param, std::span<const double> grad, std::span<double> m,
                      std::span<double> v, double lr, std::uint64_t t, const AdamState& hyper) {
  const double b1 = hyper.beta1;
  const double b2 = hyper.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
    v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    param[i] -= lr * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
}

void adam_update(AdamState& state, std::span<const std::span<double>> params,
                 std::span<const std::span<const double>> grads, double lr) {
  if (params.size() != grads.size()) fail(ErrorCode::ShapeMismatch, "parameter/gradient count");
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t].size() != grads[t].size()) {
      fail(ErrorCode::ShapeMismatch, "tensor " + std::to_string(t) + " gradient size differs");
    }
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    fail(ErrorCode::ShapeMismatch, "optimizer state holds a different tensor count");
  }
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (state.first_moment[t].size() != params[t].size()) {
      fail(ErrorCode::ShapeMismatch, "optimizer state tensor " + std::to_string(t) + " size differs");
    }
  }
  ++state.step;
  for (std::size_t t = 0; t < params.size(); ++t) {
    adam_step_tensor(params[t], grads[t], state.first_moment[t], state.second_moment[t], lr,
                     state.step, state);
  }
}

}  // namespace eegart
