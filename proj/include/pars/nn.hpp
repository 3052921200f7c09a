#pragma once

// Dense ReLU MLP with reverse-mode differentiation and Adam, batched over
// Eigen matrices (one sample per column). Everything is templated on the
// scalar type; double is the default so results reproduce bit-for-bit.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "pars/errors.hpp"
#include "pars/rng.hpp"

namespace pars::nn {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct GradientTape;

template <typename Scalar = double>
struct Mlp {
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  std::vector<int> sizes;        // input, hidden..., output
  std::vector<Matrix> weights;   // weights[l] is sizes[l+1] x sizes[l]
  std::vector<Vector> biases;

  Mlp() = default;

  explicit Mlp(std::vector<int> layer_sizes) : sizes(std::move(layer_sizes)) {
    check_sizes();
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
      weights.emplace_back(Matrix::Zero(sizes[l + 1], sizes[l]));
      biases.emplace_back(Vector::Zero(sizes[l + 1]));
    }
  }

  static Mlp he_init(std::vector<int> layer_sizes, Rng& rng) {
    Mlp net(std::move(layer_sizes));
    for (size_t l = 0; l < net.weights.size(); ++l) {
      const Scalar stddev = std::sqrt(Scalar(2) / Scalar(net.sizes[l]));
      for (int i = 0; i < net.weights[l].rows(); ++i) {
        for (int j = 0; j < net.weights[l].cols(); ++j) {
          net.weights[l](i, j) = stddev * static_cast<Scalar>(rng.normal());
        }
      }
    }
    return net;
  }

  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }

  size_t parameter_count() const {
    size_t n = 0;
    for (size_t l = 0; l < weights.size(); ++l) {
      n += static_cast<size_t>(weights[l].size()) + static_cast<size_t>(biases[l].size());
    }
    return n;
  }

  bool finite() const {
    for (size_t l = 0; l < weights.size(); ++l) {
      if (!weights[l].allFinite() || !biases[l].allFinite()) return false;
    }
    return true;
  }

  // Batched forward; columns are samples.
  Matrix forward(const Matrix& x) const {
    check_input(x);
    Matrix a = x;
    for (size_t l = 0; l < weights.size(); ++l) {
      Matrix z = (weights[l] * a).colwise() + biases[l];
      if (l + 1 < weights.size()) {
        a = z.array().max(Scalar(0)).matrix();
      } else {
        a = std::move(z);
      }
    }
    return a;
  }

  Vector forward(const Vector& x) const {
    return Matrix(forward(Matrix(x)));
  }

  // Forward that records everything backward() needs. The tape's gradient
  // accumulators are (re)zeroed here, so one tape per optimization step.
  Matrix forward(const Matrix& x, GradientTape<Scalar>& tape) const {
    check_input(x);
    tape.attach(*this);
    Matrix a = x;
    for (size_t l = 0; l < weights.size(); ++l) {
      tape.inputs[l] = a;
      Matrix z = (weights[l] * a).colwise() + biases[l];
      if (l + 1 < weights.size()) {
        tape.preacts[l] = z;
        a = z.array().max(Scalar(0)).matrix();
      } else {
        a = std::move(z);
      }
    }
    tape.recorded = true;
    return a;
  }

 private:
  void check_sizes() const {
    if (sizes.size() < 2) throw ConfigError("mlp: need at least input and output sizes");
    for (int s : sizes) {
      if (s < 1) throw ConfigError("mlp: layer sizes must be positive");
    }
  }
  void check_input(const Matrix& x) const {
    if (x.rows() != input_size()) {
      throw std::invalid_argument("mlp: input has " + std::to_string(x.rows()) +
                                  " rows, expected " + std::to_string(input_size()));
    }
  }
};

// Records one forward pass and accumulates parameter gradients.
template <typename Scalar>
struct GradientTape {
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  std::vector<Matrix> inputs;    // layer inputs a[l]
  std::vector<Matrix> preacts;   // hidden pre-activations z[l]
  std::vector<Matrix> grad_w;
  std::vector<Vector> grad_b;
  bool recorded = false;

  void attach(const Mlp<Scalar>& net) {
    const size_t layers = net.weights.size();
    inputs.assign(layers, Matrix());
    preacts.assign(layers, Matrix());
    grad_w.resize(layers);
    grad_b.resize(layers);
    for (size_t l = 0; l < layers; ++l) {
      grad_w[l] = Matrix::Zero(net.weights[l].rows(), net.weights[l].cols());
      grad_b[l] = Vector::Zero(net.biases[l].size());
    }
    recorded = false;
  }

  // Reverse pass from dL/d(output); accumulates parameter gradients and
  // returns dL/d(input). Callable repeatedly after one forward to sum
  // gradients of several losses of the same pass.
  Matrix backward(const Mlp<Scalar>& net, const Matrix& grad_output) {
    if (!recorded) throw std::logic_error("tape: backward before forward");
    if (grad_output.rows() != net.output_size() ||
        grad_output.cols() != inputs[0].cols()) {
      throw std::invalid_argument("tape: gradient shape mismatch");
    }
    Matrix g = grad_output;
    for (int l = net.layer_count() - 1; l >= 0; --l) {
      grad_w[l].noalias() += g * inputs[l].transpose();
      grad_b[l] += g.rowwise().sum();
      if (l > 0) {
        Matrix gprev = net.weights[l].transpose() * g;
        g = (gprev.array() *
             (preacts[l - 1].array() > Scalar(0)).template cast<Scalar>())
                .matrix();
      } else {
        g = net.weights[0].transpose() * g;
      }
    }
    return g;
  }
};

template <typename Scalar = double>
struct AdamState {
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  Scalar lr;
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar eps = Scalar(1e-8);
  long steps = 0;
  long skipped = 0;  // updates dropped because a gradient was non-finite

  std::vector<Matrix> m_w, v_w;
  std::vector<Vector> m_b, v_b;

  AdamState(const Mlp<Scalar>& net, Scalar learning_rate) : lr(learning_rate) {
    if (!(lr > Scalar(0))) throw ConfigError("adam: learning rate must be positive");
    for (size_t l = 0; l < net.weights.size(); ++l) {
      m_w.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
      v_w.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
      m_b.push_back(Vector::Zero(net.biases[l].size()));
      v_b.push_back(Vector::Zero(net.biases[l].size()));
    }
  }
};

// One Adam update from the tape's accumulated gradients. A non-finite
// gradient anywhere skips the whole update and bumps state.skipped.
template <typename Scalar>
void adam_step(Mlp<Scalar>& net, const GradientTape<Scalar>& grads,
               AdamState<Scalar>& state) {
  if (grads.grad_w.size() != net.weights.size()) {
    throw std::invalid_argument("adam: gradient/parameter layer count mismatch");
  }
  for (size_t l = 0; l < net.weights.size(); ++l) {
    if (!grads.grad_w[l].allFinite() || !grads.grad_b[l].allFinite()) {
      ++state.skipped;
      return;
    }
  }
  ++state.steps;
  const Scalar c1 = Scalar(1) - std::pow(state.beta1, Scalar(state.steps));
  const Scalar c2 = Scalar(1) - std::pow(state.beta2, Scalar(state.steps));
  for (size_t l = 0; l < net.weights.size(); ++l) {
    auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
      m = state.beta1 * m + (Scalar(1) - state.beta1) * g;
      v = (state.beta2 * v.array() + (Scalar(1) - state.beta2) * g.array().square())
              .matrix();
      p.array() -=
          state.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + state.eps);
    };
    update(net.weights[l], state.m_w[l], state.v_w[l], grads.grad_w[l]);
    update(net.biases[l], state.m_b[l], state.v_b[l], grads.grad_b[l]);
  }
}

// Checkpoint format: {"format": "pars-mlp", "version": 1, "scalar": ...,
// "sizes": [...], "layers": [{"w": row-major flat, "b": flat}, ...]}.
template <typename Scalar>
nlohmann::json to_json(const Mlp<Scalar>& net) {
  nlohmann::json j;
  j["format"] = "pars-mlp";
  j["version"] = 1;
  j["scalar"] = sizeof(Scalar) == 4 ? "f32" : "f64";
  j["sizes"] = net.sizes;
  j["layers"] = nlohmann::json::array();
  for (size_t l = 0; l < net.weights.size(); ++l) {
    nlohmann::json layer;
    std::vector<double> w;
    w.reserve(net.weights[l].size());
    for (int i = 0; i < net.weights[l].rows(); ++i) {
      for (int jj = 0; jj < net.weights[l].cols(); ++jj) {
        w.push_back(static_cast<double>(net.weights[l](i, jj)));
      }
    }
    std::vector<double> b(net.biases[l].data(),
                          net.biases[l].data() + net.biases[l].size());
    layer["w"] = std::move(w);
    layer["b"] = std::move(b);
    j["layers"].push_back(std::move(layer));
  }
  return j;
}

template <typename Scalar = double>
Mlp<Scalar> mlp_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "pars-mlp") {
    throw ConfigError("checkpoint: not a pars-mlp object");
  }
  if (j.value("version", 0) != 1) {
    throw ConfigError("checkpoint: unsupported version");
  }
  Mlp<Scalar> net(j.at("sizes").get<std::vector<int>>());
  const auto& layers = j.at("layers");
  if (layers.size() != net.weights.size()) {
    throw ConfigError("checkpoint: layer count does not match sizes");
  }
  for (size_t l = 0; l < net.weights.size(); ++l) {
    const auto w = layers[l].at("w").get<std::vector<double>>();
    const auto b = layers[l].at("b").get<std::vector<double>>();
    if (static_cast<int>(w.size()) != net.weights[l].size() ||
        static_cast<int>(b.size()) != net.biases[l].size()) {
      throw ConfigError("checkpoint: parameter array size mismatch in layer " +
                        std::to_string(l));
    }
    size_t k = 0;
    for (int i = 0; i < net.weights[l].rows(); ++i) {
      for (int jj = 0; jj < net.weights[l].cols(); ++jj) {
        net.weights[l](i, jj) = static_cast<Scalar>(w[k++]);
      }
    }
    for (int i = 0; i < net.biases[l].size(); ++i) {
      net.biases[l](i) = static_cast<Scalar>(b[i]);
    }
  }
  if (!net.finite()) throw ConfigError("checkpoint: non-finite parameters");
  return net;
}

}  // namespace pars::nn
