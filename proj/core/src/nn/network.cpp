#include "anomalens/nn/network.hpp"

#include <cmath>
#include <string>

#include "anomalens/error.hpp"

namespace anomalens::nn {

namespace {

void check_width(Index expected, Index actual, const char* what) {
  if (expected != actual) {
    throw DataError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                    ", got " + std::to_string(actual));
  }
}

}  // namespace

Vector affine_activate(const Matrix& weights, const Vector& biases, Activation activation,
                       const Vector& input) {
  Vector out = weights * input;
  out += biases;
  activate(activation, out);
  return out;
}

Matrix affine_activate_batch(const Matrix& weights, const Vector& biases, Activation activation,
                             const Matrix& inputs) {
  Matrix out = weights * inputs;
  out.colwise() += biases;
  activate(activation, out);
  return out;
}

double mean_squared_error(const Vector& a, const Vector& b) {
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

DenseNetwork::DenseNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.out_dim() == 0 || layer.in_dim() == 0) {
      throw DataError("layer " + std::to_string(l) + " has an empty weight matrix");
    }
    check_width(layer.out_dim(), layer.biases.size(), "bias vector");
    if (l > 0) check_width(layers_[l - 1].out_dim(), layer.in_dim(), "layer chain");
  }
}

DenseNetwork DenseNetwork::glorot(Index input_dim, std::span<const Index> widths,
                                  std::span<const Activation> activations, Rng& rng) {
  if (widths.size() != activations.size()) {
    throw DataError("glorot: one activation per layer is required");
  }
  if (input_dim <= 0) throw DataError("glorot: input dimension must be positive");
  std::vector<Layer> layers;
  layers.reserve(widths.size());
  Index fan_in = input_dim;
  for (std::size_t l = 0; l < widths.size(); ++l) {
    const Index fan_out = widths[l];
    if (fan_out <= 0) throw DataError("glorot: layer widths must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Layer layer;
    layer.weights.resize(fan_out, fan_in);
    // Row-major fill so the draw order does not depend on storage order.
    for (Index r = 0; r < fan_out; ++r) {
      for (Index c = 0; c < fan_in; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
    }
    layer.biases = Vector::Zero(fan_out);
    layer.activation = activations[l];
    layers.push_back(std::move(layer));
    fan_in = fan_out;
  }
  return DenseNetwork(std::move(layers));
}

Index DenseNetwork::input_dim() const noexcept {
  return layers_.empty() ? 0 : layers_.front().in_dim();
}

Index DenseNetwork::output_dim() const noexcept {
  return layers_.empty() ? 0 : layers_.back().out_dim();
}

std::size_t DenseNetwork::parameter_count() const noexcept {
  std::size_t count = 0;
  for (const Layer& layer : layers_) {
    count += static_cast<std::size_t>(layer.weights.size() + layer.biases.size());
  }
  return count;
}

std::vector<Vector> DenseNetwork::forward(const Vector& x) const {
  if (empty()) throw DataError("forward: network has no layers");
  check_width(input_dim(), x.size(), "network input");
  std::vector<Vector> activations;
  activations.reserve(layers_.size());
  const Vector* input = &x;
  for (const Layer& layer : layers_) {
    activations.push_back(affine_activate(layer.weights, layer.biases, layer.activation, *input));
    input = &activations.back();
  }
  return activations;
}

Vector DenseNetwork::output(const Vector& x) const { return std::move(forward(x).back()); }

std::vector<Matrix> DenseNetwork::forward_batch(const Matrix& inputs) const {
  if (empty()) throw DataError("forward: network has no layers");
  check_width(input_dim(), inputs.rows(), "network input");
  std::vector<Matrix> activations;
  activations.reserve(layers_.size() + 1);
  activations.push_back(inputs);
  for (const Layer& layer : layers_) {
    activations.push_back(
        affine_activate_batch(layer.weights, layer.biases, layer.activation, activations.back()));
  }
  return activations;
}

Matrix DenseNetwork::output_batch(const Matrix& inputs) const {
  return std::move(forward_batch(inputs).back());
}

Gradients Gradients::zeros_like(const DenseNetwork& net) {
  Gradients g;
  for (const Layer& layer : net.layers()) {
    g.weights.push_back(Matrix::Zero(layer.out_dim(), layer.in_dim()));
    g.biases.push_back(Vector::Zero(layer.out_dim()));
  }
  return g;
}

void backpropagate(const DenseNetwork& net, const std::vector<Matrix>& activations,
                   Matrix output_delta, Gradients* params, Matrix* input_delta) {
  const std::size_t depth = net.depth();
  if (params != nullptr) {
    params->weights.resize(depth);
    params->biases.resize(depth);
  }
  Matrix delta = std::move(output_delta);
  for (std::size_t l = depth; l-- > 0;) {
    const Layer& layer = net.layer(l);
    multiply_by_derivative(layer.activation, activations[l + 1], delta);
    if (params != nullptr) {
      params->weights[l].noalias() = delta * activations[l].transpose();
      params->biases[l] = delta.rowwise().sum();
    }
    if (l > 0 || input_delta != nullptr) {
      Matrix upstream = layer.weights.transpose() * delta;
      delta = std::move(upstream);
    }
  }
  if (input_delta != nullptr) *input_delta = std::move(delta);
}

Gradients grad_params(const DenseNetwork& net, const Vector& x, const Vector& target) {
  check_width(net.input_dim(), x.size(), "network input");
  check_width(net.output_dim(), target.size(), "target");
  const std::vector<Matrix> activations = net.forward_batch(x);
  const double scale = 2.0 / static_cast<double>(target.size());
  Matrix delta = scale * (activations.back() - target);
  Gradients g;
  backpropagate(net, activations, std::move(delta), &g, nullptr);
  return g;
}

double reconstruction_mse(const DenseNetwork& net, const Vector& x) {
  return mean_squared_error(net.output(x), x);
}

Vector reconstruction_mse_batch(const DenseNetwork& net, const Matrix& inputs) {
  const Matrix out = net.output_batch(inputs);
  return (out - inputs).colwise().squaredNorm().transpose() / static_cast<double>(inputs.rows());
}

double reconstruction_mse_and_gradient(const DenseNetwork& net, const Vector& x, Vector& gradient) {
  if (!net.is_autoencoder()) {
    throw DataError("grad_input: network output width " + std::to_string(net.output_dim()) +
                    " differs from input width " + std::to_string(net.input_dim()));
  }
  const std::vector<Vector> activations = net.forward(x);
  const Vector residual = activations.back() - x;
  const double n = static_cast<double>(x.size());
  const double mse = residual.squaredNorm() / n;

  const Vector output_delta = (2.0 / n) * residual;
  Vector delta = output_delta;
  for (std::size_t l = net.depth(); l-- > 0;) {
    const Layer& layer = net.layer(l);
    multiply_by_derivative(layer.activation, activations[l], delta);
    delta = layer.weights.transpose() * delta;
  }
  gradient = delta - output_delta;
  return mse;
}

Vector grad_input(const DenseNetwork& net, const Vector& x) {
  Vector gradient;
  reconstruction_mse_and_gradient(net, x, gradient);
  return gradient;
}

}  // namespace anomalens::nn
