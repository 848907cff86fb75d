#pragma once

#include <cmath>
#include <vector>

#include "anomalens/nn/network.hpp"
#include "anomalens/rng.hpp"

namespace anomalens::testing {

inline Vector random_vector(Rng& rng, Index n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

inline Matrix random_matrix(Rng& rng, Index rows, Index cols, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) m.col(j) = random_vector(rng, rows, lo, hi);
  return m;
}

inline nn::Activation random_activation(Rng& rng) {
  static const nn::Activation all[] = {nn::Activation::kSigmoid, nn::Activation::kRelu,
                                       nn::Activation::kIdentity};
  return all[rng.below(3)];
}

/// Random network with 1..max_layers layers of 1..max_units units and
/// non-zero biases. When `autoencoder` the output width equals the input.
inline nn::DenseNetwork random_network(Rng& rng, std::size_t max_layers, Index max_units,
                                       bool autoencoder) {
  const std::size_t depth = 1 + static_cast<std::size_t>(rng.below(max_layers));
  const Index input = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_units)));
  std::vector<nn::Layer> layers;
  Index in = input;
  for (std::size_t l = 0; l < depth; ++l) {
    const Index out = autoencoder && l + 1 == depth
                          ? input
                          : 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_units)));
    nn::Layer layer;
    layer.weights = random_matrix(rng, out, in);
    layer.biases = random_vector(rng, out, -0.5, 0.5);
    layer.activation = random_activation(rng);
    layers.push_back(std::move(layer));
    in = out;
  }
  return nn::DenseNetwork(std::move(layers));
}

/// Central difference of f along every coordinate of x.
template <typename F>
Vector central_difference(F&& f, Vector x, double h = 1e-6) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// ||a - b|| / max(||a||, ||b||, floor).
inline double relative_error(const Vector& a, const Vector& b, double floor = 1e-8) {
  const double scale = std::max({a.norm(), b.norm(), floor});
  return (a - b).norm() / scale;
}

/// Relu kinks make finite differences meaningless; true when every relu
/// pre-activation of x is at least `margin` away from zero.
inline bool away_from_kinks(const nn::DenseNetwork& net, const Vector& x, double margin) {
  Vector a = x;
  for (const auto& layer : net.layers()) {
    const Vector pre = layer.weights * a + layer.biases;
    if (layer.activation == nn::Activation::kRelu && pre.cwiseAbs().minCoeff() < margin) return false;
    a = nn::affine_activate(layer.weights, layer.biases, layer.activation, a);
  }
  return true;
}

}  // namespace anomalens::testing
