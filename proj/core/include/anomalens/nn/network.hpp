#pragma once

#include <span>
#include <vector>

#include "anomalens/nn/activation.hpp"
#include "anomalens/rng.hpp"
#include "anomalens/types.hpp"

namespace anomalens::nn {

/// One fully connected layer: x_out = activation(weights * x_in + biases).
struct Layer {
  Matrix weights;  // out_dim x in_dim
  Vector biases;   // out_dim
  Activation activation = Activation::kIdentity;

  Index in_dim() const noexcept { return weights.cols(); }
  Index out_dim() const noexcept { return weights.rows(); }
};

/// activation(weights * input + biases) for a single column.
Vector affine_activate(const Matrix& weights, const Vector& biases, Activation activation,
                       const Vector& input);

/// Same, applied to every column of `inputs`.
Matrix affine_activate_batch(const Matrix& weights, const Vector& biases, Activation activation,
                             const Matrix& inputs);

/// Mean squared difference (1/N) * sum_i (a_i - b_i)^2.
double mean_squared_error(const Vector& a, const Vector& b);

/// Ordered stack of dense layers.
///
/// Construction validates that adjacent layers chain (layer l's input width
/// equals layer l-1's output width). An autoencoder is a network whose output
/// width equals its input width.
class DenseNetwork {
 public:
  DenseNetwork() = default;
  explicit DenseNetwork(std::vector<Layer> layers);

  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  /// `widths` lists every layer's output width; `activations` has the same
  /// length.
  static DenseNetwork glorot(Index input_dim, std::span<const Index> widths,
                             std::span<const Activation> activations, Rng& rng);

  bool empty() const noexcept { return layers_.empty(); }
  Index input_dim() const noexcept;
  Index output_dim() const noexcept;
  std::size_t depth() const noexcept { return layers_.size(); }
  bool is_autoencoder() const noexcept { return !empty() && input_dim() == output_dim(); }
  std::size_t parameter_count() const noexcept;

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }
  /// Mutable access for optimizers. Callers must keep the shapes intact.
  Layer& layer(std::size_t i) { return layers_.at(i); }

  /// Every layer's activated output x^(2)..x^(L); the last entry is the
  /// network output. Throws DataError on a width mismatch.
  std::vector<Vector> forward(const Vector& x) const;

  /// Network output only.
  Vector output(const Vector& x) const;

  /// Output for each column of `inputs`.
  Matrix output_batch(const Matrix& inputs) const;

  /// Activations for a batch, including the input as entry 0.
  std::vector<Matrix> forward_batch(const Matrix& inputs) const;

 private:
  std::vector<Layer> layers_;
};

/// Gradients with the same shapes as a network's parameters.
struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static Gradients zeros_like(const DenseNetwork& net);
};

/// Reverse-mode pass. `activations` comes from forward_batch (entry 0 is the
/// input) and `output_delta` is dLoss/d(output) for every column. Fills the
/// parameter gradients (summed over columns) when `params` is set and
/// dLoss/d(input) when `input_delta` is set.
void backpropagate(const DenseNetwork& net, const std::vector<Matrix>& activations,
                   Matrix output_delta, Gradients* params, Matrix* input_delta);

/// Gradient of (1/N) * ||net(x) - target||^2 with respect to every weight and
/// bias.
Gradients grad_params(const DenseNetwork& net, const Vector& x, const Vector& target);

/// Reconstruction MSE of an autoencoder, (1/N) * ||net(x) - x||^2.
double reconstruction_mse(const DenseNetwork& net, const Vector& x);

/// Reconstruction MSE for each column.
Vector reconstruction_mse_batch(const DenseNetwork& net, const Matrix& inputs);

/// Total derivative of reconstruction_mse with respect to x, where x feeds
/// both the network input and the reconstruction target:
///   (2/N) * (J^T r - r),  r = net(x) - x.
/// Throws DataError when the network is not autoencoder-shaped.
Vector grad_input(const DenseNetwork& net, const Vector& x);

/// reconstruction_mse and grad_input from one forward pass.
double reconstruction_mse_and_gradient(const DenseNetwork& net, const Vector& x, Vector& gradient);

}  // namespace anomalens::nn
