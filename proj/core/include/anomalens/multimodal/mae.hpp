#pragma once

#include <span>
#include <string>
#include <vector>

#include "anomalens/nn/network.hpp"

namespace anomalens::multimodal {

/// One data type feeding the multimodal autoencoder.
struct ModalitySpec {
  std::string name;
  Index input_size = 0;  // N_k
  Index code_size = 0;   // width of the type's second and fourth layers
  nn::Activation encoder = nn::Activation::kRelu;   // second layer
  nn::Activation defusion = nn::Activation::kRelu;  // fourth layer
  nn::Activation output = nn::Activation::kIdentity;
};

struct ModalitySchema {
  std::vector<ModalitySpec> types;
  Index shared_size = 0;  // third (shared) layer width
  nn::Activation shared = nn::Activation::kIdentity;

  /// Throws DataError unless K >= 1, every code is narrower than its input
  /// and the shared layer is narrower than the summed codes.
  void validate() const;
  std::size_t type_count() const noexcept { return types.size(); }
  Index total_input() const noexcept;
  /// Offset of each type inside the concatenated input vector.
  std::vector<Index> input_offsets() const;
};

/// Per-type parameters. `fusion` maps this type's code into the shared
/// layer (weights shared_size x code_size); the shared pre-activation is
/// the sum over types of fusion.weights * code + fusion.biases.
struct ModalityParams {
  nn::Layer encoder;   // code_size x input_size
  nn::Layer fusion;    // shared_size x code_size
  nn::Layer defusion;  // code_size x shared_size
  nn::Layer decoder;   // input_size x code_size
};

/// Per-sample activations of every layer.
struct MaeActivations {
  std::vector<Vector> codes;            // x^{k,(2)}
  Vector shared;                        // x^{(3)}
  std::vector<Vector> defused;          // x^{k,(4)}
  std::vector<Vector> reconstructions;  // x^{k,(5)}
};

/// Batch activations; inputs are kept for the backward pass.
struct MaeBatch {
  std::vector<Matrix> inputs;
  std::vector<Matrix> codes;
  Matrix shared;
  std::vector<Matrix> defused;
  std::vector<Matrix> outputs;
};

/// Parameter groups that a training stage may update.
enum ParamGroup : unsigned {
  kEncoders = 1u << 0,
  kFusion = 1u << 1,
  kDefusion = 1u << 2,
  kDecoders = 1u << 3,
  kAllGroups = kEncoders | kFusion | kDefusion | kDecoders,
};

/// Five-layer multimodal autoencoder parameters, in normalized space.
class MaeNetwork {
 public:
  MaeNetwork() = default;
  MaeNetwork(ModalitySchema schema, std::vector<ModalityParams> params);

  /// Glorot-uniform weights, zero biases. The fusion blocks are drawn as one
  /// shared_size x sum(code_size) matrix.
  static MaeNetwork glorot(const ModalitySchema& schema, Rng& rng);

  bool empty() const noexcept { return params_.empty(); }
  const ModalitySchema& schema() const noexcept { return schema_; }
  const std::vector<ModalityParams>& params() const noexcept { return params_; }
  ModalityParams& params(std::size_t k) { return params_.at(k); }

  /// Throws DataError naming the type on a size mismatch.
  MaeActivations forward(std::span<const Vector> inputs) const;
  MaeBatch forward_batch(std::vector<Matrix> inputs) const;

  /// Shared layer from per-type codes (sum of fusion blocks, one activation).
  Vector fuse(std::span<const Vector> codes) const;
  Matrix fuse_batch(std::span<const Matrix> codes) const;

  /// Weighted reconstruction error sum_k w_k * MSE_k and, when `gradient`
  /// is set, its derivative with respect to every input (each input is both
  /// fed forward and used as the reconstruction target).
  double weighted_mse(std::span<const Vector> inputs, std::span<const double> weights,
                      std::vector<double>* per_type, std::vector<Vector>* gradient) const;

  /// Plain five-layer network with identical parameters; K must be 1.
  nn::DenseNetwork to_dense() const;

 private:
  void check_inputs(std::span<const Index> sizes) const;

  ModalitySchema schema_;
  std::vector<ModalityParams> params_;
};

/// Gradients share the parameter layout.
using MaeGradients = std::vector<ModalityParams>;

MaeGradients zero_gradients(const MaeNetwork& net);

/// Reverse-mode pass for a batch. `output_deltas[k]` is dLoss/d(output_k).
/// Parameter gradients are summed over the batch.
void backpropagate(const MaeNetwork& net, const MaeBatch& batch, std::vector<Matrix> output_deltas,
                   MaeGradients* grads, std::vector<Matrix>* input_deltas);

}  // namespace anomalens::multimodal
