#include "anomalens/multimodal/mae.hpp"

#include <cmath>
#include <numeric>

#include "anomalens/error.hpp"

namespace anomalens::multimodal {

namespace {

nn::Layer uniform_layer(Index out, Index in, double limit, nn::Activation activation, Rng& rng) {
  nn::Layer layer;
  layer.weights.resize(out, in);
  for (Index r = 0; r < out; ++r) {
    for (Index c = 0; c < in; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
  }
  layer.biases = Vector::Zero(out);
  layer.activation = activation;
  return layer;
}

void check_layer(const nn::Layer& layer, Index out, Index in, const std::string& what) {
  if (layer.weights.rows() != out || layer.weights.cols() != in || layer.biases.size() != out) {
    throw DataError("mae: " + what + " has shape " + std::to_string(layer.weights.rows()) + "x" +
                    std::to_string(layer.weights.cols()) + ", expected " + std::to_string(out) +
                    "x" + std::to_string(in));
  }
}

}  // namespace

void ModalitySchema::validate() const {
  if (types.empty()) throw DataError("mae schema: at least one data type is required");
  Index codes = 0;
  for (const ModalitySpec& t : types) {
    if (t.input_size <= 0 || t.code_size <= 0) {
      throw DataError("mae schema: type '" + t.name + "' needs positive sizes");
    }
    if (t.code_size >= t.input_size) {
      throw DataError("mae schema: type '" + t.name + "' code must be narrower than its input");
    }
    codes += t.code_size;
  }
  if (shared_size <= 0 || shared_size >= codes) {
    throw DataError("mae schema: shared layer must be positive and narrower than the summed codes");
  }
}

Index ModalitySchema::total_input() const noexcept {
  Index total = 0;
  for (const ModalitySpec& t : types) total += t.input_size;
  return total;
}

std::vector<Index> ModalitySchema::input_offsets() const {
  std::vector<Index> offsets;
  Index offset = 0;
  for (const ModalitySpec& t : types) {
    offsets.push_back(offset);
    offset += t.input_size;
  }
  return offsets;
}

MaeNetwork::MaeNetwork(ModalitySchema schema, std::vector<ModalityParams> params)
    : schema_(std::move(schema)), params_(std::move(params)) {
  schema_.validate();
  if (params_.size() != schema_.type_count()) {
    throw DataError("mae: one parameter set per data type is required");
  }
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const ModalitySpec& t = schema_.types[k];
    ModalityParams& p = params_[k];
    check_layer(p.encoder, t.code_size, t.input_size, t.name + " encoder");
    check_layer(p.fusion, schema_.shared_size, t.code_size, t.name + " fusion");
    check_layer(p.defusion, t.code_size, schema_.shared_size, t.name + " defusion");
    check_layer(p.decoder, t.input_size, t.code_size, t.name + " decoder");
    p.encoder.activation = t.encoder;
    p.fusion.activation = schema_.shared;
    p.defusion.activation = t.defusion;
    p.decoder.activation = t.output;
  }
}

MaeNetwork MaeNetwork::glorot(const ModalitySchema& schema, Rng& rng) {
  schema.validate();
  const std::size_t k_count = schema.type_count();
  const Index s = schema.shared_size;
  Index codes = 0;
  for (const ModalitySpec& t : schema.types) codes += t.code_size;

  std::vector<ModalityParams> params(k_count);
  auto limit = [](Index a, Index b) { return std::sqrt(6.0 / static_cast<double>(a + b)); };
  for (std::size_t k = 0; k < k_count; ++k) {
    const ModalitySpec& t = schema.types[k];
    params[k].encoder = uniform_layer(t.code_size, t.input_size, limit(t.input_size, t.code_size),
                                      t.encoder, rng);
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    params[k].fusion = uniform_layer(s, schema.types[k].code_size, limit(codes, s), schema.shared, rng);
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    const ModalitySpec& t = schema.types[k];
    params[k].defusion = uniform_layer(t.code_size, s, limit(s, t.code_size), t.defusion, rng);
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    const ModalitySpec& t = schema.types[k];
    params[k].decoder = uniform_layer(t.input_size, t.code_size, limit(t.code_size, t.input_size),
                                      t.output, rng);
  }
  return MaeNetwork(schema, std::move(params));
}

void MaeNetwork::check_inputs(std::span<const Index> sizes) const {
  if (empty()) throw DataError("mae: network has no parameters");
  if (sizes.size() != schema_.type_count()) {
    throw DataError("mae: expected " + std::to_string(schema_.type_count()) + " inputs, got " +
                    std::to_string(sizes.size()));
  }
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] != schema_.types[k].input_size) {
      throw DataError("mae: type '" + schema_.types[k].name + "' expects dimension " +
                      std::to_string(schema_.types[k].input_size) + ", got " +
                      std::to_string(sizes[k]));
    }
  }
}

Vector MaeNetwork::fuse(std::span<const Vector> codes) const {
  Vector z = params_[0].fusion.weights * codes[0];
  z += params_[0].fusion.biases;
  for (std::size_t k = 1; k < params_.size(); ++k) {
    Vector term = params_[k].fusion.weights * codes[k];
    term += params_[k].fusion.biases;
    z += term;
  }
  nn::activate(schema_.shared, z);
  return z;
}

Matrix MaeNetwork::fuse_batch(std::span<const Matrix> codes) const {
  Matrix z = params_[0].fusion.weights * codes[0];
  z.colwise() += params_[0].fusion.biases;
  for (std::size_t k = 1; k < params_.size(); ++k) {
    Matrix term = params_[k].fusion.weights * codes[k];
    term.colwise() += params_[k].fusion.biases;
    z += term;
  }
  nn::activate(schema_.shared, z);
  return z;
}

MaeActivations MaeNetwork::forward(std::span<const Vector> inputs) const {
  std::vector<Index> sizes;
  for (const Vector& x : inputs) sizes.push_back(x.size());
  check_inputs(sizes);

  MaeActivations a;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const nn::Layer& enc = params_[k].encoder;
    a.codes.push_back(nn::affine_activate(enc.weights, enc.biases, enc.activation, inputs[k]));
  }
  a.shared = fuse(a.codes);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const nn::Layer& def = params_[k].defusion;
    const nn::Layer& dec = params_[k].decoder;
    a.defused.push_back(nn::affine_activate(def.weights, def.biases, def.activation, a.shared));
    a.reconstructions.push_back(
        nn::affine_activate(dec.weights, dec.biases, dec.activation, a.defused.back()));
  }
  return a;
}

MaeBatch MaeNetwork::forward_batch(std::vector<Matrix> inputs) const {
  std::vector<Index> sizes;
  for (const Matrix& x : inputs) sizes.push_back(x.rows());
  check_inputs(sizes);

  MaeBatch b;
  b.inputs = std::move(inputs);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const nn::Layer& enc = params_[k].encoder;
    b.codes.push_back(nn::affine_activate_batch(enc.weights, enc.biases, enc.activation, b.inputs[k]));
  }
  b.shared = fuse_batch(b.codes);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const nn::Layer& def = params_[k].defusion;
    const nn::Layer& dec = params_[k].decoder;
    b.defused.push_back(nn::affine_activate_batch(def.weights, def.biases, def.activation, b.shared));
    b.outputs.push_back(
        nn::affine_activate_batch(dec.weights, dec.biases, dec.activation, b.defused.back()));
  }
  return b;
}

double MaeNetwork::weighted_mse(std::span<const Vector> inputs, std::span<const double> weights,
                                std::vector<double>* per_type,
                                std::vector<Vector>* gradient) const {
  if (weights.size() != params_.size()) throw DataError("mae: one weight per data type is required");
  const MaeActivations a = forward(inputs);
  const std::size_t k_count = params_.size();

  double total = 0.0;
  std::vector<Vector> output_deltas(k_count);
  if (per_type != nullptr) per_type->assign(k_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) {
    const Vector residual = a.reconstructions[k] - inputs[k];
    const double n = static_cast<double>(inputs[k].size());
    const double mse = residual.squaredNorm() / n;
    if (per_type != nullptr) (*per_type)[k] = mse;
    if (k == 0) {
      total = weights[k] * mse;
    } else {
      total += weights[k] * mse;
    }
    if (gradient != nullptr) output_deltas[k] = (weights[k] * 2.0 / n) * residual;
  }
  if (gradient == nullptr) return total;

  Vector shared_delta;
  for (std::size_t k = 0; k < k_count; ++k) {
    const ModalityParams& p = params_[k];
    Vector delta = output_deltas[k];
    nn::multiply_by_derivative(p.decoder.activation, a.reconstructions[k], delta);
    delta = p.decoder.weights.transpose() * delta;
    nn::multiply_by_derivative(p.defusion.activation, a.defused[k], delta);
    delta = p.defusion.weights.transpose() * delta;
    if (k == 0) {
      shared_delta = std::move(delta);
    } else {
      shared_delta += delta;
    }
  }
  nn::multiply_by_derivative(schema_.shared, a.shared, shared_delta);

  gradient->resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const ModalityParams& p = params_[k];
    Vector delta = p.fusion.weights.transpose() * shared_delta;
    nn::multiply_by_derivative(p.encoder.activation, a.codes[k], delta);
    delta = p.encoder.weights.transpose() * delta;
    (*gradient)[k] = delta - output_deltas[k];
  }
  return total;
}

nn::DenseNetwork MaeNetwork::to_dense() const {
  if (params_.size() != 1) throw DataError("mae: to_dense requires exactly one data type");
  const ModalityParams& p = params_.front();
  return nn::DenseNetwork({p.encoder, p.fusion, p.defusion, p.decoder});
}

MaeGradients zero_gradients(const MaeNetwork& net) {
  MaeGradients grads;
  for (const ModalityParams& p : net.params()) {
    ModalityParams g;
    for (auto [dst, src] : {std::pair{&g.encoder, &p.encoder}, std::pair{&g.fusion, &p.fusion},
                            std::pair{&g.defusion, &p.defusion}, std::pair{&g.decoder, &p.decoder}}) {
      dst->weights = Matrix::Zero(src->weights.rows(), src->weights.cols());
      dst->biases = Vector::Zero(src->biases.size());
      dst->activation = src->activation;
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

void backpropagate(const MaeNetwork& net, const MaeBatch& batch, std::vector<Matrix> output_deltas,
                   MaeGradients* grads, std::vector<Matrix>* input_deltas) {
  const auto& params = net.params();
  const std::size_t k_count = params.size();
  if (grads != nullptr && grads->size() != k_count) *grads = zero_gradients(net);

  Matrix shared_delta;
  for (std::size_t k = 0; k < k_count; ++k) {
    const ModalityParams& p = params[k];
    Matrix delta = std::move(output_deltas[k]);
    nn::multiply_by_derivative(p.decoder.activation, batch.outputs[k], delta);
    if (grads != nullptr) {
      (*grads)[k].decoder.weights.noalias() = delta * batch.defused[k].transpose();
      (*grads)[k].decoder.biases = delta.rowwise().sum();
    }
    Matrix up = p.decoder.weights.transpose() * delta;
    nn::multiply_by_derivative(p.defusion.activation, batch.defused[k], up);
    if (grads != nullptr) {
      (*grads)[k].defusion.weights.noalias() = up * batch.shared.transpose();
      (*grads)[k].defusion.biases = up.rowwise().sum();
    }
    Matrix to_shared = p.defusion.weights.transpose() * up;
    if (k == 0) {
      shared_delta = std::move(to_shared);
    } else {
      shared_delta += to_shared;
    }
  }
  nn::multiply_by_derivative(net.schema().shared, batch.shared, shared_delta);

  if (input_deltas != nullptr) input_deltas->resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const ModalityParams& p = params[k];
    if (grads != nullptr) {
      (*grads)[k].fusion.weights.noalias() = shared_delta * batch.codes[k].transpose();
      (*grads)[k].fusion.biases = shared_delta.rowwise().sum();
    }
    Matrix delta = p.fusion.weights.transpose() * shared_delta;
    nn::multiply_by_derivative(p.encoder.activation, batch.codes[k], delta);
    if (grads != nullptr) {
      (*grads)[k].encoder.weights.noalias() = delta * batch.inputs[k].transpose();
      (*grads)[k].encoder.biases = delta.rowwise().sum();
    }
    if (input_deltas != nullptr) (*input_deltas)[k] = p.encoder.weights.transpose() * delta;
  }
}

}  // namespace anomalens::multimodal
