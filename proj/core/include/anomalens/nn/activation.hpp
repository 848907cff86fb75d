#pragma once

#include <string_view>

#include "anomalens/types.hpp"

namespace anomalens::nn {

/// Element-wise activation attached to a layer. `kIdentity` is the "no
/// activation" case used on linear output layers.
enum class Activation { kSigmoid, kRelu, kIdentity };

std::string_view to_string(Activation activation) noexcept;

/// Parses "sigmoid", "relu", "identity" (alias "none"). Throws DataError.
Activation parse_activation(std::string_view name);

/// Applies the activation in place.
void activate(Activation activation, Eigen::Ref<Matrix> values) noexcept;

/// Multiplies `delta` element-wise by the activation's derivative, expressed
/// through the cached activated output: s(1-s) for sigmoid, [a > 0] for relu
/// (0 at exactly 0), 1 for identity.
void multiply_by_derivative(Activation activation, const Eigen::Ref<const Matrix>& activated,
                            Eigen::Ref<Matrix> delta) noexcept;

}  // namespace anomalens::nn
