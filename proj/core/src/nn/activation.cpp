#include "anomalens/nn/activation.hpp"

#include <string>

#include "anomalens/error.hpp"

namespace anomalens::nn {

std::string_view to_string(Activation activation) noexcept {
  switch (activation) {
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kRelu:
      return "relu";
    case Activation::kIdentity:
      return "identity";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "relu") return Activation::kRelu;
  if (name == "identity" || name == "none" || name == "linear") return Activation::kIdentity;
  throw DataError("unknown activation '" + std::string(name) + "'");
}

void activate(Activation activation, Eigen::Ref<Matrix> values) noexcept {
  switch (activation) {
    case Activation::kSigmoid:
      values = (1.0 + (-values.array()).exp()).inverse().matrix();
      break;
    case Activation::kRelu:
      values = values.cwiseMax(0.0);
      break;
    case Activation::kIdentity:
      break;
  }
}

void multiply_by_derivative(Activation activation, const Eigen::Ref<const Matrix>& activated,
                            Eigen::Ref<Matrix> delta) noexcept {
  switch (activation) {
    case Activation::kSigmoid:
      delta.array() *= activated.array() * (1.0 - activated.array());
      break;
    case Activation::kRelu:
      delta.array() *= (activated.array() > 0.0).cast<double>();
      break;
    case Activation::kIdentity:
      break;
  }
}

}  // namespace anomalens::nn
