#include "anomalens/io/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "anomalens/error.hpp"

namespace anomalens::io {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "anomalens-model";

json matrix_to_json(const Matrix& m) {
  json values = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"values", std::move(values)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto& values = j.at("values");
  if (rows < 0 || cols < 0 || values.size() != static_cast<std::size_t>(rows * cols)) {
    throw DataError("model file: matrix shape does not match its values");
  }
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = values[i++].get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json values = json::array();
  for (Index i = 0; i < v.size(); ++i) values.push_back(v[i]);
  return values;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

json layer_to_json(const nn::Layer& layer) {
  return {{"activation", nn::to_string(layer.activation)},
          {"weights", matrix_to_json(layer.weights)},
          {"biases", vector_to_json(layer.biases)}};
}

nn::Layer layer_from_json(const json& j) {
  nn::Layer layer;
  layer.activation = nn::parse_activation(j.at("activation").get<std::string>());
  layer.weights = matrix_from_json(j.at("weights"));
  layer.biases = vector_from_json(j.at("biases"));
  return layer;
}

json network_to_json(const nn::DenseNetwork& net) {
  json layers = json::array();
  for (const auto& layer : net.layers()) layers.push_back(layer_to_json(layer));
  return {{"input_dim", net.input_dim()}, {"layers", std::move(layers)}};
}

nn::DenseNetwork network_from_json(const json& j) {
  std::vector<nn::Layer> layers;
  for (const auto& l : j.at("layers")) layers.push_back(layer_from_json(l));
  nn::DenseNetwork net(std::move(layers));
  if (net.input_dim() != j.at("input_dim").get<Index>()) {
    throw DataError("model file: input_dim does not match the first layer");
  }
  return net;
}

json normalizer_to_json(const detection::Normalizer& n) {
  return {{"min", vector_to_json(n.min())}, {"max", vector_to_json(n.max())}};
}

detection::Normalizer normalizer_from_json(const json& j) {
  return detection::Normalizer(vector_from_json(j.at("min")), vector_from_json(j.at("max")));
}

json header(const char* kind) {
  return {{"format", kFormat}, {"version", kModelFormatVersion}, {"kind", kind}};
}

json parse_model(const std::string& text, const std::string& expected_kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kFormat) {
    throw DataError("not an anomalens model file");
  }
  if (j.value("version", 0) != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(j.value("version", 0)));
  }
  if (!expected_kind.empty() && j.value("kind", "") != expected_kind) {
    throw DataError("model kind is '" + j.value("kind", std::string()) + "', expected '" +
                    expected_kind + "'");
  }
  return j;
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace

std::string detector_to_json(const detection::AutoencoderDetector& detector) {
  if (!detector.trained()) throw DataError("cannot save an untrained detector");
  json j = header("ae");
  const auto& s = detector.stats();
  j["network"] = network_to_json(detector.network());
  j["normalizer"] = normalizer_to_json(detector.normalizer());
  j["train_stats"] = {{"feature_mean", vector_to_json(s.feature_mean)},
                      {"feature_std", vector_to_json(s.feature_std)},
                      {"mse_mean", s.mse_mean},
                      {"mse_std", s.mse_std}};
  j["threshold"] = detector.threshold();
  return j.dump(1);
}

detection::AutoencoderDetector detector_from_json(const std::string& text) {
  const json j = parse_model(text, "ae");
  return guarded([&] {
    detection::TrainingStats stats;
    const auto& s = j.at("train_stats");
    stats.feature_mean = vector_from_json(s.at("feature_mean"));
    stats.feature_std = vector_from_json(s.at("feature_std"));
    stats.mse_mean = s.at("mse_mean").get<double>();
    stats.mse_std = s.at("mse_std").get<double>();
    return detection::AutoencoderDetector(network_from_json(j.at("network")),
                                          normalizer_from_json(j.at("normalizer")),
                                          std::move(stats), j.at("threshold").get<double>());
  });
}

std::string pca_to_json(const detection::PcaBaseline& pca) {
  json j = header("pca");
  j["normalizer"] = normalizer_to_json(pca.normalizer());
  j["mean"] = vector_to_json(pca.mean());
  j["components"] = matrix_to_json(pca.components());
  j["explained_variance"] = vector_to_json(pca.explained_variance());
  return j.dump(1);
}

detection::PcaBaseline pca_from_json(const std::string& text) {
  const json j = parse_model(text, "pca");
  return guarded([&] {
    return detection::PcaBaseline(normalizer_from_json(j.at("normalizer")),
                                  vector_from_json(j.at("mean")),
                                  matrix_from_json(j.at("components")),
                                  vector_from_json(j.at("explained_variance")));
  });
}

std::string multimodal_to_json(const multimodal::MultimodalDetector& detector) {
  if (!detector.trained()) throw DataError("cannot save an untrained multimodal detector");
  const auto& schema = detector.schema();
  json j = header("mae");
  j["shared_size"] = schema.shared_size;
  j["shared_activation"] = nn::to_string(schema.shared);
  json types = json::array();
  for (std::size_t k = 0; k < schema.type_count(); ++k) {
    const auto& spec = schema.types[k];
    const auto& p = detector.network().params()[k];
    types.push_back({{"name", spec.name},
                     {"input_size", spec.input_size},
                     {"code_size", spec.code_size},
                     {"normalizer", normalizer_to_json(detector.normalizers()[k])},
                     {"nu", detector.nu()[static_cast<Index>(k)]},
                     {"weight", detector.weights()[static_cast<Index>(k)]},
                     {"encoder", layer_to_json(p.encoder)},
                     {"fusion", layer_to_json(p.fusion)},
                     {"defusion", layer_to_json(p.defusion)},
                     {"decoder", layer_to_json(p.decoder)}});
  }
  j["types"] = std::move(types);
  j["wmse_mean"] = detector.wmse_mean();
  j["wmse_std"] = detector.wmse_std();
  j["threshold"] = detector.threshold();
  return j.dump(1);
}

multimodal::MultimodalDetector multimodal_from_json(const std::string& text) {
  const json j = parse_model(text, "mae");
  return guarded([&] {
    multimodal::ModalitySchema schema;
    schema.shared_size = j.at("shared_size").get<Index>();
    schema.shared = nn::parse_activation(j.at("shared_activation").get<std::string>());
    std::vector<multimodal::ModalityParams> params;
    std::vector<detection::Normalizer> normalizers;
    Vector nu(static_cast<Index>(j.at("types").size()));
    Index k = 0;
    for (const auto& t : j.at("types")) {
      multimodal::ModalityParams p{layer_from_json(t.at("encoder")), layer_from_json(t.at("fusion")),
                                   layer_from_json(t.at("defusion")),
                                   layer_from_json(t.at("decoder"))};
      multimodal::ModalitySpec spec;
      spec.name = t.at("name").get<std::string>();
      spec.input_size = t.at("input_size").get<Index>();
      spec.code_size = t.at("code_size").get<Index>();
      spec.encoder = p.encoder.activation;
      spec.defusion = p.defusion.activation;
      spec.output = p.decoder.activation;
      schema.types.push_back(std::move(spec));
      params.push_back(std::move(p));
      normalizers.push_back(normalizer_from_json(t.at("normalizer")));
      nu[k++] = t.at("nu").get<double>();
    }
    return multimodal::MultimodalDetector(
        multimodal::MaeNetwork(std::move(schema), std::move(params)), std::move(normalizers),
        std::move(nu), j.at("wmse_mean").get<double>(), j.at("wmse_std").get<double>(),
        j.at("threshold").get<double>());
  });
}

std::string model_kind(const std::string& text) {
  return parse_model(text, "").value("kind", std::string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace anomalens::io
