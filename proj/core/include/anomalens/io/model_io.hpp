#pragma once

#include <filesystem>
#include <string>

#include "anomalens/detection/autoencoder_detector.hpp"
#include "anomalens/detection/pca.hpp"
#include "anomalens/multimodal/multimodal_detector.hpp"

namespace anomalens::io {

/// Models are stored as JSON documents tagged with a format name, version and
/// kind ("ae", "pca" or "mae"). Matrices are row-major arrays of numbers in
/// shortest round-trip form, so a reloaded model scores bit-identically.
inline constexpr int kModelFormatVersion = 1;

std::string detector_to_json(const detection::AutoencoderDetector& detector);
detection::AutoencoderDetector detector_from_json(const std::string& text);

std::string pca_to_json(const detection::PcaBaseline& pca);
detection::PcaBaseline pca_from_json(const std::string& text);

std::string multimodal_to_json(const multimodal::MultimodalDetector& detector);
multimodal::MultimodalDetector multimodal_from_json(const std::string& text);

/// Kind tag of a serialized model; throws DataError if it is not one.
std::string model_kind(const std::string& text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace anomalens::io
