#pragma once

#include <json.hpp>

#include "vsseq/model.hpp"
#include "vsseq/preprocess.hpp"

// ADL (de)serializers so configs round-trip through JSON manifests,
// checkpoint sidecars and run_meta files.
namespace vsseq {

NLOHMANN_JSON_SERIALIZE_ENUM(Anchor, {{Anchor::PGA, "PGA"}, {Anchor::P_ARRIVAL, "P_ARRIVAL"}})
NLOHMANN_JSON_SERIALIZE_ENUM(AnnotationSource,
                             {{AnnotationSource::MANUAL, "manual"}, {AnnotationSource::AUTO, "auto"}})
NLOHMANN_JSON_SERIALIZE_ENUM(TargetMode, {{TargetMode::LOG10, "log10"}, {TargetMode::LINEAR, "linear"}})

void to_json(nlohmann::json& j, const WindowSpec& w);
void from_json(const nlohmann::json& j, WindowSpec& w);

void to_json(nlohmann::json& j, const ConvBlock& b);
void from_json(const nlohmann::json& j, ConvBlock& b);

void to_json(nlohmann::json& j, const EncoderConfig& c);
void from_json(const nlohmann::json& j, EncoderConfig& c);

}  // namespace vsseq
