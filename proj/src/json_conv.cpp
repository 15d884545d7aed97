#include "vsseq/json_conv.hpp"

namespace vsseq {

using nlohmann::json;

void to_json(json& j, const WindowSpec& w) {
    j = json{{"anchor", w.anchor},
             {"duration_s", w.duration_s},
             {"segment_len_s", w.segment_len_s},
             {"include_ps_channel", w.include_ps_channel},
             {"annotation_source", w.annotation_source}};
}

void from_json(const json& j, WindowSpec& w) {
    WindowSpec def;
    w.anchor = j.value("anchor", def.anchor);
    w.duration_s = j.value("duration_s", def.duration_s);
    w.segment_len_s = j.value("segment_len_s", def.segment_len_s);
    w.include_ps_channel = j.value("include_ps_channel", def.include_ps_channel);
    w.annotation_source = j.value("annotation_source", def.annotation_source);
}

void to_json(json& j, const ConvBlock& b) {
    j = json::array({b.out_channels, b.kernel, b.stride, b.pool_width});
}

void from_json(const json& j, ConvBlock& b) {
    b.out_channels = j.at(0).get<std::size_t>();
    b.kernel = j.at(1).get<std::size_t>();
    b.stride = j.at(2).get<std::size_t>();
    b.pool_width = j.at(3).get<std::size_t>();
}

void to_json(json& j, const EncoderConfig& c) {
    j = json{{"in_channels", c.in_channels}, {"conv_blocks", c.conv_blocks}};
}

void from_json(const json& j, EncoderConfig& c) {
    EncoderConfig def;
    c.in_channels = j.value("in_channels", def.in_channels);
    if (j.contains("conv_blocks")) c.conv_blocks = j.at("conv_blocks").get<std::vector<ConvBlock>>();
}

}  // namespace vsseq
