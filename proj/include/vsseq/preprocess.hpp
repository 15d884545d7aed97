#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vsseq/records.hpp"

namespace vsseq {

enum class Anchor { PGA, P_ARRIVAL };
enum class AnnotationSource { MANUAL, AUTO };

struct WindowSpec {
    Anchor anchor = Anchor::PGA;
    double duration_s = 60.0;     // 15 s is the usual choice for P_ARRIVAL
    double segment_len_s = 1.0;   // 1..5 s
    bool include_ps_channel = false;
    AnnotationSource annotation_source = AnnotationSource::MANUAL;

    // Throws on non-positive lengths or when duration is not an integer
    // multiple of the segment length.
    void validate() const;
    std::size_t segment_count() const;
};

// Fixed-length window split into T equal segments. Each segment stores C
// channel rows of L samples, row-major. Channel 3 (when present) is the
// {0,1} P-to-S indicator.
struct SegmentSequence {
    std::string record_id;
    std::string station_id;
    std::size_t channel_count = 3;
    std::size_t segment_len = 0;  // samples per channel
    std::vector<std::vector<double>> segments;
    double target_vs30 = 0.0;  // m/s; filled by the training pipeline
    double norm_scale = 1.0;   // scalar applied by normalize()
};

// argmax over samples of max over channels of |acc|; ties -> smallest index.
std::size_t pga_index(const StrongMotionRecord& rec);

// Window of spec.duration_s centered on the anchor (anchor at window sample
// floor(W/2)); out-of-range samples zero-padded; optional 4th channel = 1 on
// [p_idx, s_idx) clipped to the window.
SegmentSequence extract_window(const StrongMotionRecord& rec, const WindowSpec& spec,
                               std::optional<std::size_t> p_idx = std::nullopt,
                               std::optional<std::size_t> s_idx = std::nullopt);

// Joint max-abs scaling of the 3 acceleration channels (single scalar, so
// inter-channel ratios survive); the indicator channel is left untouched.
SegmentSequence normalize(SegmentSequence seq);

}  // namespace vsseq
