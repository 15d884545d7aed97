#include "vsseq/preprocess.hpp"

#include <cmath>
#include <stdexcept>

namespace vsseq {

namespace {

bool near_integer(double x, double eps = 1e-9) {
    return std::fabs(x - std::llround(x)) < eps;
}

}  // namespace

void WindowSpec::validate() const {
    if (duration_s <= 0.0 || segment_len_s <= 0.0) {
        throw std::invalid_argument("WindowSpec: durations must be positive");
    }
    const double t = duration_s / segment_len_s;
    if (!near_integer(t)) {
        throw std::invalid_argument("WindowSpec: duration must be a multiple of segment length");
    }
}

std::size_t WindowSpec::segment_count() const {
    validate();
    return static_cast<std::size_t>(std::llround(duration_s / segment_len_s));
}

std::size_t pga_index(const StrongMotionRecord& rec) {
    const std::size_t n = rec.length();
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::fabs(rec.channels[0][i]);
        v = std::max(v, std::fabs(rec.channels[1][i]));
        v = std::max(v, std::fabs(rec.channels[2][i]));
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    return best;
}

SegmentSequence extract_window(const StrongMotionRecord& rec, const WindowSpec& spec,
                               std::optional<std::size_t> p_idx,
                               std::optional<std::size_t> s_idx) {
    spec.validate();
    const double seg_len_f = spec.segment_len_s * rec.sample_rate;
    if (!near_integer(seg_len_f) || seg_len_f < 1.0) {
        throw std::invalid_argument("extract_window: segment length is not a whole number of samples");
    }
    const std::size_t seg_len = static_cast<std::size_t>(std::llround(seg_len_f));
    const std::size_t t_count = spec.segment_count();
    const std::size_t window_len = seg_len * t_count;

    std::size_t anchor;
    if (spec.anchor == Anchor::PGA) {
        anchor = pga_index(rec);
    } else {
        if (!p_idx) throw std::runtime_error("extract_window: P-anchored window needs a P pick");
        anchor = *p_idx;
    }
    if (spec.include_ps_channel && (!p_idx || !s_idx)) {
        throw std::runtime_error("extract_window: P/S channel requested but picks missing");
    }

    const long start = static_cast<long>(anchor) - static_cast<long>(window_len / 2);
    const std::size_t channels = spec.include_ps_channel ? 4 : 3;
    const long n = static_cast<long>(rec.length());

    SegmentSequence seq;
    seq.record_id = rec.record_id;
    seq.station_id = rec.station_id;
    seq.channel_count = channels;
    seq.segment_len = seg_len;
    seq.segments.assign(t_count, std::vector<double>(channels * seg_len, 0.0));

    for (std::size_t t = 0; t < t_count; ++t) {
        auto& seg = seq.segments[t];
        for (std::size_t i = 0; i < seg_len; ++i) {
            const long src = start + static_cast<long>(t * seg_len + i);
            if (src < 0 || src >= n) continue;
            for (std::size_t c = 0; c < 3; ++c) {
                seg[c * seg_len + i] = rec.channels[c][static_cast<std::size_t>(src)];
            }
            if (channels == 4 && src >= static_cast<long>(*p_idx) &&
                src < static_cast<long>(*s_idx)) {
                seg[3 * seg_len + i] = 1.0;
            }
        }
    }
    return seq;
}

SegmentSequence normalize(SegmentSequence seq) {
    double peak = 0.0;
    for (const auto& seg : seq.segments) {
        for (std::size_t i = 0; i < 3 * seq.segment_len; ++i) {
            peak = std::max(peak, std::fabs(seg[i]));
        }
    }
    const double scale = 1.0 / (peak + 1e-8);
    for (auto& seg : seq.segments) {
        for (std::size_t i = 0; i < 3 * seq.segment_len; ++i) seg[i] *= scale;
    }
    seq.norm_scale = scale;
    return seq;
}

}  // namespace vsseq
