#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vsseq/preprocess.hpp"
#include "vsseq/records.hpp"

namespace vsseq {

struct PickResult {
    std::string record_id;
    std::size_t p_idx = 0;
    std::size_t s_idx = 0;
    double snr_db = 0.0;
    AnnotationSource source = AnnotationSource::MANUAL;
};

struct StaLtaParams {
    double sta_s = 0.5;
    double lta_s = 5.0;
    double trigger_ratio = 4.0;
};

// Classic STA/LTA trigger. P pick: first sample where the causal short/long
// energy ratio on the vertical channel exceeds trigger_ratio; S pick: same
// test after P on the summed horizontal energy. snr_db compares the 2 s
// after P against the 2 s before. Returns nullopt when the ratio never
// triggers (record then sits out the AUTO experiments).
std::optional<PickResult> sta_lta_pick(const StrongMotionRecord& rec,
                                       const StaLtaParams& params = {});

// CSV "record_id,p_idx,s_idx"; optional extra columns snr_db,source.
// Rows must resolve to known records and satisfy 0 <= p < s < length.
std::vector<PickResult> load_manual_picks(const std::string& path, const Dataset& ds);

void write_picks_csv(const std::string& path, const std::vector<PickResult>& picks);

// Lookup table feeding the experiment pipeline.
struct PickSet {
    std::map<std::string, PickResult> manual;
    std::map<std::string, PickResult> automatic;

    const PickResult* find(const std::string& record_id, AnnotationSource src) const {
        const auto& m = src == AnnotationSource::MANUAL ? manual : automatic;
        auto it = m.find(record_id);
        return it == m.end() ? nullptr : &it->second;
    }
    void insert(PickResult pr) {
        auto& m = pr.source == AnnotationSource::MANUAL ? manual : automatic;
        m[pr.record_id] = std::move(pr);
    }
};

// Manual picks from the records' embedded annotations plus auto picks from
// the STA/LTA trigger. no_trigger_count reports the excluded records.
PickSet build_pick_set(const Dataset& ds, const StaLtaParams& params = {},
                       std::size_t* no_trigger_count = nullptr);

}  // namespace vsseq
