#include "vsseq/records.hpp"

#include <stdexcept>

namespace vsseq {

const StrongMotionRecord* Dataset::find_record(const std::string& record_id) const {
    for (const auto& r : records) {
        if (r.record_id == record_id) return &r;
    }
    return nullptr;
}

const StationMeta& Dataset::station_of(const StrongMotionRecord& rec) const {
    auto it = stations.find(rec.station_id);
    if (it == stations.end()) {
        throw std::runtime_error("record " + rec.record_id + " references unknown station " +
                                 rec.station_id);
    }
    return it->second;
}

void validate_dataset(const Dataset& ds) {
    for (const auto& [id, st] : ds.stations) {
        if (st.station_id != id) {
            throw std::runtime_error("station map key mismatch for " + id);
        }
        if (st.latitude < -90.0 || st.latitude > 90.0) {
            throw std::runtime_error("station " + id + ": latitude out of range");
        }
        if (st.longitude < -180.0 || st.longitude > 180.0) {
            throw std::runtime_error("station " + id + ": longitude out of range");
        }
        if (st.vs30 && *st.vs30 <= 0.0) {
            throw std::runtime_error("station " + id + ": vs30 must be positive");
        }
    }
    for (const auto& r : ds.records) {
        if (ds.stations.find(r.station_id) == ds.stations.end()) {
            throw std::runtime_error("record " + r.record_id + " references unknown station " +
                                     r.station_id);
        }
        if (r.sample_rate <= 0.0) {
            throw std::runtime_error("record " + r.record_id + ": sample_rate must be positive");
        }
        const std::size_t n = r.channels[0].size();
        if (n == 0) {
            throw std::runtime_error("record " + r.record_id + ": empty channels");
        }
        if (r.channels[1].size() != n || r.channels[2].size() != n) {
            throw std::runtime_error("record " + r.record_id + ": channels have unequal length");
        }
        if (r.p_arrival_manual || r.s_arrival_manual) {
            if (!r.p_arrival_manual || !r.s_arrival_manual) {
                throw std::runtime_error("record " + r.record_id +
                                         ": P and S picks must be given together");
            }
            if (!(*r.p_arrival_manual < *r.s_arrival_manual && *r.s_arrival_manual < n)) {
                throw std::runtime_error("record " + r.record_id +
                                         ": picks violate 0 <= p < s < length");
            }
        }
    }
}

}  // namespace vsseq
