#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vsseq {

struct StationMeta {
    std::string station_id;
    double latitude = 0.0;
    double longitude = 0.0;
    std::optional<double> vs30;  // m/s; absent = unlabeled station
    int geology_code = 0;
    int lithology_code = 0;
};

// Three-component accelerogram, units cm/s^2 (gal).
// Channel order: 0 = E-W, 1 = N-S, 2 = U-D.
struct StrongMotionRecord {
    std::string record_id;
    std::string station_id;
    double sample_rate = 100.0;  // Hz
    std::array<std::vector<double>, 3> channels;
    std::optional<double> origin_time;
    std::optional<double> magnitude;
    std::optional<std::size_t> p_arrival_manual;
    std::optional<std::size_t> s_arrival_manual;

    std::size_t length() const { return channels[0].size(); }
};

struct Dataset {
    std::map<std::string, StationMeta> stations;
    std::vector<StrongMotionRecord> records;

    const StrongMotionRecord* find_record(const std::string& record_id) const;
    const StationMeta& station_of(const StrongMotionRecord& rec) const;
};

// Throws std::runtime_error naming the offending station/record on any
// invariant violation (unknown station, unequal channel lengths, bad picks,
// out-of-range coordinates, non-positive vs30 or sample_rate).
void validate_dataset(const Dataset& ds);

}  // namespace vsseq
