#include "vsseq/dataset_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <stdexcept>

#include "vsseq/fsutil.hpp"

namespace vsseq {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> read_f32_channel(const std::string& raw, std::size_t channel, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        float f;
        std::memcpy(&f, raw.data() + (channel * n + i) * sizeof(float), sizeof(float));
        out[i] = static_cast<double>(f);
    }
    return out;
}

StationMeta parse_station(const json& j) {
    StationMeta st;
    st.station_id = j.at("station_id").get<std::string>();
    st.latitude = j.at("latitude").get<double>();
    st.longitude = j.at("longitude").get<double>();
    if (j.contains("vs30") && !j["vs30"].is_null()) st.vs30 = j["vs30"].get<double>();
    st.geology_code = j.value("geology_code", 0);
    st.lithology_code = j.value("lithology_code", 0);
    return st;
}

StrongMotionRecord parse_record(const json& j, const fs::path& manifest_dir) {
    StrongMotionRecord rec;
    rec.record_id = j.at("record_id").get<std::string>();
    rec.station_id = j.at("station_id").get<std::string>();
    rec.sample_rate = j.at("sample_rate").get<double>();
    if (j.contains("origin_time")) rec.origin_time = j["origin_time"].get<double>();
    if (j.contains("magnitude")) rec.magnitude = j["magnitude"].get<double>();
    if (j.contains("p_arrival_manual_idx"))
        rec.p_arrival_manual = j["p_arrival_manual_idx"].get<std::size_t>();
    if (j.contains("s_arrival_manual_idx"))
        rec.s_arrival_manual = j["s_arrival_manual_idx"].get<std::size_t>();

    if (j.contains("channels")) {
        const auto& ch = j["channels"];
        if (!ch.is_array() || ch.size() != 3) {
            throw std::runtime_error("record " + rec.record_id + ": expected 3 channel arrays");
        }
        for (std::size_t c = 0; c < 3; ++c) {
            rec.channels[c] = ch[c].get<std::vector<double>>();
        }
    } else if (j.contains("data_file")) {
        const fs::path data_path = manifest_dir / j["data_file"].get<std::string>();
        const std::string raw = read_file(data_path.string());
        if (raw.size() % (3 * sizeof(float)) != 0) {
            throw std::runtime_error("record " + rec.record_id + ": data file " +
                                     data_path.string() + " is not a [3 x n] float32 array");
        }
        const std::size_t n = raw.size() / (3 * sizeof(float));
        for (std::size_t c = 0; c < 3; ++c) rec.channels[c] = read_f32_channel(raw, c, n);
    } else {
        throw std::runtime_error("record " + rec.record_id + ": neither channels nor data_file");
    }
    return rec;
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + std::min(byte, text.size()), '\n'));
}

json station_to_json(const StationMeta& st) {
    json j;
    j["station_id"] = st.station_id;
    j["latitude"] = st.latitude;
    j["longitude"] = st.longitude;
    if (st.vs30) j["vs30"] = *st.vs30;
    j["geology_code"] = st.geology_code;
    j["lithology_code"] = st.lithology_code;
    return j;
}

}  // namespace

Dataset load_dataset(const std::string& manifest_path) {
    const std::string text = read_file(manifest_path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("parse error in " + manifest_path + " at line " +
                                 std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
    }

    Dataset ds;
    const fs::path dir = fs::path(manifest_path).parent_path();
    for (const auto& js : j.at("stations")) {
        StationMeta st = parse_station(js);
        ds.stations.emplace(st.station_id, std::move(st));
    }
    for (const auto& jr : j.at("records")) {
        ds.records.push_back(parse_record(jr, dir));
    }
    validate_dataset(ds);
    return ds;
}

void write_dataset(const Dataset& ds, const std::string& manifest_path, bool inline_channels) {
    const fs::path dir = fs::path(manifest_path).parent_path();
    json j;
    j["stations"] = json::array();
    for (const auto& [id, st] : ds.stations) j["stations"].push_back(station_to_json(st));

    j["records"] = json::array();
    for (const auto& rec : ds.records) {
        json jr;
        jr["record_id"] = rec.record_id;
        jr["station_id"] = rec.station_id;
        jr["sample_rate"] = rec.sample_rate;
        if (rec.origin_time) jr["origin_time"] = *rec.origin_time;
        if (rec.magnitude) jr["magnitude"] = *rec.magnitude;
        if (rec.p_arrival_manual) jr["p_arrival_manual_idx"] = *rec.p_arrival_manual;
        if (rec.s_arrival_manual) jr["s_arrival_manual_idx"] = *rec.s_arrival_manual;

        if (inline_channels) {
            json ch = json::array();
            for (std::size_t c = 0; c < 3; ++c) ch.push_back(rec.channels[c]);
            jr["channels"] = std::move(ch);
        } else {
            const std::string rel = "waves/" + rec.record_id + ".f32";
            std::string raw;
            raw.reserve(3 * rec.length() * sizeof(float));
            for (std::size_t c = 0; c < 3; ++c) {
                for (double v : rec.channels[c]) {
                    const float f = static_cast<float>(v);
                    raw.append(reinterpret_cast<const char*>(&f), sizeof(float));
                }
            }
            atomic_write((dir / rel).string(), raw);
            jr["data_file"] = rel;
        }
        j["records"].push_back(std::move(jr));
    }
    atomic_write(manifest_path, j.dump(2) + "\n");
}

}  // namespace vsseq
