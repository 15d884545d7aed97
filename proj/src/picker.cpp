#include "vsseq/picker.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vsseq/fsutil.hpp"

namespace vsseq {

namespace {

// First index >= from where the causal STA/LTA of the energy series exceeds
// ratio; npos if never.
std::size_t first_trigger(const std::vector<double>& energy, std::size_t nsta, std::size_t nlta,
                          double ratio, std::size_t from) {
    const std::size_t n = energy.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + energy[i];

    for (std::size_t t = std::max(from, nlta - 1); t < n; ++t) {
        const double sta = (prefix[t + 1] - prefix[t + 1 - nsta]) / nsta;
        const double lta = (prefix[t + 1] - prefix[t + 1 - nlta]) / nlta;
        if (sta > ratio * (lta + 1e-30)) return t;
    }
    return static_cast<std::size_t>(-1);
}

double mean_energy(const std::vector<double>& energy, long lo, long hi) {
    const long n = static_cast<long>(energy.size());
    lo = std::max(lo, 0L);
    hi = std::min(hi, n);
    if (hi <= lo) return 0.0;
    double s = 0.0;
    for (long i = lo; i < hi; ++i) s += energy[static_cast<std::size_t>(i)];
    return s / static_cast<double>(hi - lo);
}

}  // namespace

std::optional<PickResult> sta_lta_pick(const StrongMotionRecord& rec, const StaLtaParams& params) {
    if (!(params.lta_s > params.sta_s && params.sta_s > 0.0)) {
        throw std::invalid_argument("sta_lta_pick: need lta_s > sta_s > 0");
    }
    const std::size_t n = rec.length();
    const std::size_t nsta =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(params.sta_s * rec.sample_rate)));
    const std::size_t nlta =
        static_cast<std::size_t>(std::llround(params.lta_s * rec.sample_rate));
    if (nlta <= nsta || n <= nlta) {
        throw std::invalid_argument("sta_lta_pick: record shorter than the LTA window");
    }

    std::vector<double> vert(n), horiz(n);
    for (std::size_t i = 0; i < n; ++i) {
        vert[i] = rec.channels[2][i] * rec.channels[2][i];
        horiz[i] = rec.channels[0][i] * rec.channels[0][i] + rec.channels[1][i] * rec.channels[1][i];
    }

    const std::size_t npos = static_cast<std::size_t>(-1);
    const std::size_t p = first_trigger(vert, nsta, nlta, params.trigger_ratio, 0);
    if (p == npos) return std::nullopt;
    const std::size_t s = first_trigger(horiz, nsta, nlta, params.trigger_ratio, p + 1);
    if (s == npos) return std::nullopt;

    const long w = static_cast<long>(std::llround(2.0 * rec.sample_rate));
    const long pl = static_cast<long>(p);
    double pre = mean_energy(vert, pl - w, pl);
    double post = mean_energy(vert, pl, pl + w);

    PickResult pr;
    pr.record_id = rec.record_id;
    pr.p_idx = p;
    pr.s_idx = s;
    pr.snr_db = 10.0 * std::log10((post + 1e-30) / (pre + 1e-30));
    pr.source = AnnotationSource::AUTO;
    return pr;
}

std::vector<PickResult> load_manual_picks(const std::string& path, const Dataset& ds) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open picks file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty picks file: " + path);

    std::vector<PickResult> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string id, p_str, s_str;
        if (!std::getline(ss, id, ',') || !std::getline(ss, p_str, ',') ||
            !std::getline(ss, s_str, ',')) {
            throw std::runtime_error(path + " row " + std::to_string(row) + ": malformed line");
        }
        const StrongMotionRecord* rec = ds.find_record(id);
        if (!rec) {
            throw std::runtime_error(path + " row " + std::to_string(row) + ": unknown record " + id);
        }
        PickResult pr;
        pr.record_id = id;
        try {
            pr.p_idx = static_cast<std::size_t>(std::stoull(p_str));
            pr.s_idx = static_cast<std::size_t>(std::stoull(s_str));
        } catch (const std::exception&) {
            throw std::runtime_error(path + " row " + std::to_string(row) + ": bad index");
        }
        if (!(pr.p_idx < pr.s_idx)) {
            throw std::runtime_error(path + " row " + std::to_string(row) +
                                     ": requires p_idx < s_idx");
        }
        if (pr.s_idx >= rec->length()) {
            throw std::runtime_error(path + " row " + std::to_string(row) +
                                     ": pick index out of range for record " + id);
        }
        pr.source = AnnotationSource::MANUAL;
        out.push_back(std::move(pr));
    }
    return out;
}

void write_picks_csv(const std::string& path, const std::vector<PickResult>& picks) {
    std::ostringstream out;
    out << "record_id,p_idx,s_idx,snr_db,source\n";
    for (const auto& p : picks) {
        out << p.record_id << ',' << p.p_idx << ',' << p.s_idx << ',' << p.snr_db << ','
            << (p.source == AnnotationSource::MANUAL ? "manual" : "auto") << '\n';
    }
    atomic_write(path, out.str());
}

PickSet build_pick_set(const Dataset& ds, const StaLtaParams& params,
                       std::size_t* no_trigger_count) {
    PickSet picks;
    std::size_t dropped = 0;
    for (const auto& rec : ds.records) {
        if (rec.p_arrival_manual && rec.s_arrival_manual) {
            PickResult pr;
            pr.record_id = rec.record_id;
            pr.p_idx = *rec.p_arrival_manual;
            pr.s_idx = *rec.s_arrival_manual;
            pr.source = AnnotationSource::MANUAL;
            picks.insert(std::move(pr));
        }
        auto auto_pick = sta_lta_pick(rec, params);
        if (auto_pick) {
            picks.insert(std::move(*auto_pick));
        } else {
            ++dropped;
        }
    }
    if (no_trigger_count) *no_trigger_count = dropped;
    return picks;
}

}  // namespace vsseq
