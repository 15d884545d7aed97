#include "vsseq/synth.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "vsseq/rng.hpp"

namespace vsseq {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> smoothed_noise(Rng& rng, std::size_t n, double sigma) {
    std::vector<double> raw(n);
    for (double& v : raw) v = sigma * rng.normal();
    // 3-point moving average band-limits the noise floor.
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = raw[i];
        int c = 1;
        if (i > 0) { s += raw[i - 1]; ++c; }
        if (i + 1 < n) { s += raw[i + 1]; ++c; }
        out[i] = s / c;
    }
    return out;
}

}  // namespace

Dataset synthesize_dataset(std::uint64_t seed, std::size_t n_stations,
                           std::size_t records_per_station, double duration_s,
                           double sample_rate) {
    if (n_stations < 1 || records_per_station < 1 || duration_s <= 0.0 || sample_rate <= 0.0) {
        throw std::invalid_argument("synthesize_dataset: all counts must be >= 1");
    }
    Rng rng(seed);
    Dataset ds;
    const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    const double dt = 1.0 / sample_rate;

    std::size_t record_counter = 0;
    for (std::size_t si = 0; si < n_stations; ++si) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "ST%04zu", si);
        StationMeta st;
        st.station_id = buf;
        st.latitude = rng.uniform(36.0, 42.0);
        st.longitude = rng.uniform(26.0, 45.0);
        st.vs30 = rng.uniform(180.0, 1500.0);
        st.geology_code = static_cast<int>(rng.bounded(6));
        st.lithology_code = static_cast<int>(rng.bounded(8));
        ds.stations.emplace(st.station_id, st);

        const double f0 = *st.vs30 / 120.0;  // quarter-wavelength: Vs / (4 * 30 m)

        for (std::size_t ri = 0; ri < records_per_station; ++ri) {
            StrongMotionRecord rec;
            std::snprintf(buf, sizeof(buf), "R%06zu", record_counter++);
            rec.record_id = buf;
            rec.station_id = st.station_id;
            rec.sample_rate = sample_rate;
            rec.magnitude = rng.uniform(3.0, 6.5);

            const double p_t = duration_s * rng.uniform(0.15, 0.30);
            const double s_t = p_t + duration_s * rng.uniform(0.08, 0.16);
            const double phase0 = rng.uniform(0.0, 2.0 * kPi);
            const double phase1 = rng.uniform(0.0, 2.0 * kPi);
            const double s_amp = rng.uniform(50.0, 80.0);

            for (std::size_t c = 0; c < 3; ++c) rec.channels[c] = smoothed_noise(rng, n, 0.6);

            for (std::size_t i = 0; i < n; ++i) {
                const double t = i * dt;
                if (t >= p_t) {
                    // High-frequency P burst, mostly vertical first motion.
                    const double tp = t - p_t;
                    const double p = 6.0 * std::exp(-tp / 1.5) * std::sin(2.0 * kPi * 12.0 * tp);
                    rec.channels[2][i] += p;
                    rec.channels[0][i] += 0.08 * p;
                    rec.channels[1][i] += 0.08 * p;
                }
                if (t >= s_t) {
                    // Site resonance carried by the S phase; envelope rises from
                    // zero so the PGA lands strictly after the onset.
                    const double ts = t - s_t;
                    const double env =
                        (1.0 - std::exp(-ts / 0.15)) * std::exp(-ts / (duration_s * 0.12));
                    const double w = 2.0 * kPi * f0 * ts;
                    rec.channels[0][i] += s_amp * env * std::sin(w + phase0);
                    rec.channels[1][i] += 0.9 * s_amp * env * std::sin(w + phase1);
                    rec.channels[2][i] += 0.35 * s_amp * env * std::sin(w + 0.5 * (phase0 + phase1));
                }
            }

            rec.p_arrival_manual = static_cast<std::size_t>(std::llround(p_t * sample_rate));
            rec.s_arrival_manual = static_cast<std::size_t>(std::llround(s_t * sample_rate));
            ds.records.push_back(std::move(rec));
        }
    }
    validate_dataset(ds);
    return ds;
}

}  // namespace vsseq
