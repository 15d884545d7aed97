#pragma once

#include <cstdint>

#include "vsseq/records.hpp"

namespace vsseq {

// Deterministic synthetic strong-motion dataset. Each station draws a Vs30
// uniformly from [180, 1500] m/s; each record is band-limited noise plus a
// low-amplitude high-frequency P burst on the vertical channel and a
// high-amplitude damped resonance at f0 = vs30 / 120 Hz (quarter-wavelength,
// 30 m layer) starting at the S onset. True onsets are stored as manual
// picks; peak ground acceleration always falls after the S onset.
Dataset synthesize_dataset(std::uint64_t seed, std::size_t n_stations,
                           std::size_t records_per_station, double duration_s = 60.0,
                           double sample_rate = 100.0);

}  // namespace vsseq
