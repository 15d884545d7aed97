#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vsseq/experiment.hpp"
#include "vsseq/records.hpp"

namespace vsseq {

// Standardized (zero-mean, unit-variance) station descriptor:
// [latitude, longitude, geology_code, lithology_code].
struct StationFeature {
    std::string station_id;
    std::array<double, 4> v{};
};

// labeled_only restricts to stations with a measured Vs30.
std::vector<StationFeature> build_station_features(const Dataset& ds, bool labeled_only = false);

struct KmeansResult {
    std::size_t k = 0;
    std::map<std::string, std::size_t> assignments;
    double inertia = 0.0;
    std::vector<std::array<double, 4>> centers;
    std::vector<double> inertia_trace;  // one entry per assignment pass
};

// k-means++ seeding + Lloyd iterations to an assignment fixpoint. Empty
// clusters are re-seeded from the farthest point. Deterministic per
// (features, k, seed).
KmeansResult kmeans(const std::vector<StationFeature>& features, std::size_t k,
                    std::uint64_t seed, std::size_t max_iter = 100);

// Best inertia over `restarts` seeded runs.
KmeansResult kmeans_best(const std::vector<StationFeature>& features, std::size_t k,
                         std::uint64_t seed, std::size_t restarts = 20);

struct ElbowResult {
    std::size_t selected_k = 0;
    std::vector<std::pair<std::size_t, double>> inertia_curve;
    bool flat_warning = false;
};

// Geometric elbow: k maximizing perpendicular distance from the inertia
// point to the chord between the curve's endpoints; ties and flat curves
// resolve toward smaller k.
ElbowResult elbow_select(const std::vector<StationFeature>& features, std::size_t k_min,
                         std::size_t k_max, std::uint64_t seed);

struct ClusterErrorStat {
    double log_ratio_mean = 0.0;  // signed; positive = systematic over-prediction
    double abs_log_ratio_mean = 0.0;
    double abs_log_ratio_std = 0.0;
    std::size_t station_count = 0;
    bool available = false;
};

// Per-cluster log-ratio errors over stations that have predictions in the
// metrics report; stations without predictions are skipped and counted.
std::map<std::size_t, ClusterErrorStat> cluster_errors(const KmeansResult& clusters,
                                                       const MetricsReport& metrics,
                                                       std::size_t* skipped = nullptr);

}  // namespace vsseq
