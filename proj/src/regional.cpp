#include "vsseq/regional.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vsseq/rng.hpp"

namespace vsseq {

namespace {

double sq_dist(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

std::vector<StationFeature> build_station_features(const Dataset& ds, bool labeled_only) {
    std::vector<StationFeature> out;
    for (const auto& [id, st] : ds.stations) {
        if (labeled_only && !st.vs30) continue;
        StationFeature f;
        f.station_id = id;
        f.v = {st.latitude, st.longitude, static_cast<double>(st.geology_code),
               static_cast<double>(st.lithology_code)};
        out.push_back(std::move(f));
    }
    if (out.empty()) return out;

    for (std::size_t d = 0; d < 4; ++d) {
        double mean = 0.0;
        for (const auto& f : out) mean += f.v[d];
        mean /= static_cast<double>(out.size());
        double var = 0.0;
        for (const auto& f : out) var += (f.v[d] - mean) * (f.v[d] - mean);
        var /= static_cast<double>(out.size());
        const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
        for (auto& f : out) f.v[d] = (f.v[d] - mean) / sd;
    }
    return out;
}

KmeansResult kmeans(const std::vector<StationFeature>& features, std::size_t k,
                    std::uint64_t seed, std::size_t max_iter) {
    const std::size_t n = features.size();
    if (k < 1 || k > n) throw std::invalid_argument("kmeans: need 1 <= k <= number of stations");

    Rng rng(seed);
    std::vector<std::array<double, 4>> centers;
    centers.reserve(k);

    // k-means++ seeding
    centers.push_back(features[rng.bounded(n)].v);
    std::vector<double> d2(n);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, sq_dist(features[i].v, c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                target -= d2[i];
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.bounded(n);
        }
        centers.push_back(features[pick].v);
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> trace;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        bool changed = iter == 0;
        double pass_inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = sq_dist(features[i].v, centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            pass_inertia += best_d;
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        trace.push_back(pass_inertia);
        if (!changed && iter > 0) break;

        std::vector<std::array<double, 4>> sums(k, {0, 0, 0, 0});
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < 4; ++d) sums[assign[i]][d] += features[i].v[d];
            ++counts[assign[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed an empty cluster from the farthest point.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = sq_dist(features[i].v, centers[assign[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centers[c] = features[far].v;
            } else {
                for (std::size_t d = 0; d < 4; ++d) {
                    centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
                }
            }
        }
    }

    KmeansResult result;
    result.k = k;
    result.centers = centers;
    result.inertia_trace = std::move(trace);
    for (std::size_t i = 0; i < n; ++i) {
        result.assignments[features[i].station_id] = assign[i];
        result.inertia += sq_dist(features[i].v, centers[assign[i]]);
    }
    return result;
}

KmeansResult kmeans_best(const std::vector<StationFeature>& features, std::size_t k,
                         std::uint64_t seed, std::size_t restarts) {
    KmeansResult best;
    for (std::size_t r = 0; r < restarts; ++r) {
        KmeansResult cur = kmeans(features, k, seed + r * 7919ULL);
        if (r == 0 || cur.inertia < best.inertia) best = std::move(cur);
    }
    return best;
}

ElbowResult elbow_select(const std::vector<StationFeature>& features, std::size_t k_min,
                         std::size_t k_max, std::uint64_t seed) {
    if (k_min < 1 || k_min > k_max || k_max > features.size()) {
        throw std::invalid_argument("elbow_select: bad k range");
    }
    ElbowResult result;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        result.inertia_curve.emplace_back(k, kmeans_best(features, k, seed).inertia);
    }
    if (k_min == k_max) {
        result.selected_k = k_min;
        return result;
    }

    const double x0 = static_cast<double>(result.inertia_curve.front().first);
    const double y0 = result.inertia_curve.front().second;
    const double x1 = static_cast<double>(result.inertia_curve.back().first);
    const double y1 = result.inertia_curve.back().second;
    const double chord = std::hypot(x1 - x0, y1 - y0);

    if (std::fabs(y1 - y0) < 1e-12) {
        result.flat_warning = true;
        result.selected_k = k_min;
        return result;
    }

    double best_d = -1.0;
    result.selected_k = k_min;
    for (const auto& [k, inertia] : result.inertia_curve) {
        const double x = static_cast<double>(k);
        // Perpendicular distance from (x, inertia) to the endpoint chord.
        const double d =
            std::fabs((y1 - y0) * x - (x1 - x0) * inertia + x1 * y0 - y1 * x0) / chord;
        if (d > best_d + 1e-12) {
            best_d = d;
            result.selected_k = k;
        }
    }
    return result;
}

std::map<std::size_t, ClusterErrorStat> cluster_errors(const KmeansResult& clusters,
                                                       const MetricsReport& metrics,
                                                       std::size_t* skipped) {
    std::map<std::size_t, std::vector<double>> ratios;
    for (std::size_t c = 0; c < clusters.k; ++c) ratios[c] = {};

    std::size_t missing = 0;
    for (const auto& [station_id, cluster] : clusters.assignments) {
        auto it = metrics.per_station.find(station_id);
        if (it == metrics.per_station.end()) {
            ++missing;
            continue;
        }
        ratios[cluster].push_back(std::log10(it->second.second / it->second.first));
    }
    if (skipped) *skipped = missing;

    std::map<std::size_t, ClusterErrorStat> out;
    for (const auto& [cluster, rs] : ratios) {
        ClusterErrorStat st;
        st.station_count = rs.size();
        if (!rs.empty()) {
            st.available = true;
            double mean = 0.0, mean_abs = 0.0;
            for (double r : rs) {
                mean += r;
                mean_abs += std::fabs(r);
            }
            mean /= static_cast<double>(rs.size());
            mean_abs /= static_cast<double>(rs.size());
            double var = 0.0;
            for (double r : rs) var += (std::fabs(r) - mean_abs) * (std::fabs(r) - mean_abs);
            st.log_ratio_mean = mean;
            st.abs_log_ratio_mean = mean_abs;
            st.abs_log_ratio_std = std::sqrt(var / static_cast<double>(rs.size()));
        }
        out[cluster] = st;
    }
    return out;
}

}  // namespace vsseq
