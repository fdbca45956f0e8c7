#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "co2cast/error.hpp"
#include "co2cast/rng.hpp"
#include "co2cast/series.hpp"

namespace co2cast {

/// Pattern-sequence forecasting: label daily blocks by k-means cluster, match
/// the last W labels against history, forecast the mean of the successor
/// blocks. DPSF applies the same to the first-differenced series.
struct PsfSpec {
    int window = 4;       ///< W, pattern length in blocks
    int clusters = 3;     ///< K, label alphabet size
    std::uint64_t seed = 0;
    int block_len = 24;   ///< daily blocks for hourly data

    void validate() const {
        if (window < 1 || clusters < 2 || block_len < 1) raise(errc::config_error, "invalid PSF spec");
    }
};

namespace psf_detail {

struct Clustering {
    std::vector<int> labels;
    std::vector<std::vector<double>> centroids;
    double inertia = std::numeric_limits<double>::infinity();
    bool ok = false;
};

inline double sq_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// One seeded k-means run (k-means++ init, Lloyd iterations). Fails when a
/// cluster empties out.
inline Clustering kmeans_once(const std::vector<std::vector<double>>& points, int k, Rng& rng) {
    const std::size_t n = points.size();
    const std::size_t dim = points.front().size();
    Clustering result;

    // k-means++ seeding; zero total weight falls back to uniform choice.
    std::vector<std::vector<double>> centroids;
    centroids.push_back(points[rng.next_below(n)]);
    std::vector<double> d2(n);
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, sq_distance(points[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.next_below(n);
        } else {
            const double target = rng.next_double() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(points[pick]);
    }

    std::vector<int> labels(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best_label = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double dist = sq_distance(points[i], centroids[static_cast<std::size_t>(c)]);
                if (dist < best_dist) {
                    best_dist = dist;
                    best_label = c;
                }
            }
            if (labels[i] != best_label) {
                labels[i] = best_label;
                moved = true;
            }
        }
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[static_cast<std::size_t>(labels[i])];
            for (std::size_t j = 0; j < dim; ++j) sums[static_cast<std::size_t>(labels[i])][j] += points[i][j];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) return result; // empty cluster: run failed
            for (std::size_t j = 0; j < dim; ++j) {
                centroids[static_cast<std::size_t>(c)][j] =
                    sums[static_cast<std::size_t>(c)][j] / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            }
        }
        if (!moved && iter > 0) break;
    }

    result.labels = std::move(labels);
    result.centroids = std::move(centroids);
    result.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        result.inertia += sq_distance(points[i], result.centroids[static_cast<std::size_t>(result.labels[i])]);
    }
    result.ok = true;
    return result;
}

/// Best of 25 seeded restarts; reduces K when every restart degenerates.
inline Clustering cluster_blocks(const std::vector<std::vector<double>>& points, int k,
                                 std::uint64_t seed) {
    k = std::min<int>(k, static_cast<int>(points.size()));
    for (int kk = k; kk >= 1; --kk) {
        Clustering best;
        for (int restart = 0; restart < 25; ++restart) {
            Rng rng(derive_stream(seed, "kmeans", static_cast<std::uint64_t>(restart)));
            Clustering run = kmeans_once(points, kk, rng);
            if (run.ok && run.inertia < best.inertia) best = std::move(run);
        }
        if (best.ok) return best;
    }
    raise(errc::degenerate_clustering, "k-means failed for every cluster count");
}

} // namespace psf_detail

/// PSF forecast. Blocks are aligned to the series end so the forecast starts
/// at the boundary of the last complete block. The mean successor block is
/// tiled or truncated to the horizon; an unmatched pattern shrinks W.
inline std::vector<double> fit_forecast_psf_raw(const std::vector<double>& values, const PsfSpec& spec,
                                                std::size_t horizon) {
    spec.validate();
    if (horizon < 1) raise(errc::out_of_range, "horizon must be >= 1");
    const auto block = static_cast<std::size_t>(spec.block_len);
    const std::size_t n_blocks = values.size() / block;
    if (n_blocks < static_cast<std::size_t>(spec.window) + 2) {
        raise(errc::series_too_short, "need at least W + 2 day blocks");
    }
    const std::size_t offset = values.size() - n_blocks * block; // end-aligned partition

    std::vector<std::vector<double>> points(n_blocks, std::vector<double>(block));
    for (std::size_t b = 0; b < n_blocks; ++b) {
        for (std::size_t j = 0; j < block; ++j) points[b][j] = values[offset + b * block + j];
    }

    const psf_detail::Clustering clustering =
        psf_detail::cluster_blocks(points, spec.clusters, spec.seed);
    const std::vector<int>& labels = clustering.labels;

    for (int w = std::min<int>(spec.window, static_cast<int>(n_blocks) - 1); w >= 1; --w) {
        const auto wu = static_cast<std::size_t>(w);
        // Query = last W labels; candidates need an observed successor block,
        // which also keeps the query position itself out of the match set.
        std::vector<std::size_t> successors;
        for (std::size_t j = 0; j + wu < n_blocks; ++j) {
            bool match = true;
            for (std::size_t i = 0; i < wu; ++i) {
                if (labels[j + i] != labels[n_blocks - wu + i]) {
                    match = false;
                    break;
                }
            }
            if (match) successors.push_back(j + wu);
        }
        if (successors.empty()) continue;

        std::vector<double> mean_block(block, 0.0);
        for (std::size_t s : successors) {
            for (std::size_t j = 0; j < block; ++j) mean_block[j] += points[s][j];
        }
        for (std::size_t j = 0; j < block; ++j) mean_block[j] /= static_cast<double>(successors.size());

        std::vector<double> out(horizon);
        for (std::size_t h = 0; h < horizon; ++h) out[h] = mean_block[h % block];
        return out;
    }
    raise(errc::series_too_short, "no label pattern match even at W = 1");
}

/// PSF on first differences, cumulatively integrated from the last level.
inline std::vector<double> forecast_dpsf_raw(const std::vector<double>& values, const PsfSpec& spec,
                                             std::size_t horizon) {
    if (values.size() < 2) raise(errc::series_too_short, "DPSF needs length >= 2");
    std::vector<double> diff(values.size() - 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) diff[i] = values[i + 1] - values[i];
    std::vector<double> step = fit_forecast_psf_raw(diff, spec, horizon);
    double level = values.back();
    for (std::size_t h = 0; h < horizon; ++h) {
        level += step[h];
        step[h] = level;
    }
    return step;
}

} // namespace co2cast
