#pragma once

// Empirical boundary extraction. Embedded samples carry their max severity
// level; an inverse-distance-weighted field interpolates level values across
// the embedding space. Each level's boundary floor is the 5th percentile of
// its samples' leave-one-out IDW scores, mapped from severity units [1,4]
// onto [0,1] by t(s) = (4 - s) / 3 (level 1 -> 1, level 4 -> 0).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cprt/error.hpp"
#include "cprt/parallel.hpp"
#include "cprt/taxonomy.hpp"

namespace cprt {

struct EmbeddedSample {
    std::vector<double> z; // unit embedding
    SeverityLevel level = SeverityLevel::L4;
};

inline constexpr double kIdwEps = 1e-8;

// Weighted mean of reference levels, weights 1 / (squared distance + eps).
// `exclude` drops one reference by index (leave-one-out at training points,
// where the self-weight 1/eps would otherwise swamp every neighbor).
inline double idw_score(const std::vector<double>& z,
                        const std::vector<EmbeddedSample>& refs,
                        double eps = kIdwEps,
                        std::optional<std::size_t> exclude = std::nullopt) {
    double weight_sum = 0.0, value_sum = 0.0;
    for (std::size_t j = 0; j < refs.size(); ++j) {
        if (exclude && *exclude == j) continue;
        if (refs[j].z.size() != z.size()) {
            raise(errc::length_mismatch, "embedding dimensions differ");
        }
        double dist_sq = 0.0;
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double d = z[k] - refs[j].z[k];
            dist_sq += d * d;
        }
        const double w = 1.0 / (dist_sq + eps);
        weight_sum += w;
        value_sum += w * static_cast<double>(level_index(refs[j].level));
    }
    if (weight_sum == 0.0) {
        raise(errc::empty_references, "no reference samples");
    }
    return value_sum / weight_sum;
}

// Percentile with linear interpolation between order statistics at rank
// p/100 * (n - 1).
inline double percentile_linear(std::vector<double> values, double p) {
    if (values.empty()) raise(errc::empty_input, "percentile of no values");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values.front();
    const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

struct BoundaryDerivation {
    BoundarySet boundaries;
    std::array<double, 4> raw_thresholds{};   // t(s) per level, unforced
    std::array<double, 4> percentile_scores{}; // severity units [1,4]
    std::array<std::size_t, 4> samples_per_level{};
    double percentile = 5.0;
    double eps = kIdwEps;
};

// Per-level leave-one-out IDW scores -> 5th percentile -> normalized floor.
// Level 4's floor is forced to 0 and level 1's ceiling to 1; the measured
// thresholds are kept in the result for inspection.
inline BoundaryDerivation extract_boundaries(const std::vector<EmbeddedSample>& refs,
                                             double percentile = 5.0,
                                             double eps = kIdwEps,
                                             int threads = 1) {
    std::array<std::vector<std::size_t>, 4> by_level;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        by_level[static_cast<std::size_t>(level_index(refs[i].level) - 1)]
            .push_back(i);
    }
    for (std::size_t l = 0; l < 4; ++l) {
        if (by_level[l].empty()) {
            raise(errc::missing_level,
                  "no samples at level " + std::to_string(l + 1));
        }
    }

    std::vector<double> loo(refs.size(), 0.0);
    parallel_for(refs.size(), threads, [&](std::size_t i) {
        loo[i] = idw_score(refs[i].z, refs, eps, i);
    });

    BoundaryDerivation result;
    result.percentile = percentile;
    result.eps = eps;
    for (std::size_t l = 0; l < 4; ++l) {
        std::vector<double> scores;
        scores.reserve(by_level[l].size());
        for (std::size_t idx : by_level[l]) scores.push_back(loo[idx]);
        result.samples_per_level[l] = scores.size();
        result.percentile_scores[l] = percentile_linear(std::move(scores), percentile);
        result.raw_thresholds[l] = (4.0 - result.percentile_scores[l]) / 3.0;
    }

    const double t1 = result.raw_thresholds[0];
    const double t2 = result.raw_thresholds[1];
    const double t3 = result.raw_thresholds[2];
    if (!(1.0 > t1 && t1 > t2 && t2 > t3 && t3 > 0.0)) {
        raise(errc::non_monotone_thresholds,
              "derived thresholds (" + std::to_string(t1) + ", " +
                  std::to_string(t2) + ", " + std::to_string(t3) +
                  ") are not strictly ordered inside (0, 1)");
    }
    result.boundaries = BoundarySet::from_lower_edges({t1, t2, t3, 0.0});
    return result;
}

struct Projection2D {
    std::vector<std::array<double, 2>> points; // aligned with input refs
    std::array<double, 2> explained_variance{};
};

namespace detail {

// Cyclic Jacobi eigen decomposition of a symmetric matrix (row-major n x n).
// Returns eigenvalues; `vectors` receives eigenvectors as columns.
inline std::vector<double> jacobi_eigen(std::vector<double> a, std::size_t n,
                                        std::vector<double>& vectors) {
    vectors.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) vectors[i * n + i] = 1.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vectors[k * n + p];
                    const double vkq = vectors[k * n + q];
                    vectors[k * n + p] = c * vkp - s * vkq;
                    vectors[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<double> eigenvalues(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a[i * n + i];
    return eigenvalues;
}

} // namespace detail

// Projection onto the two leading principal components of the embeddings.
// Component signs are fixed by making each column's largest-magnitude entry
// positive, so the output is deterministic.
inline Projection2D pca_2d(const std::vector<EmbeddedSample>& refs) {
    if (refs.empty()) raise(errc::empty_input, "no samples to project");
    const std::size_t n = refs.size();
    const std::size_t dim = refs.front().z.size();
    std::vector<double> mean(dim, 0.0);
    for (const auto& r : refs) {
        if (r.z.size() != dim) {
            raise(errc::length_mismatch, "embedding dimensions differ");
        }
        for (std::size_t k = 0; k < dim; ++k) mean[k] += r.z[k];
    }
    for (double& v : mean) v /= static_cast<double>(n);

    std::vector<double> cov(dim * dim, 0.0);
    for (const auto& r : refs) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double di = r.z[i] - mean[i];
            for (std::size_t j = i; j < dim; ++j) {
                cov[i * dim + j] += di * (r.z[j] - mean[j]);
            }
        }
    }
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j) {
            cov[i * dim + j] /= static_cast<double>(n);
            cov[j * dim + i] = cov[i * dim + j];
        }
    }

    std::vector<double> vectors;
    std::vector<double> eigenvalues = detail::jacobi_eigen(cov, dim, vectors);
    std::array<std::size_t, 2> top{0, 0};
    for (int c = 0; c < 2; ++c) {
        double best = -1.0;
        for (std::size_t i = 0; i < dim; ++i) {
            if (c == 1 && i == top[0]) continue;
            if (eigenvalues[i] > best) {
                best = eigenvalues[i];
                top[static_cast<std::size_t>(c)] = i;
            }
        }
    }

    std::array<std::vector<double>, 2> axes;
    for (int c = 0; c < 2; ++c) {
        auto& axis = axes[static_cast<std::size_t>(c)];
        axis.resize(dim);
        std::size_t arg_max = 0;
        for (std::size_t k = 0; k < dim; ++k) {
            axis[k] = vectors[k * dim + top[static_cast<std::size_t>(c)]];
            if (std::abs(axis[k]) > std::abs(axis[arg_max])) arg_max = k;
        }
        if (axis[arg_max] < 0.0) {
            for (double& v : axis) v = -v;
        }
    }

    Projection2D projection;
    projection.explained_variance = {eigenvalues[top[0]], eigenvalues[top[1]]};
    projection.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                s += (refs[i].z[k] - mean[k]) * axes[static_cast<std::size_t>(c)][k];
            }
            projection.points[i][static_cast<std::size_t>(c)] = s;
        }
    }
    return projection;
}

} // namespace cprt
