#pragma once

// Attribute embeddings learned with an ordinal triplet loss. Each multi-hot
// attribute vector maps to the normalized sum of its attribute rows; training
// pulls same-level samples together and pushes different-level samples apart
// with a margin that grows with the ordinal gap. Training is single-threaded
// and bit-deterministic for a given seed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cprt/error.hpp"
#include "cprt/rng.hpp"
#include "cprt/taxonomy.hpp"

namespace cprt {

struct EmbeddingHyperparams {
    int dim = 16;
    double base_margin = 0.10;   // m0
    double ordinal_scale = 0.12; // beta, scales |ma - mn|
    int epochs = 30;
    double learning_rate = 1e-3;
    int batch_size = 64;
    double weight_decay = 0.01; // decoupled, AdamW style
    uint64_t seed = 0;

    void validate() const {
        if (dim <= 0 || base_margin <= 0.0 || ordinal_scale <= 0.0 ||
            epochs <= 0 || learning_rate <= 0.0 || batch_size <= 0 ||
            weight_decay < 0.0) {
            raise(errc::invalid_weights, "hyperparameters must be positive");
        }
    }
};

struct EmbeddingModel {
    std::size_t attribute_count = 0;
    EmbeddingHyperparams hyperparams;
    std::vector<double> matrix; // row-major attribute_count x dim

    const double* row(std::size_t attribute) const {
        return matrix.data() + attribute * static_cast<std::size_t>(hyperparams.dim);
    }
};

struct TrainingSample {
    std::vector<uint8_t> bits; // multi-hot over registry attributes
    SeverityLevel level = SeverityLevel::L4;
};

// Most severe (smallest index) level among the set attributes.
inline SeverityLevel max_severity_level(const std::vector<uint8_t>& bits,
                                        const TaxonomyRegistry& registry) {
    if (bits.size() != registry.attribute_count()) {
        raise(errc::length_mismatch, "attribute vector length mismatch");
    }
    int best = 5;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) best = std::min(best, level_index(registry.attributes()[i].level));
    }
    if (best == 5) raise(errc::zero_vector, "no attribute present");
    return static_cast<SeverityLevel>(best);
}

inline std::vector<double> embed(const std::vector<uint8_t>& bits,
                                 const EmbeddingModel& model) {
    if (bits.size() != model.attribute_count) {
        raise(errc::length_mismatch, "attribute vector length mismatch");
    }
    const std::size_t dim = static_cast<std::size_t>(model.hyperparams.dim);
    std::vector<double> sum(dim, 0.0);
    bool any = false;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        any = true;
        const double* r = model.row(i);
        for (std::size_t k = 0; k < dim; ++k) sum[k] += r[k];
    }
    if (!any) raise(errc::zero_vector, "cannot embed the all-zero vector");
    double norm_sq = 0.0;
    for (double v : sum) norm_sq += v * v;
    if (norm_sq == 0.0) raise(errc::zero_vector, "attribute rows cancel exactly");
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& v : sum) v *= inv;
    return sum;
}

inline double dot(const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

inline double cosine_distance(const std::vector<double>& u,
                              const std::vector<double>& v) {
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uu += u[i] * u[i];
        vv += v[i] * v[i];
        uv += u[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) {
        raise(errc::zero_vector, "cosine distance of zero vector");
    }
    return 1.0 - uv / std::sqrt(uu * vv);
}

inline double triplet_loss(const std::vector<double>& za,
                           const std::vector<double>& zp,
                           const std::vector<double>& zn, int ma, int mn,
                           double m0, double beta) {
    const double margin = m0 + beta * std::abs(static_cast<double>(ma - mn));
    const double loss = cosine_distance(za, zp) - cosine_distance(za, zn) + margin;
    return loss > 0.0 ? loss : 0.0;
}

struct TrainResult {
    EmbeddingModel model;
    std::vector<double> epoch_mean_loss; // one entry per epoch
};

namespace detail {

struct EmbedState {
    std::vector<double> z; // unit embedding
    double norm = 0.0;     // pre-normalization length
};

inline EmbedState embed_state(const std::vector<uint8_t>& bits,
                              const std::vector<double>& matrix,
                              std::size_t dim) {
    EmbedState state;
    state.z.assign(dim, 0.0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        const double* r = matrix.data() + i * dim;
        for (std::size_t k = 0; k < dim; ++k) state.z[k] += r[k];
    }
    double norm_sq = 0.0;
    for (double v : state.z) norm_sq += v * v;
    state.norm = std::sqrt(norm_sq);
    if (state.norm == 0.0) raise(errc::zero_vector, "degenerate embedding");
    const double inv = 1.0 / state.norm;
    for (double& v : state.z) v *= inv;
    return state;
}

// Adds grad/norm, projected onto the unit sphere's tangent at z, to the
// matrix-gradient rows selected by bits.
inline void scatter_gradient(const std::vector<uint8_t>& bits,
                             const EmbedState& state,
                             const std::vector<double>& grad_z,
                             std::vector<double>& grad_matrix,
                             std::size_t dim) {
    const double zg = dot(state.z, grad_z);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        double* g = grad_matrix.data() + i * dim;
        for (std::size_t k = 0; k < dim; ++k) {
            g[k] += (grad_z[k] - zg * state.z[k]) / state.norm;
        }
    }
}

} // namespace detail

inline TrainResult train_embeddings(const std::vector<TrainingSample>& samples,
                                    const EmbeddingHyperparams& hyperparams,
                                    std::size_t attribute_count) {
    hyperparams.validate();
    if (samples.empty()) raise(errc::empty_input, "no training samples");

    std::array<std::vector<std::size_t>, 4> by_level;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].bits.size() != attribute_count) {
            raise(errc::length_mismatch,
                  "sample " + std::to_string(i) + " has wrong vector length");
        }
        bool any = false;
        for (uint8_t b : samples[i].bits) any = any || b != 0;
        if (!any) {
            raise(errc::zero_vector,
                  "sample " + std::to_string(i) + " has no attributes");
        }
        by_level[static_cast<std::size_t>(level_index(samples[i].level) - 1)]
            .push_back(i);
    }
    int levels_present = 0;
    for (const auto& bucket : by_level) levels_present += bucket.empty() ? 0 : 1;
    if (levels_present < 2) {
        raise(errc::degenerate_dataset,
              "triplet training needs at least two severity levels");
    }

    const std::size_t dim = static_cast<std::size_t>(hyperparams.dim);
    TrainResult result;
    result.model.attribute_count = attribute_count;
    result.model.hyperparams = hyperparams;
    result.model.matrix.resize(attribute_count * dim);

    DeterministicRng rng(derive_seed(hyperparams.seed, 0xE5BEDull));
    for (double& v : result.model.matrix) v = 0.1 * rng.next_normal();

    // AdamW state
    std::vector<double> m(result.model.matrix.size(), 0.0);
    std::vector<double> v(result.model.matrix.size(), 0.0);
    std::vector<double> grad(result.model.matrix.size(), 0.0);
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    int64_t step = 0;

    // Negative pool per level: every sample of a different level.
    std::array<std::vector<std::size_t>, 4> negatives;
    for (std::size_t l = 0; l < 4; ++l) {
        for (std::size_t o = 0; o < 4; ++o) {
            if (o == l) continue;
            negatives[l].insert(negatives[l].end(), by_level[o].begin(),
                                by_level[o].end());
        }
    }

    const std::size_t triplets_per_epoch = samples.size();
    for (int epoch = 0; epoch < hyperparams.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::size_t produced = 0;
        while (produced < triplets_per_epoch) {
            const std::size_t batch = std::min(
                static_cast<std::size_t>(hyperparams.batch_size),
                triplets_per_epoch - produced);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t b = 0; b < batch; ++b) {
                const std::size_t anchor = rng.uniform_index(samples.size());
                const std::size_t li = static_cast<std::size_t>(
                    level_index(samples[anchor].level) - 1);
                const auto& peers = by_level[li];
                std::size_t positive = anchor;
                if (peers.size() > 1) {
                    std::size_t pick = rng.uniform_index(peers.size() - 1);
                    std::size_t anchor_pos = 0;
                    while (peers[anchor_pos] != anchor) ++anchor_pos;
                    if (pick >= anchor_pos) ++pick;
                    positive = peers[pick];
                }
                const std::size_t negative =
                    negatives[li][rng.uniform_index(negatives[li].size())];

                const auto sa = detail::embed_state(samples[anchor].bits,
                                                    result.model.matrix, dim);
                const auto sp = detail::embed_state(samples[positive].bits,
                                                    result.model.matrix, dim);
                const auto sn = detail::embed_state(samples[negative].bits,
                                                    result.model.matrix, dim);
                const double gap = std::abs(
                    static_cast<double>(level_index(samples[anchor].level) -
                                        level_index(samples[negative].level)));
                const double margin =
                    hyperparams.base_margin + hyperparams.ordinal_scale * gap;
                const double raw = (1.0 - dot(sa.z, sp.z)) -
                                   (1.0 - dot(sa.z, sn.z)) + margin;
                if (raw > 0.0) {
                    loss_sum += raw;
                    // d(raw)/dza = zn - zp; d/dzp = -za; d/dzn = +za
                    std::vector<double> ga(dim), gp(dim), gn(dim);
                    for (std::size_t k = 0; k < dim; ++k) {
                        ga[k] = sn.z[k] - sp.z[k];
                        gp[k] = -sa.z[k];
                        gn[k] = sa.z[k];
                    }
                    detail::scatter_gradient(samples[anchor].bits, sa, ga, grad, dim);
                    detail::scatter_gradient(samples[positive].bits, sp, gp, grad, dim);
                    detail::scatter_gradient(samples[negative].bits, sn, gn, grad, dim);
                }
            }
            produced += batch;

            ++step;
            const double scale = 1.0 / static_cast<double>(batch);
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t i = 0; i < grad.size(); ++i) {
                const double g = grad[i] * scale;
                m[i] = beta1 * m[i] + (1.0 - beta1) * g;
                v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
                const double update =
                    (m[i] / bc1) / (std::sqrt(v[i] / bc2) + adam_eps) +
                    hyperparams.weight_decay * result.model.matrix[i];
                result.model.matrix[i] -= hyperparams.learning_rate * update;
            }
        }
        result.epoch_mean_loss.push_back(
            loss_sum / static_cast<double>(triplets_per_epoch));
    }
    return result;
}

struct SeparationStats {
    double intra_mean = 0.0; // mean cosine distance within a level
    double inter_mean = 0.0; // mean cosine distance across levels
};

inline SeparationStats cosine_separation(const std::vector<TrainingSample>& samples,
                                         const EmbeddingModel& model) {
    std::vector<std::vector<double>> zs;
    zs.reserve(samples.size());
    for (const auto& s : samples) zs.push_back(embed(s.bits, model));
    double intra_sum = 0.0, inter_sum = 0.0;
    std::size_t intra_n = 0, inter_n = 0;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        for (std::size_t j = i + 1; j < zs.size(); ++j) {
            const double d = cosine_distance(zs[i], zs[j]);
            if (samples[i].level == samples[j].level) {
                intra_sum += d;
                ++intra_n;
            } else {
                inter_sum += d;
                ++inter_n;
            }
        }
    }
    if (intra_n == 0 || inter_n == 0) {
        raise(errc::degenerate_dataset, "need both intra- and inter-level pairs");
    }
    return {intra_sum / static_cast<double>(intra_n),
            inter_sum / static_cast<double>(inter_n)};
}

} // namespace cprt
