#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "fswrep/corpus.hpp"
#include "fswrep/error.hpp"
#include "fswrep/matrix.hpp"
#include "fswrep/model.hpp"

namespace fswrep {

// Dense gradient buffers parallel to model.params(). `touched` marks tensors
// that took part in the current step; only those are clipped and updated.
struct GradientSet {
    std::vector<Matrix> grads;
    std::vector<std::uint8_t> touched;

    void zero() {
        for (std::size_t i = 0; i < grads.size(); ++i) {
            if (touched[i]) grads[i].fill(0.0);
            touched[i] = 0;
        }
    }
};

inline GradientSet make_gradients(const JointModel& model) {
    GradientSet g;
    for (const Matrix* p : model.params()) {
        g.grads.emplace_back(p->rows(), p->cols(), 0.0);
        g.touched.push_back(0);
    }
    return g;
}

// Fused forward + backward for one sub-network on one batch. Adds the
// analytic gradients of the batch-mean cross-entropy into `grads` and
// returns the sub-network loss. d loss / d logit_k = (p_k - y_k) / B.
inline double accumulate_subnet_grads(const JointModel& model, std::size_t subnet,
                                      std::span<const Record> batch, GradientSet& grads) {
    const auto& sn = model.subnets[subnet];
    const Matrix& in_m = model.input_matrix(subnet);
    const Matrix& tg_m = model.target_matrix(subnet);
    const Matrix& bias = model.biases[subnet];
    Matrix& g_in = grads.grads[model.input_param_index(subnet)];
    Matrix& g_tg = grads.grads[model.target_param_index(subnet)];
    Matrix& g_b = grads.grads[model.bias_param_index(subnet)];
    grads.touched[model.input_param_index(subnet)] = 1;
    grads.touched[model.target_param_index(subnet)] = 1;
    grads.touched[model.bias_param_index(subnet)] = 1;

    const std::size_t d = model.dim;
    const std::size_t n_targets = tg_m.rows();
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    std::vector<double> input_grad(d);

    double loss = 0.0;
    for (const Record& rec : batch) {
        const auto in_idx = static_cast<std::size_t>(rec[static_cast<std::size_t>(sn.src)]);
        const auto tg_idx = static_cast<std::size_t>(rec[static_cast<std::size_t>(sn.dst)]);
        const double* a = in_m.row(in_idx);
        std::fill(input_grad.begin(), input_grad.end(), 0.0);
        double row_loss = 0.0;
        for (std::size_t k = 0; k < n_targets; ++k) {
            const double* t = tg_m.row(k);
            double z = dot(a, t, d) + bias.at(0, k);
            if (!std::isfinite(z)) {
                throw NumericError("non-finite logit in sub-network " +
                                   model.subnet_name(subnet));
            }
            double p = sigmoid(z);
            double pc = std::min(1.0 - kProbEps, std::max(kProbEps, p));
            double y = (k == tg_idx) ? 1.0 : 0.0;
            row_loss -= (k == tg_idx) ? std::log(pc) : std::log1p(-pc);
            double g = (p - y) * inv_b;
            g_b.at(0, k) += g;
            double* gt = g_tg.row(k);
            for (std::size_t c = 0; c < d; ++c) {
                gt[c] += g * a[c];
                input_grad[c] += g * t[c];
            }
        }
        double* gi = g_in.row(in_idx);
        for (std::size_t c = 0; c < d; ++c) gi[c] += input_grad[c];
        loss += row_loss;
    }
    return loss * inv_b;
}

// Joint gradients over the given sub-networks (all when `active` is empty).
inline LossBreakdown compute_grads(const JointModel& model, std::span<const Record> batch,
                                   GradientSet& grads,
                                   std::span<const std::size_t> active = {}) {
    LossBreakdown out;
    out.per_subnet.resize(model.subnets.size(), 0.0);
    auto run = [&](std::size_t s) {
        out.per_subnet[s] = accumulate_subnet_grads(model, s, batch, grads);
        out.total += out.per_subnet[s];
    };
    if (active.empty()) {
        for (std::size_t s = 0; s < model.subnets.size(); ++s) run(s);
    } else {
        for (std::size_t s : active) run(s);
    }
    return out;
}

inline double global_grad_norm(const GradientSet& grads) {
    double sq = 0.0;
    for (std::size_t i = 0; i < grads.grads.size(); ++i) {
        if (grads.touched[i]) sq += squared_norm(grads.grads[i]);
    }
    return std::sqrt(sq);
}

// Rescales all touched gradients so their global L2 norm is at most
// `clip_norm`; direction is preserved. Returns the pre-clip norm.
inline double clip_global_norm(GradientSet& grads, double clip_norm) {
    if (clip_norm <= 0) throw ConfigError("clip_norm must be positive");
    double norm = global_grad_norm(grads);
    if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
    if (norm > clip_norm) {
        double factor = clip_norm / norm;
        for (std::size_t i = 0; i < grads.grads.size(); ++i) {
            if (grads.touched[i]) scale(grads.grads[i], factor);
        }
    }
    return norm;
}

// Per-parameter Adam moments plus one step counter, advanced once per
// adam_step call (per joint update in sync, per sub-network step in async).
struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::int64_t t = 0;
};

inline AdamState make_adam_state(const JointModel& model) {
    AdamState st;
    for (const Matrix* p : model.params()) {
        st.m.emplace_back(p->rows(), p->cols(), 0.0);
        st.v.emplace_back(p->rows(), p->cols(), 0.0);
    }
    return st;
}

// Standard Adam with bias correction, applied to the touched tensors.
inline void adam_step(JointModel& model, const GradientSet& grads, AdamState& state,
                      double lr, double beta1 = 0.9, double beta2 = 0.999,
                      double eps = 1e-8) {
    auto params = model.params();
    if (params.size() != state.m.size() || params.size() != grads.grads.size()) {
        throw ConfigError("adam_step: state/gradient shape mismatch");
    }
    ++state.t;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!grads.touched[i]) continue;
        auto& theta = params[i]->data();
        auto& m = state.m[i].data();
        auto& v = state.v[i].data();
        const auto& g = grads.grads[i].data();
        for (std::size_t j = 0; j < theta.size(); ++j) {
            m[j] = beta1 * m[j] + (1.0 - beta1) * g[j];
            v[j] = beta2 * v[j] + (1.0 - beta2) * g[j] * g[j];
            double m_hat = m[j] / bc1;
            double v_hat = v[j] / bc2;
            theta[j] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
}

struct LossTraceRow {
    std::size_t epoch = 0;
    std::string subnet;
    double loss = 0.0;
    double total = 0.0;
};

struct TrainResult {
    std::vector<double> epoch_mean_loss;  // joint loss per epoch
    std::vector<LossTraceRow> trace;
};

// The training loop. sync: one joint loss, one clip, one Adam step per batch.
// async: per batch, sub-networks take their own forward/backward/clip/step in
// enumeration order, each seeing the previous step's parameters.
inline TrainResult train(JointModel& model, AdamState& adam, const TupleDataset& dataset,
                         const TrainConfig& config) {
    config.validate();
    if (dataset.records.empty()) throw DataError("train: empty dataset");
    if (dataset.arity() != model.num_groups()) {
        throw ConfigError("dataset arity does not match model schema");
    }
    if (config.dim != model.dim) {
        throw ConfigError("config dim " + std::to_string(config.dim) +
                          " does not match model dim " + std::to_string(model.dim));
    }
    for (std::size_t g = 0; g < model.num_groups(); ++g) {
        if (dataset.vocab_sizes[g] != static_cast<std::int32_t>(model.vocab.size(g))) {
            throw ConfigError("dataset was encoded against a different vocabulary (group '" +
                              model.schema.name(g) + "')");
        }
    }
    std::vector<std::size_t> active = config.subnet_filter;
    if (active.empty()) {
        active.resize(model.subnets.size());
        std::iota(active.begin(), active.end(), std::size_t{0});
    } else {
        for (std::size_t s : active) {
            if (s >= model.subnets.size()) throw ConfigError("subnet_filter index out of range");
        }
    }

    GradientSet grads = make_gradients(model);
    TrainResult result;
    std::vector<Record> batch;
    std::vector<double> subnet_sum(model.subnets.size());

    for (std::size_t e = config.start_epoch; e < config.start_epoch + config.epochs; ++e) {
        auto batches = epoch_batches(dataset, config.batch_size, config.seed,
                                     static_cast<std::int64_t>(e));
        std::fill(subnet_sum.begin(), subnet_sum.end(), 0.0);
        for (const auto& batch_indices : batches) {
            batch.clear();
            for (std::size_t idx : batch_indices) batch.push_back(dataset.records[idx]);

            if (config.regime.sync) {
                grads.zero();
                for (std::size_t s : active) {
                    double loss = accumulate_subnet_grads(model, s, batch, grads);
                    if (!std::isfinite(loss)) {
                        throw NumericError("non-finite loss in sub-network " +
                                           model.subnet_name(s));
                    }
                    subnet_sum[s] += loss;
                }
                clip_global_norm(grads, config.clip_norm);
                adam_step(model, grads, adam, config.learning_rate, config.adam_beta1,
                          config.adam_beta2, config.adam_eps);
            } else {
                for (std::size_t s : active) {
                    grads.zero();
                    double loss = accumulate_subnet_grads(model, s, batch, grads);
                    if (!std::isfinite(loss)) {
                        throw NumericError("non-finite loss in sub-network " +
                                           model.subnet_name(s));
                    }
                    subnet_sum[s] += loss;
                    clip_global_norm(grads, config.clip_norm);
                    adam_step(model, grads, adam, config.learning_rate, config.adam_beta1,
                              config.adam_beta2, config.adam_eps);
                }
            }
        }

        const double n_batches = static_cast<double>(batches.size());
        double epoch_total = 0.0;
        for (std::size_t s : active) epoch_total += subnet_sum[s] / n_batches;
        for (std::size_t s : active) {
            result.trace.push_back({e, model.subnet_name(s), subnet_sum[s] / n_batches,
                                    epoch_total});
        }
        result.epoch_mean_loss.push_back(epoch_total);
    }
    return result;
}

inline void write_loss_trace(const std::vector<LossTraceRow>& trace,
                             const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write loss trace: " + path.string());
    out << "epoch,subnet,loss,total\n";
    out.precision(17);
    for (const auto& row : trace) {
        out << row.epoch << ',' << row.subnet << ',' << row.loss << ',' << row.total << '\n';
    }
}

}  // namespace fswrep
