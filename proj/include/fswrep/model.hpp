#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fswrep/corpus.hpp"
#include "fswrep/error.hpp"
#include "fswrep/matrix.hpp"
#include "fswrep/schema.hpp"
#include "fswrep/vocab.hpp"

namespace fswrep {

// Probability clamp applied inside the cross-entropy logs.
inline constexpr double kProbEps = 1e-7;

// One directed predictor: words of group `src` predict words of group `dst`.
struct SubnetId {
    std::int32_t src = 0;
    std::int32_t dst = 0;
    bool operator==(const SubnetId&) const = default;
};

// All N(N-1) directions, pairs ordered by slot distance then start index and
// emitted in both directions. For S,V,O this gives
// S->V, V->S, V->O, O->V, S->O, O->S.
inline std::vector<SubnetId> enumerate_subnets(std::size_t n_groups) {
    std::vector<SubnetId> out;
    for (std::size_t dist = 1; dist < n_groups; ++dist) {
        for (std::size_t i = 0; i + dist < n_groups; ++i) {
            auto a = static_cast<std::int32_t>(i);
            auto b = static_cast<std::int32_t>(i + dist);
            out.push_back({a, b});
            out.push_back({b, a});
        }
    }
    return out;
}

struct TrainRegime {
    bool sync = true;    // one joint loss per batch vs per-subnet updates
    bool shared = true;  // one matrix per group vs per-subnet copies
    bool operator==(const TrainRegime&) const = default;
};

struct TrainConfig {
    std::size_t batch_size = 128;
    double learning_rate = 0.001;
    double clip_norm = 5.0;
    std::size_t dim = 25;
    std::size_t epochs = 10;
    std::uint64_t seed = 1;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    TrainRegime regime;
    // Resume point: epoch indices [start_epoch, start_epoch+epochs) are run,
    // so a resumed run consumes the same per-epoch shuffles as an unbroken one.
    std::size_t start_epoch = 0;
    // Restrict training to these subnet indices (empty = all). Used by the
    // directionality demo to train single directions.
    std::vector<std::size_t> subnet_filter;

    void validate() const {
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
        if (clip_norm <= 0) throw ConfigError("clip_norm must be positive");
        if (dim < 1) throw ConfigError("dim must be >= 1");
    }
};

// Shared embedding matrices (one per group, or per-subnet copies in `sep`
// mode) plus one bias vector per directed sub-network.
class JointModel {
public:
    GroupSchema schema;
    Vocabulary vocab;
    std::size_t dim = 0;
    TrainRegime regime;
    std::vector<SubnetId> subnets;
    // shared: embeddings[g] is group g's matrix.
    // sep: embeddings[2*s] / embeddings[2*s+1] are subnet s's input / target copies.
    std::vector<Matrix> embeddings;
    std::vector<Matrix> biases;  // [subnet], shape 1 x |V_dst|

    std::size_t num_groups() const { return schema.arity(); }

    std::size_t subnet_index(std::size_t src, std::size_t dst) const {
        for (std::size_t s = 0; s < subnets.size(); ++s) {
            if (subnets[s].src == static_cast<std::int32_t>(src) &&
                subnets[s].dst == static_cast<std::int32_t>(dst))
                return s;
        }
        throw LookupError("no sub-network " + std::to_string(src) + "->" + std::to_string(dst));
    }

    std::string subnet_name(std::size_t s) const {
        return schema.name(static_cast<std::size_t>(subnets[s].src)) + "->" +
               schema.name(static_cast<std::size_t>(subnets[s].dst));
    }

    Matrix& input_matrix(std::size_t s) {
        return regime.shared ? embeddings[static_cast<std::size_t>(subnets[s].src)]
                             : embeddings[2 * s];
    }
    const Matrix& input_matrix(std::size_t s) const {
        return regime.shared ? embeddings[static_cast<std::size_t>(subnets[s].src)]
                             : embeddings[2 * s];
    }
    Matrix& target_matrix(std::size_t s) {
        return regime.shared ? embeddings[static_cast<std::size_t>(subnets[s].dst)]
                             : embeddings[2 * s + 1];
    }
    const Matrix& target_matrix(std::size_t s) const {
        return regime.shared ? embeddings[static_cast<std::size_t>(subnets[s].dst)]
                             : embeddings[2 * s + 1];
    }

    // Index of the parameter tensor backing input/target matrices (for
    // gradient accumulation). Parameter order: all embeddings, then biases.
    std::size_t input_param_index(std::size_t s) const {
        return regime.shared ? static_cast<std::size_t>(subnets[s].src) : 2 * s;
    }
    std::size_t target_param_index(std::size_t s) const {
        return regime.shared ? static_cast<std::size_t>(subnets[s].dst) : 2 * s + 1;
    }
    std::size_t bias_param_index(std::size_t s) const { return embeddings.size() + s; }

    std::vector<Matrix*> params() {
        std::vector<Matrix*> out;
        out.reserve(embeddings.size() + biases.size());
        for (auto& e : embeddings) out.push_back(&e);
        for (auto& b : biases) out.push_back(&b);
        return out;
    }
    std::vector<const Matrix*> params() const {
        std::vector<const Matrix*> out;
        out.reserve(embeddings.size() + biases.size());
        for (const auto& e : embeddings) out.push_back(&e);
        for (const auto& b : biases) out.push_back(&b);
        return out;
    }

    // Query-time matrix for one group. In `sep` mode this is the unweighted
    // mean of all per-subnet copies touching the group.
    Matrix merged_embedding(std::size_t group) const {
        if (regime.shared) return embeddings[group];
        Matrix merged(vocab.size(group), dim, 0.0);
        std::size_t copies = 0;
        for (std::size_t s = 0; s < subnets.size(); ++s) {
            if (static_cast<std::size_t>(subnets[s].src) == group) {
                accumulate(merged, embeddings[2 * s]);
                ++copies;
            }
            if (static_cast<std::size_t>(subnets[s].dst) == group) {
                accumulate(merged, embeddings[2 * s + 1]);
                ++copies;
            }
        }
        scale(merged, 1.0 / static_cast<double>(copies));
        return merged;
    }

    bool operator==(const JointModel& other) const {
        return schema == other.schema && vocab == other.vocab && dim == other.dim &&
               regime == other.regime && embeddings == other.embeddings &&
               biases == other.biases;
    }

private:
    static void accumulate(Matrix& into, const Matrix& from) {
        for (std::size_t i = 0; i < into.size(); ++i) into.data()[i] += from.data()[i];
    }
};

// Embeddings ~ U[-0.5/d, 0.5/d] from a seeded generator; biases zero. In
// `sep` mode every copy of a group starts identical to the shared init, so
// regime comparisons start from the same point.
inline JointModel init_model(const GroupSchema& schema, const Vocabulary& vocab,
                             std::size_t dim, std::uint64_t seed,
                             TrainRegime regime = {}) {
    if (dim < 1) throw ConfigError("dim must be >= 1");
    if (vocab.num_groups() != schema.arity()) {
        throw ConfigError("vocabulary group count does not match schema");
    }
    JointModel m;
    m.schema = schema;
    m.vocab = vocab;
    m.dim = dim;
    m.regime = regime;
    m.subnets = enumerate_subnets(schema.arity());

    std::mt19937_64 rng(seed);
    const double bound = 0.5 / static_cast<double>(dim);
    std::uniform_real_distribution<double> uniform(-bound, bound);
    std::vector<Matrix> per_group(schema.arity());
    for (std::size_t g = 0; g < schema.arity(); ++g) {
        per_group[g] = Matrix(vocab.size(g), dim);
        for (auto& x : per_group[g].data()) x = uniform(rng);
    }

    if (regime.shared) {
        m.embeddings = std::move(per_group);
    } else {
        m.embeddings.reserve(2 * m.subnets.size());
        for (const auto& sn : m.subnets) {
            m.embeddings.push_back(per_group[static_cast<std::size_t>(sn.src)]);
            m.embeddings.push_back(per_group[static_cast<std::size_t>(sn.dst)]);
        }
    }
    m.biases.reserve(m.subnets.size());
    for (const auto& sn : m.subnets) {
        m.biases.emplace_back(1, vocab.size(static_cast<std::size_t>(sn.dst)), 0.0);
    }
    return m;
}

// P = sigmoid(a . E_dst^T + b): one row of target-vocabulary probabilities
// per input index.
inline Matrix forward(const JointModel& model, std::size_t subnet,
                      std::span<const std::int32_t> inputs) {
    const Matrix& in_m = model.input_matrix(subnet);
    const Matrix& tg_m = model.target_matrix(subnet);
    const Matrix& bias = model.biases[subnet];
    Matrix pred(inputs.size(), tg_m.rows());
    for (std::size_t r = 0; r < inputs.size(); ++r) {
        if (inputs[r] < 0 || static_cast<std::size_t>(inputs[r]) >= in_m.rows()) {
            throw LookupError("forward: input index " + std::to_string(inputs[r]) +
                              " out of range for " + model.subnet_name(subnet));
        }
        const double* a = in_m.row(static_cast<std::size_t>(inputs[r]));
        double* out = pred.row(r);
        for (std::size_t k = 0; k < tg_m.rows(); ++k) {
            out[k] = sigmoid(dot(a, tg_m.row(k), model.dim) + bias.at(0, k));
        }
    }
    return pred;
}

// Binary cross-entropy against the one-hot target, summed over the target
// vocabulary and averaged over batch rows. Probabilities are clamped to
// [kProbEps, 1-kProbEps] inside the logs.
inline double subnet_loss(const Matrix& predictions, std::span<const std::int32_t> targets) {
    if (predictions.rows() != targets.size()) {
        throw ConfigError("subnet_loss: one target per prediction row required");
    }
    double total = 0.0;
    for (std::size_t r = 0; r < predictions.rows(); ++r) {
        const double* p = predictions.row(r);
        const auto t = static_cast<std::size_t>(targets[r]);
        double row_loss = 0.0;
        for (std::size_t k = 0; k < predictions.cols(); ++k) {
            double pk = std::min(1.0 - kProbEps, std::max(kProbEps, p[k]));
            row_loss -= (k == t) ? std::log(pk) : std::log1p(-pk);
            if (std::isnan(p[k])) {
                throw NumericError("subnet_loss: NaN prediction");
            }
        }
        total += row_loss;
    }
    return total / static_cast<double>(predictions.rows());
}

struct LossBreakdown {
    double total = 0.0;
    std::vector<double> per_subnet;  // parallel to model.subnets
};

namespace detail {

inline void gather_direction(std::span<const Record> batch, const SubnetId& sn,
                             std::vector<std::int32_t>& inputs,
                             std::vector<std::int32_t>& targets) {
    inputs.resize(batch.size());
    targets.resize(batch.size());
    for (std::size_t r = 0; r < batch.size(); ++r) {
        inputs[r] = batch[r][static_cast<std::size_t>(sn.src)];
        targets[r] = batch[r][static_cast<std::size_t>(sn.dst)];
    }
}

}  // namespace detail

// Sum of all sub-network losses on the same batch (the joint objective).
inline LossBreakdown joint_loss(const JointModel& model, std::span<const Record> batch) {
    LossBreakdown out;
    out.per_subnet.resize(model.subnets.size(), 0.0);
    std::vector<std::int32_t> inputs, targets;
    for (std::size_t s = 0; s < model.subnets.size(); ++s) {
        detail::gather_direction(batch, model.subnets[s], inputs, targets);
        Matrix pred = forward(model, s, inputs);
        out.per_subnet[s] = subnet_loss(pred, targets);
        out.total += out.per_subnet[s];
    }
    return out;
}

// Precomputed query-side view of a frozen model: merged embeddings (`sep`
// copies averaged once) plus bias lookups. All scoring goes through this.
class ScoringView {
public:
    explicit ScoringView(const JointModel& model) : model_(&model) {
        merged_.reserve(model.num_groups());
        for (std::size_t g = 0; g < model.num_groups(); ++g) {
            merged_.push_back(model.merged_embedding(g));
        }
        const auto n = model.num_groups();
        subnet_of_.assign(n * n, -1);
        for (std::size_t s = 0; s < model.subnets.size(); ++s) {
            const auto& sn = model.subnets[s];
            subnet_of_[static_cast<std::size_t>(sn.src) * n + static_cast<std::size_t>(sn.dst)] =
                static_cast<std::int32_t>(s);
        }
    }

    const JointModel& model() const { return *model_; }
    const Matrix& embedding(std::size_t group) const { return merged_[group]; }
    std::size_t dim() const { return model_->dim; }

    std::int32_t require_word(std::size_t group, const std::string& word) const {
        std::int32_t idx = model_->vocab.lookup(group, word);
        if (idx < 0) {
            throw LookupError("word '" + word + "' not in vocabulary of group '" +
                              model_->schema.name(group) + "'");
        }
        return idx;
    }

    std::span<const double> vector_of(std::size_t group, std::int32_t idx) const {
        return merged_[group].row_span(static_cast<std::size_t>(idx));
    }

    // a_i . a_j + b_{i->j}[w_j] + b_{j->i}[w_i]
    double pair_logit(std::size_t gi, std::int32_t wi, std::size_t gj, std::int32_t wj,
                      bool include_bias = true) const {
        double score = dot(vector_of(gi, wi), vector_of(gj, wj));
        if (include_bias) {
            score += bias_entry(gi, gj, wj) + bias_entry(gj, gi, wi);
        }
        return score;
    }

    // Sum of pair logits over all unordered slot pairs of a full record.
    double record_plausibility(const Record& record, bool include_bias = true) const {
        double score = 0.0;
        for (std::size_t i = 0; i < record.size(); ++i) {
            for (std::size_t j = i + 1; j < record.size(); ++j) {
                score += pair_logit(i, record[i], j, record[j], include_bias);
            }
        }
        return score;
    }

private:
    double bias_entry(std::size_t src, std::size_t dst, std::int32_t word) const {
        std::int32_t s = subnet_of_[src * model_->num_groups() + dst];
        return model_->biases[static_cast<std::size_t>(s)].at(0, static_cast<std::size_t>(word));
    }

    const JointModel* model_;
    std::vector<Matrix> merged_;
    std::vector<std::int32_t> subnet_of_;
};

inline double pair_logit(const JointModel& model, const std::string& group_i,
                         const std::string& word_i, const std::string& group_j,
                         const std::string& word_j, bool include_bias = true) {
    ScoringView view(model);
    std::size_t gi = model.schema.index_of(group_i);
    std::size_t gj = model.schema.index_of(group_j);
    return view.pair_logit(gi, view.require_word(gi, word_i), gj,
                           view.require_word(gj, word_j), include_bias);
}

// pair_logit(S,V) + pair_logit(V,O) + pair_logit(S,O) on a 3-group model.
inline double triplet_plausibility(const JointModel& model, const std::string& s,
                                   const std::string& v, const std::string& o,
                                   bool include_bias = true) {
    if (model.num_groups() != 3) {
        throw ConfigError("triplet_plausibility requires a 3-group model");
    }
    ScoringView view(model);
    Record rec = {view.require_word(0, s), view.require_word(1, v), view.require_word(2, o)};
    return view.record_plausibility(rec, include_bias);
}

}  // namespace fswrep
