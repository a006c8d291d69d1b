#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fswrep/compose.hpp"
#include "fswrep/corpus.hpp"
#include "fswrep/datasets.hpp"
#include "fswrep/error.hpp"
#include "fswrep/model.hpp"
#include "fswrep/synthetic.hpp"
#include "fswrep/training.hpp"

namespace fswrep {

// Fractional (average) ranks, 1-based; ties get the mean of their rank span.
inline std::vector<double> fractional_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // mean of ranks i+1..j+1
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// Spearman's rho: Pearson correlation of fractional ranks.
inline double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ConfigError("spearman: length mismatch");
    if (x.size() < 2) throw DataError("spearman: need at least 2 observations");
    auto rx = fractional_ranks(x);
    auto ry = fractional_ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        double dx = rx[i] - mx;
        double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DataError("spearman: undefined correlation (zero rank variance)");
    }
    return sxy / std::sqrt(sxx * syy);
}

struct EvalReport {
    std::string dataset;
    std::string metric;
    double value = 0.0;
    std::int64_t items = 0;    // items used
    std::int64_t skipped = 0;  // OOV or otherwise uncountable items
    double coverage = 1.0;     // items / (items + skipped)

    static EvalReport make(std::string dataset, std::string metric, double value,
                           std::int64_t items, std::int64_t skipped) {
        EvalReport r;
        r.dataset = std::move(dataset);
        r.metric = std::move(metric);
        r.value = value;
        r.items = items;
        r.skipped = skipped;
        r.coverage = (items + skipped) == 0
                         ? 0.0
                         : static_cast<double>(items) / static_cast<double>(items + skipped);
        return r;
    }
};

inline void write_reports_csv(std::span<const EvalReport> reports,
                              const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report: " + path.string());
    out << "dataset,metric,value,items,skipped,coverage\n";
    out.precision(6);
    for (const auto& r : reports) {
        out << r.dataset << ',' << r.metric << ',' << r.value << ',' << r.items << ','
            << r.skipped << ',' << r.coverage << '\n';
    }
}

// Optional per-item gate for pseudo-disambiguation: called with the true
// record, the corrupted record and the corrupted role; items rejected by it
// are counted as skipped. Used with synthetic corpora to restrict scoring to
// corruptions the latent oracle labels implausible.
using CorruptionFilter =
    std::function<bool(const Record&, const Record&, std::size_t role)>;

// Scores each held-out record against one corruption per corruptible role;
// an item counts as correct iff the attested record scores strictly higher.
inline EvalReport pseudo_disambiguation(const JointModel& model, const TupleDataset& test,
                                        std::span<const std::size_t> roles,
                                        std::uint64_t seed,
                                        const CorruptionFilter& countable = nullptr,
                                        bool include_bias = true,
                                        const std::string& dataset_name = "pseudo") {
    if (test.records.empty()) throw DataError("pseudo-disambiguation: empty test set");
    for (std::size_t role : roles) {
        if (role >= model.num_groups()) {
            throw ConfigError("pseudo-disambiguation: role index out of range");
        }
    }
    ScoringView view(model);
    std::mt19937_64 rng(seed);
    std::int64_t correct = 0, used = 0, skipped = 0;
    for (const Record& rec : test.records) {
        for (std::size_t role : roles) {
            Record corrupted = corrupt(rec, role, model.vocab, rng);
            if (countable && !countable(rec, corrupted, role)) {
                ++skipped;
                continue;
            }
            ++used;
            if (view.record_plausibility(rec, include_bias) >
                view.record_plausibility(corrupted, include_bias)) {
                ++correct;
            }
        }
    }
    if (used == 0) throw DataError("pseudo-disambiguation: no countable items");
    return EvalReport::make(dataset_name, "accuracy",
                            static_cast<double>(correct) / static_cast<double>(used),
                            used, skipped);
}

// Spearman correlation between composed event similarities and human scores.
// Items touching out-of-vocabulary words are skipped and counted.
inline EvalReport event_similarity_eval(const JointModel& model,
                                        const SimilarityDataset& data,
                                        CompositionKind kind, bool include_bias = true) {
    ScoringView view(model);
    auto in_vocab = [&](const Event& e) {
        return model.vocab.lookup(0, e.s) >= 0 && model.vocab.lookup(1, e.v) >= 0 &&
               model.vocab.lookup(2, e.o) >= 0;
    };
    std::vector<double> predicted, human;
    std::int64_t skipped = 0;
    for (const auto& item : data.items) {
        if (!in_vocab(item.e1) || !in_vocab(item.e2)) {
            ++skipped;
            continue;
        }
        predicted.push_back(
            event_similarity_score(view, item.e1, item.e2, kind, include_bias));
        human.push_back(item.score);
    }
    if (predicted.size() < 2) {
        throw DataError("event similarity: fewer than 2 usable items in " + data.name);
    }
    double rho = spearman(predicted, human);
    return EvalReport::make(data.name, std::string("spearman/") + composition_name(kind),
                            rho, static_cast<std::int64_t>(predicted.size()), skipped);
}

struct ThematicGroups {
    std::string verb = "V";
    std::string agent = "S";
    std::string patient = "O";
};

// cosine(verb vector, noun vector from the role's space), correlated with
// human ratings. Items whose role group is absent from the schema or whose
// words are OOV are skipped and counted.
inline EvalReport thematic_fit_eval(const JointModel& model, const ThematicFitDataset& data,
                                    const ThematicGroups& groups = {},
                                    CosineStats* stats = nullptr) {
    ScoringView view(model);
    if (!model.schema.has(groups.verb)) {
        throw ConfigError("thematic fit: schema has no verb group '" + groups.verb + "'");
    }
    const std::size_t verb_g = model.schema.index_of(groups.verb);
    std::vector<double> predicted, human;
    std::int64_t skipped = 0;
    for (const auto& item : data.items) {
        const std::string& noun_group =
            item.role == ThematicRole::Agent ? groups.agent : groups.patient;
        if (!model.schema.has(noun_group)) {
            ++skipped;
            continue;
        }
        const std::size_t noun_g = model.schema.index_of(noun_group);
        std::int32_t v = model.vocab.lookup(verb_g, item.verb);
        std::int32_t n = model.vocab.lookup(noun_g, item.noun);
        if (v < 0 || n < 0) {
            ++skipped;
            continue;
        }
        predicted.push_back(cosine(view.vector_of(verb_g, v), view.vector_of(noun_g, n), stats));
        human.push_back(item.score);
    }
    if (predicted.size() < 2) {
        throw DataError("thematic fit: fewer than 2 usable items in " + data.name);
    }
    double rho = spearman(predicted, human);
    return EvalReport::make(data.name, "spearman/thematic-fit", rho,
                            static_cast<std::int64_t>(predicted.size()), skipped);
}

struct Neighbor {
    std::string word;
    double similarity = 0.0;
};

// Top-k words of `target_group` by cosine to the query vector. The query
// itself is excluded when both groups match; ties break by vocabulary index.
inline std::vector<Neighbor> nearest_neighbors(const JointModel& model,
                                               const std::string& word,
                                               const std::string& group,
                                               const std::string& target_group,
                                               std::size_t k) {
    if (k < 1) throw ConfigError("nearest_neighbors: k must be >= 1");
    ScoringView view(model);
    const std::size_t qg = model.schema.index_of(group);
    const std::size_t tg = model.schema.index_of(target_group);
    const std::int32_t qi = view.require_word(qg, word);
    auto query = view.vector_of(qg, qi);

    std::vector<std::pair<double, std::int32_t>> scored;
    scored.reserve(model.vocab.size(tg));
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(model.vocab.size(tg)); ++i) {
        if (tg == qg && i == qi) continue;
        scored.emplace_back(cosine(query, view.vector_of(tg, i)), i);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    if (scored.size() > k) scored.resize(k);
    std::vector<Neighbor> out;
    out.reserve(scored.size());
    for (const auto& [sim, idx] : scored) {
        out.push_back({model.vocab.word(tg, idx), sim});
    }
    return out;
}

// Fraction of rows assigned to their own cluster's centroid (centroids are
// means over true members; assignment by Euclidean distance).
inline double cluster_purity(const Matrix& vectors, std::span<const std::int32_t> cluster_of,
                             std::size_t k_clusters) {
    if (vectors.rows() != cluster_of.size() || vectors.rows() == 0) {
        throw ConfigError("cluster_purity: one cluster label per row required");
    }
    const std::size_t d = vectors.cols();
    std::vector<std::vector<double>> centroid(k_clusters, std::vector<double>(d, 0.0));
    std::vector<std::size_t> members(k_clusters, 0);
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
        const auto c = static_cast<std::size_t>(cluster_of[i]);
        ++members[c];
        const double* row = vectors.row(i);
        for (std::size_t j = 0; j < d; ++j) centroid[c][j] += row[j];
    }
    for (std::size_t c = 0; c < k_clusters; ++c) {
        if (members[c] == 0) continue;
        for (double& x : centroid[c]) x /= static_cast<double>(members[c]);
    }
    std::size_t own = 0;
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
        const double* row = vectors.row(i);
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k_clusters; ++c) {
            if (members[c] == 0) continue;
            double dist = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                double diff = row[j] - centroid[c][j];
                dist += diff * diff;
            }
            if (dist < best_dist) {
                best_dist = dist;
                best = c;
            }
        }
        if (best == static_cast<std::size_t>(cluster_of[i])) ++own;
    }
    return static_cast<double>(own) / static_cast<double>(vectors.rows());
}

// Purity of the item-group vectors of a trained directionality-demo model.
inline double cluster_purity(const JointModel& model, const SyntheticAssignment& assignment,
                             const std::string& group) {
    const std::size_t g = model.schema.index_of(group);
    Matrix merged = model.merged_embedding(g);
    Matrix rows(assignment.n_items, model.dim);
    for (std::size_t i = 0; i < assignment.n_items; ++i) {
        std::int32_t idx = model.vocab.lookup(g, assignment.item_words[i]);
        if (idx < 0) {
            throw LookupError("item '" + assignment.item_words[i] +
                              "' missing from demo vocabulary");
        }
        const double* src = merged.row(static_cast<std::size_t>(idx));
        std::copy(src, src + model.dim, rows.row(i));
    }
    return cluster_purity(rows, assignment.cluster_of, assignment.k_clusters);
}

struct AblationCell {
    TrainRegime regime;
    std::string variant;  // "async+sep", ...
    bool ok = false;
    std::string error;
    EvalReport report;
};

inline std::string regime_name(TrainRegime regime) {
    return std::string(regime.sync ? "sync" : "async") + "+" +
           (regime.shared ? "shared" : "sep");
}

// Trains all four {async,sync} x {sep,shared} variants from identical seeds
// and data, then scores each on held-out pseudo-disambiguation. Failures are
// recorded per cell; the grid continues.
inline std::vector<AblationCell> ablate(const GroupSchema& schema, const Vocabulary& vocab,
                                        const TupleDataset& train_set,
                                        const TupleDataset& heldout,
                                        const TrainConfig& base,
                                        std::span<const std::size_t> roles,
                                        std::uint64_t eval_seed,
                                        const CorruptionFilter& countable = nullptr) {
    std::vector<AblationCell> table;
    for (bool sync : {false, true}) {
        for (bool shared : {false, true}) {
            AblationCell cell;
            cell.regime = {sync, shared};
            cell.variant = regime_name(cell.regime);
            try {
                TrainConfig config = base;
                config.regime = cell.regime;
                JointModel model =
                    init_model(schema, vocab, config.dim, config.seed, config.regime);
                AdamState adam = make_adam_state(model);
                train(model, adam, train_set, config);
                cell.report = pseudo_disambiguation(model, heldout, roles, eval_seed,
                                                    countable, true, cell.variant);
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            table.push_back(std::move(cell));
        }
    }
    return table;
}

}  // namespace fswrep
