#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "fswrep/corpus.hpp"
#include "fswrep/error.hpp"
#include "fswrep/schema.hpp"

namespace fswrep {

namespace detail {

inline std::string numbered_word(const std::string& stem, std::size_t i, std::size_t total) {
    std::size_t width = 1;
    for (std::size_t v = total > 0 ? total - 1 : 0; v >= 10; v /= 10) ++width;
    std::string digits = std::to_string(i);
    std::string out = stem;
    for (std::size_t pad = digits.size(); pad < width; ++pad) out += '0';
    return out + digits;
}

// Balanced class labels (round-robin over a shuffled order), so every class
// is non-empty whenever n >= k.
inline std::vector<std::int32_t> balanced_classes(std::size_t n, std::size_t k,
                                                  std::mt19937_64& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::int32_t> cls(n);
    for (std::size_t i = 0; i < n; ++i) {
        cls[order[i]] = static_cast<std::int32_t>(i % k);
    }
    return cls;
}

}  // namespace detail

// An n:1 item-to-cluster assignment plus the pair corpus it induces, for the
// 2-group directionality demo.
struct SyntheticAssignment {
    std::size_t n_items = 0;
    std::size_t k_clusters = 0;
    GroupSchema schema;                      // {"A","B"}
    std::vector<std::string> item_words;     // group A vocabulary
    std::vector<std::string> cluster_words;  // group B vocabulary
    std::vector<std::int32_t> cluster_of;    // item -> cluster
    std::vector<RawTuple> pairs;             // exactly the assignment pairs
};

inline SyntheticAssignment gen_synthetic_assignment(std::size_t n_items,
                                                    std::size_t k_clusters,
                                                    std::uint64_t seed,
                                                    bool balanced = false) {
    if (k_clusters < 2 || n_items < k_clusters) {
        throw ConfigError("gen_synthetic_assignment requires n_items >= k_clusters >= 2");
    }
    SyntheticAssignment a;
    a.n_items = n_items;
    a.k_clusters = k_clusters;
    a.schema = GroupSchema({"A", "B"});
    a.item_words.reserve(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
        a.item_words.push_back(detail::numbered_word("item", i, n_items));
    }
    for (std::size_t c = 0; c < k_clusters; ++c) {
        a.cluster_words.push_back(detail::numbered_word("cluster", c, k_clusters));
    }

    std::mt19937_64 rng(seed);
    if (balanced) {
        a.cluster_of = detail::balanced_classes(n_items, k_clusters, rng);
    } else {
        std::uniform_int_distribution<std::int32_t> pick(
            0, static_cast<std::int32_t>(k_clusters) - 1);
        a.cluster_of.resize(n_items);
        for (auto& c : a.cluster_of) c = pick(rng);
    }

    a.pairs.reserve(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
        RawTuple t;
        t.words = {a.item_words[i], a.cluster_words[static_cast<std::size_t>(a.cluster_of[i])]};
        a.pairs.push_back(std::move(t));
    }
    return a;
}

// Desk-scale SVO corpus generator with a latent-class plausibility oracle.
// Each word carries a hidden class; a triple is plausible iff all three
// slots share the same class, so changing a single slot to a word of a
// different class always breaks plausibility, and the structure is visible
// in every pairwise marginal. Records are drawn by sampling a compatible
// class triple uniformly, then words uniformly within the classes.
class SyntheticSvo {
public:
    SyntheticSvo(std::size_t n_s, std::size_t n_v, std::size_t n_o, std::size_t k_latent,
                 std::uint64_t seed)
        : k_(k_latent), schema_(GroupSchema::svo()), rng_(seed) {
        if (k_latent < 1) throw ConfigError("k_latent must be >= 1");
        if (n_s < k_latent || n_v < k_latent || n_o < k_latent) {
            throw ConfigError("each group size must be >= k_latent");
        }
        init_group(0, "s", n_s);
        init_group(1, "v", n_v);
        init_group(2, "o", n_o);
        for (std::int32_t c = 0; c < static_cast<std::int32_t>(k_); ++c) {
            compatible_triples_.push_back({c, c, c});
        }
    }

    const GroupSchema& schema() const { return schema_; }
    std::size_t k_latent() const { return k_; }
    const std::vector<std::string>& words(std::size_t group) const { return words_[group]; }
    std::int32_t word_class(std::size_t group, std::size_t word_idx) const {
        return class_of_[group][word_idx];
    }

    bool compatible(std::int32_t cs, std::int32_t cv, std::int32_t co) const {
        return cs == cv && cv == co;
    }

    // The oracle: plausibility of a word triple by latent-class compatibility.
    bool plausible(const std::string& s, const std::string& v, const std::string& o) const {
        return compatible(class_by_word(0, s), class_by_word(1, v), class_by_word(2, o));
    }

    // Draws `n_records` plausible tuples, advancing the generator state.
    std::vector<RawTuple> sample(std::size_t n_records) {
        std::uniform_int_distribution<std::size_t> pick_triple(0, compatible_triples_.size() - 1);
        std::vector<RawTuple> out;
        out.reserve(n_records);
        for (std::size_t r = 0; r < n_records; ++r) {
            const auto& ct = compatible_triples_[pick_triple(rng_)];
            RawTuple t;
            t.words = {pick_word(0, ct[0]), pick_word(1, ct[1]), pick_word(2, ct[2])};
            out.push_back(std::move(t));
        }
        return out;
    }

private:
    void init_group(std::size_t g, const std::string& stem, std::size_t n) {
        words_[g].reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            words_[g].push_back(detail::numbered_word(stem, i, n));
            word_index_[g].emplace(words_[g].back(), static_cast<std::int32_t>(i));
        }
        class_of_[g] = detail::balanced_classes(n, k_, rng_);
        members_[g].assign(k_, {});
        for (std::size_t i = 0; i < n; ++i) {
            members_[g][static_cast<std::size_t>(class_of_[g][i])].push_back(i);
        }
    }

    std::int32_t class_by_word(std::size_t g, const std::string& w) const {
        auto it = word_index_[g].find(w);
        if (it == word_index_[g].end()) {
            throw LookupError("word '" + w + "' unknown to the synthetic generator");
        }
        return class_of_[g][static_cast<std::size_t>(it->second)];
    }

    const std::string& pick_word(std::size_t g, std::int32_t cls) {
        const auto& pool = members_[g][static_cast<std::size_t>(cls)];
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        return words_[g][pool[pick(rng_)]];
    }

    std::size_t k_;
    GroupSchema schema_;
    std::mt19937_64 rng_;
    std::vector<std::string> words_[3];
    std::unordered_map<std::string, std::int32_t> word_index_[3];
    std::vector<std::int32_t> class_of_[3];
    std::vector<std::vector<std::size_t>> members_[3];
    std::vector<std::array<std::int32_t, 3>> compatible_triples_;
};

}  // namespace fswrep
