#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fswrep/error.hpp"
#include "fswrep/schema.hpp"
#include "fswrep/vocab.hpp"

namespace fswrep {

struct RawTuple {
    std::vector<std::string> words;  // one per schema group
    std::int64_t count = 1;          // optional multiplicity from the corpus file
};

struct Rejection {
    std::size_t line_no = 0;  // 1-based
    std::string reason;
};

struct LoadResult {
    std::vector<RawTuple> tuples;
    std::vector<Rejection> rejected;
};

struct LoadOptions {
    // Reject tokens containing anything but ASCII letters and digits.
    bool strict_tokens = true;
};

namespace detail {

inline bool ascii_alnum_token(const std::string& tok) {
    if (tok.empty()) return false;
    for (unsigned char c : tok) {
        if (!std::isalnum(c)) return false;
    }
    return true;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

inline bool parse_count(const std::string& field, std::int64_t& out) {
    if (field.empty()) return false;
    for (unsigned char c : field)
        if (!std::isdigit(c)) return false;
    try {
        out = std::stoll(field);
    } catch (const std::exception&) {
        return false;
    }
    return out >= 1;
}

// splitmix64-style mixer; used to derive per-epoch shuffle seeds.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Reads a tuple corpus: UTF-8, one record per line, N tab-separated words
// followed by an optional integer count. Malformed lines are rejected and
// logged, never fatal; an entirely unusable file is.
inline LoadResult load_tuples(const std::string& path, const GroupSchema& schema,
                              const LoadOptions& options = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file: " + path);

    const std::size_t arity = schema.arity();
    LoadResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        auto fields = detail::split_tabs(line);
        RawTuple tuple;
        if (fields.size() == arity + 1) {
            if (!detail::parse_count(fields.back(), tuple.count)) {
                result.rejected.push_back({line_no, "trailing field is not a count"});
                continue;
            }
            fields.pop_back();
        }
        if (fields.size() != arity) {
            result.rejected.push_back(
                {line_no, "expected " + std::to_string(arity) + " fields, got " +
                              std::to_string(fields.size())});
            continue;
        }
        bool bad = false;
        for (const auto& f : fields) {
            if (f.empty()) {
                result.rejected.push_back({line_no, "empty field"});
                bad = true;
                break;
            }
            if (options.strict_tokens && !detail::ascii_alnum_token(f)) {
                result.rejected.push_back({line_no, "non-alphanumeric token '" + f + "'"});
                bad = true;
                break;
            }
        }
        if (bad) continue;
        tuple.words = std::move(fields);
        result.tuples.push_back(std::move(tuple));
    }
    if (result.tuples.empty()) {
        throw DataError("no valid records in corpus file: " + path);
    }
    return result;
}

// Per-group frequency filter. Counts include record multiplicity. Indices
// are assigned by descending count, ties broken lexicographically.
inline Vocabulary build_vocab(const std::vector<RawTuple>& tuples,
                              const GroupSchema& schema, std::int64_t min_count = 50) {
    if (min_count < 1) throw ConfigError("min_count must be >= 1");
    const std::size_t arity = schema.arity();
    std::vector<std::unordered_map<std::string, std::int64_t>> freq(arity);
    for (const auto& t : tuples) {
        for (std::size_t g = 0; g < arity && g < t.words.size(); ++g) {
            freq[g][t.words[g]] += t.count;
        }
    }

    std::vector<Vocabulary::Group> groups(arity);
    for (std::size_t g = 0; g < arity; ++g) {
        std::vector<std::pair<std::string, std::int64_t>> kept;
        for (const auto& [word, count] : freq[g]) {
            if (count >= min_count) kept.emplace_back(word, count);
        }
        if (kept.empty()) {
            throw ConfigError("group '" + schema.name(g) +
                              "' has no words with frequency >= " +
                              std::to_string(min_count));
        }
        std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        auto& grp = groups[g];
        grp.words.reserve(kept.size());
        grp.counts.reserve(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i) {
            grp.words.push_back(kept[i].first);
            grp.counts.push_back(kept[i].second);
            grp.index.emplace(kept[i].first, static_cast<std::int32_t>(i));
        }
    }
    return Vocabulary(std::move(groups), min_count);
}

using Record = std::vector<std::int32_t>;

// Encoded N-slot records. Multiplicities are kept per record and expanded
// only logically at batching time.
struct TupleDataset {
    std::vector<std::int32_t> vocab_sizes;  // per group, for validation
    std::vector<Record> records;
    std::vector<std::int64_t> counts;  // parallel to records
    std::int64_t dropped = 0;          // records rejected during encoding

    std::size_t arity() const { return vocab_sizes.size(); }
    std::size_t size() const { return records.size(); }

    bool has_multiplicity() const {
        for (auto c : counts)
            if (c != 1) return true;
        return false;
    }

    std::int64_t total_count() const {
        return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    }
};

// Drops (and counts) tuples touching filtered-out words.
inline TupleDataset encode(const std::vector<RawTuple>& tuples, const Vocabulary& vocab) {
    TupleDataset ds;
    ds.vocab_sizes.resize(vocab.num_groups());
    for (std::size_t g = 0; g < vocab.num_groups(); ++g) {
        ds.vocab_sizes[g] = static_cast<std::int32_t>(vocab.size(g));
    }
    for (const auto& t : tuples) {
        Record rec(vocab.num_groups());
        bool ok = t.words.size() == vocab.num_groups();
        for (std::size_t g = 0; ok && g < rec.size(); ++g) {
            std::int32_t idx = vocab.lookup(g, t.words[g]);
            if (idx < 0) {
                ok = false;
            } else {
                rec[g] = idx;
            }
        }
        if (!ok) {
            ++ds.dropped;
            continue;
        }
        ds.records.push_back(std::move(rec));
        ds.counts.push_back(t.count);
    }
    return ds;
}

// Record indices for one epoch, shuffled and partitioned into batches.
// Identical (dataset, seed, epoch) always yields the identical sequence.
// Without multiplicities the epoch is an exact permutation; with them it is
// total_count() weighted draws with replacement (the logical expansion).
inline std::vector<std::vector<std::size_t>> epoch_batches(const TupleDataset& dataset,
                                                           std::size_t batch_size,
                                                           std::uint64_t seed,
                                                           std::int64_t epoch) {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    std::mt19937_64 rng(detail::mix64(seed, static_cast<std::uint64_t>(epoch)));

    std::vector<std::size_t> order;
    if (!dataset.has_multiplicity()) {
        order.resize(dataset.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
    } else {
        std::vector<double> weights(dataset.counts.begin(), dataset.counts.end());
        std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
        order.resize(static_cast<std::size_t>(dataset.total_count()));
        for (auto& slot : order) slot = pick(rng);
    }

    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        std::size_t end = std::min(order.size(), start + batch_size);
        batches.emplace_back(order.begin() + start, order.begin() + end);
    }
    return batches;
}

// Replaces the `role` slot with a uniform draw over that group's vocabulary,
// excluding the original index.
inline Record corrupt(const Record& record, std::size_t role, const Vocabulary& vocab,
                      std::mt19937_64& rng) {
    if (role >= record.size()) throw ConfigError("corrupt: role index out of range");
    const auto vocab_size = static_cast<std::int32_t>(vocab.size(role));
    if (vocab_size < 2) {
        throw DataError("cannot corrupt: group vocabulary has a single word");
    }
    std::uniform_int_distribution<std::int32_t> pick(0, vocab_size - 2);
    std::int32_t draw = pick(rng);
    if (draw >= record[role]) ++draw;  // skip the original
    Record out = record;
    out[role] = draw;
    return out;
}

}  // namespace fswrep
