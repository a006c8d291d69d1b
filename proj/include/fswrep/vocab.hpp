#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fswrep/error.hpp"
#include "fswrep/schema.hpp"

namespace fswrep {

// Per-group word <-> index maps with corpus counts. Indices are dense
// 0..|V_g|-1, assigned by descending frequency with lexicographic
// tie-breaking, so identical corpora always yield identical indices.
// Groups may share surface forms but their indices are independent.
class Vocabulary {
public:
    struct Group {
        std::vector<std::string> words;       // index -> word
        std::vector<std::int64_t> counts;     // index -> corpus count
        std::unordered_map<std::string, std::int32_t> index;
    };

    Vocabulary() = default;
    Vocabulary(std::vector<Group> groups, std::int64_t min_count)
        : groups_(std::move(groups)), min_count_(min_count) {}

    std::size_t num_groups() const { return groups_.size(); }
    const Group& group(std::size_t g) const { return groups_.at(g); }
    std::size_t size(std::size_t g) const { return groups_.at(g).words.size(); }
    std::int64_t min_count() const { return min_count_; }

    // -1 when the word is not in the group's vocabulary.
    std::int32_t lookup(std::size_t g, const std::string& word) const {
        const auto& idx = groups_.at(g).index;
        auto it = idx.find(word);
        return it == idx.end() ? -1 : it->second;
    }

    const std::string& word(std::size_t g, std::int32_t i) const {
        return groups_.at(g).words.at(static_cast<std::size_t>(i));
    }

    std::int64_t count(std::size_t g, std::int32_t i) const {
        return groups_.at(g).counts.at(static_cast<std::size_t>(i));
    }

    bool operator==(const Vocabulary& other) const {
        if (min_count_ != other.min_count_ || groups_.size() != other.groups_.size())
            return false;
        for (std::size_t g = 0; g < groups_.size(); ++g) {
            if (groups_[g].words != other.groups_[g].words) return false;
            if (groups_[g].counts != other.groups_[g].counts) return false;
        }
        return true;
    }

private:
    std::vector<Group> groups_;
    std::int64_t min_count_ = 1;
};

// One file per group: `word<TAB>count`, frequency-descending (= index order).
inline void dump_vocab(const Vocabulary& vocab, const GroupSchema& schema,
                       const std::filesystem::path& dir,
                       const std::string& prefix = "vocab") {
    std::filesystem::create_directories(dir);
    for (std::size_t g = 0; g < schema.arity(); ++g) {
        auto path = dir / (prefix + "." + schema.name(g) + ".txt");
        std::ofstream out(path);
        if (!out) throw IoError("cannot write vocabulary dump: " + path.string());
        const auto& grp = vocab.group(g);
        for (std::size_t i = 0; i < grp.words.size(); ++i) {
            out << grp.words[i] << '\t' << grp.counts[i] << '\n';
        }
    }
}

}  // namespace fswrep
