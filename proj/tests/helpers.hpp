#pragma once

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "fswrep/corpus.hpp"
#include "fswrep/model.hpp"
#include "fswrep/schema.hpp"
#include "fswrep/vocab.hpp"

namespace testutil {

inline std::filesystem::path make_temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("fswrep_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& dir,
                                        const std::string& name,
                                        const std::string& content) {
    std::filesystem::create_directories(dir);
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

// A vocabulary with the given words per group, in the given index order
// (synthetic counts keep the order stable).
inline fswrep::Vocabulary toy_vocab(const std::vector<std::vector<std::string>>& words) {
    std::vector<fswrep::Vocabulary::Group> groups(words.size());
    for (std::size_t g = 0; g < words.size(); ++g) {
        auto& grp = groups[g];
        for (std::size_t i = 0; i < words[g].size(); ++i) {
            grp.words.push_back(words[g][i]);
            grp.counts.push_back(static_cast<std::int64_t>(words[g].size() - i + 50));
            grp.index.emplace(words[g][i], static_cast<std::int32_t>(i));
        }
    }
    return fswrep::Vocabulary(std::move(groups), 1);
}

// Numbered placeholder vocabularies, e.g. sizes {3,4} -> g0w0.., g1w0..
inline fswrep::Vocabulary sized_vocab(const std::vector<std::size_t>& sizes) {
    std::vector<std::vector<std::string>> words(sizes.size());
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        for (std::size_t i = 0; i < sizes[g]; ++i) {
            words[g].push_back("g" + std::to_string(g) + "w" + std::to_string(i));
        }
    }
    return toy_vocab(words);
}

inline fswrep::GroupSchema schema_of_arity(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("G" + std::to_string(i));
    return fswrep::GroupSchema(std::move(names));
}

// Uniform random records for a model's vocabulary sizes.
inline std::vector<fswrep::Record> random_batch(const fswrep::JointModel& model,
                                                std::size_t n, std::mt19937_64& rng) {
    std::vector<fswrep::Record> batch(n);
    for (auto& rec : batch) {
        rec.resize(model.num_groups());
        for (std::size_t g = 0; g < model.num_groups(); ++g) {
            std::uniform_int_distribution<std::int32_t> pick(
                0, static_cast<std::int32_t>(model.vocab.size(g)) - 1);
            rec[g] = pick(rng);
        }
    }
    return batch;
}

}  // namespace testutil
