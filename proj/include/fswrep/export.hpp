#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fswrep/error.hpp"
#include "fswrep/matrix.hpp"
#include "fswrep/model.hpp"

namespace fswrep {

// Plain-text embedding layout: header `<vocab_size> <d>`, then one
// `word f1 .. fd` row per word, floats with 6 significant digits. In `sep`
// mode the merged (averaged) vectors are exported.
inline std::vector<std::filesystem::path> export_vectors(
    const JointModel& model, const std::filesystem::path& dir,
    const std::string& prefix = "vectors") {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    char buf[64];
    for (std::size_t g = 0; g < model.num_groups(); ++g) {
        Matrix merged = model.merged_embedding(g);
        auto path = dir / (prefix + "." + model.schema.name(g) + ".txt");
        std::ofstream out(path);
        if (!out) throw IoError("cannot write vector file: " + path.string());
        out << merged.rows() << ' ' << merged.cols() << '\n';
        for (std::size_t i = 0; i < merged.rows(); ++i) {
            out << model.vocab.word(g, static_cast<std::int32_t>(i));
            const double* row = merged.row(i);
            for (std::size_t j = 0; j < merged.cols(); ++j) {
                std::snprintf(buf, sizeof(buf), "%.6g", row[j]);
                out << ' ' << buf;
            }
            out << '\n';
        }
        if (!out) throw IoError("write failure on vector file: " + path.string());
        written.push_back(std::move(path));
    }
    return written;
}

struct TextVectors {
    std::vector<std::string> words;
    Matrix vectors;
};

inline TextVectors import_vectors(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vector file: " + path.string());
    std::size_t n = 0, d = 0;
    std::string header;
    if (!std::getline(in, header) || !(std::istringstream(header) >> n >> d)) {
        throw DataError("vector file missing `<count> <dim>` header: " + path.string());
    }
    TextVectors tv;
    tv.words.reserve(n);
    tv.vectors = Matrix(n, d);
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) {
            throw DataError("vector file truncated: " + path.string());
        }
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        tv.words.push_back(word);
        double* row = tv.vectors.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            if (!(ss >> row[j])) {
                throw DataError("vector file row too short at line " + std::to_string(i + 2));
            }
        }
    }
    return tv;
}

}  // namespace fswrep
