#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "fswrep/error.hpp"
#include "fswrep/model.hpp"
#include "fswrep/training.hpp"

namespace fswrep {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");
static_assert(std::numeric_limits<double>::is_iec559, "IEEE-754 doubles required");

namespace detail {

constexpr char kCheckpointMagic[8] = {'F', 'S', 'W', 'R', 'E', 'P', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw CheckpointError("checkpoint truncated");
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_pod(out, static_cast<std::uint64_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
    std::uint64_t n = 0;
    read_pod(in, n);
    if (n > (1ULL << 32)) throw CheckpointError("checkpoint corrupt: oversized string");
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    if (!in) throw CheckpointError("checkpoint truncated");
    return s;
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
    write_pod(out, static_cast<std::uint64_t>(m.rows()));
    write_pod(out, static_cast<std::uint64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data().data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
}

inline Matrix read_matrix(std::istream& in) {
    std::uint64_t rows = 0, cols = 0;
    read_pod(in, rows);
    read_pod(in, cols);
    if (rows * cols > (1ULL << 34)) throw CheckpointError("checkpoint corrupt: oversized matrix");
    Matrix m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data().data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw CheckpointError("checkpoint truncated");
    return m;
}

}  // namespace detail

struct Checkpoint {
    JointModel model;
    AdamState adam;
    TrainConfig config;
};

inline void save_model(const JointModel& model, const AdamState& adam,
                       const TrainConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint: " + path.string());
    out.write(detail::kCheckpointMagic, sizeof(detail::kCheckpointMagic));
    detail::write_pod(out, detail::kCheckpointVersion);

    detail::write_pod(out, static_cast<std::uint8_t>(model.regime.sync));
    detail::write_pod(out, static_cast<std::uint8_t>(model.regime.shared));
    detail::write_pod(out, static_cast<std::uint64_t>(model.dim));

    detail::write_pod(out, static_cast<std::uint64_t>(config.batch_size));
    detail::write_pod(out, config.learning_rate);
    detail::write_pod(out, config.clip_norm);
    detail::write_pod(out, static_cast<std::uint64_t>(config.epochs));
    detail::write_pod(out, config.seed);
    detail::write_pod(out, config.adam_beta1);
    detail::write_pod(out, config.adam_beta2);
    detail::write_pod(out, config.adam_eps);
    detail::write_pod(out, static_cast<std::uint64_t>(config.start_epoch));
    detail::write_pod(out, static_cast<std::uint64_t>(config.subnet_filter.size()));
    for (std::size_t s : config.subnet_filter) {
        detail::write_pod(out, static_cast<std::uint64_t>(s));
    }

    detail::write_pod(out, static_cast<std::uint32_t>(model.schema.arity()));
    for (const auto& name : model.schema.names()) detail::write_string(out, name);
    detail::write_pod(out, model.vocab.min_count());
    for (std::size_t g = 0; g < model.num_groups(); ++g) {
        const auto& grp = model.vocab.group(g);
        detail::write_pod(out, static_cast<std::uint64_t>(grp.words.size()));
        for (std::size_t i = 0; i < grp.words.size(); ++i) {
            detail::write_string(out, grp.words[i]);
            detail::write_pod(out, grp.counts[i]);
        }
    }

    detail::write_pod(out, static_cast<std::uint64_t>(model.embeddings.size()));
    for (const auto& m : model.embeddings) detail::write_matrix(out, m);
    detail::write_pod(out, static_cast<std::uint64_t>(model.biases.size()));
    for (const auto& b : model.biases) detail::write_matrix(out, b);

    detail::write_pod(out, adam.t);
    detail::write_pod(out, static_cast<std::uint64_t>(adam.m.size()));
    for (const auto& m : adam.m) detail::write_matrix(out, m);
    for (const auto& v : adam.v) detail::write_matrix(out, v);

    if (!out) throw IoError("write failure on checkpoint: " + path.string());
}

inline Checkpoint load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path.string());
    char magic[sizeof(detail::kCheckpointMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, detail::kCheckpointMagic, sizeof(magic)) != 0) {
        throw CheckpointError("not a checkpoint file: " + path.string());
    }
    std::uint32_t version = 0;
    detail::read_pod(in, version);
    if (version != detail::kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }

    Checkpoint ck;
    std::uint8_t sync = 0, shared = 0;
    detail::read_pod(in, sync);
    detail::read_pod(in, shared);
    ck.model.regime = {sync != 0, shared != 0};
    std::uint64_t dim = 0;
    detail::read_pod(in, dim);
    ck.model.dim = dim;

    std::uint64_t u64 = 0;
    detail::read_pod(in, u64);
    ck.config.batch_size = u64;
    detail::read_pod(in, ck.config.learning_rate);
    detail::read_pod(in, ck.config.clip_norm);
    detail::read_pod(in, u64);
    ck.config.epochs = u64;
    detail::read_pod(in, ck.config.seed);
    detail::read_pod(in, ck.config.adam_beta1);
    detail::read_pod(in, ck.config.adam_beta2);
    detail::read_pod(in, ck.config.adam_eps);
    detail::read_pod(in, u64);
    ck.config.start_epoch = u64;
    ck.config.dim = ck.model.dim;
    ck.config.regime = ck.model.regime;
    detail::read_pod(in, u64);
    for (std::uint64_t i = 0; i < u64; ++i) {
        std::uint64_t s = 0;
        detail::read_pod(in, s);
        ck.config.subnet_filter.push_back(s);
    }

    std::uint32_t arity = 0;
    detail::read_pod(in, arity);
    std::vector<std::string> names;
    for (std::uint32_t g = 0; g < arity; ++g) names.push_back(detail::read_string(in));
    try {
        ck.model.schema = GroupSchema(std::move(names));
    } catch (const ConfigError& e) {
        throw CheckpointError(std::string("checkpoint schema invalid: ") + e.what());
    }

    std::int64_t min_count = 0;
    detail::read_pod(in, min_count);
    std::vector<Vocabulary::Group> groups(arity);
    for (std::uint32_t g = 0; g < arity; ++g) {
        std::uint64_t n = 0;
        detail::read_pod(in, n);
        auto& grp = groups[g];
        for (std::uint64_t i = 0; i < n; ++i) {
            grp.words.push_back(detail::read_string(in));
            std::int64_t c = 0;
            detail::read_pod(in, c);
            grp.counts.push_back(c);
            grp.index.emplace(grp.words.back(), static_cast<std::int32_t>(i));
        }
    }
    ck.model.vocab = Vocabulary(std::move(groups), min_count);
    ck.model.subnets = enumerate_subnets(arity);

    detail::read_pod(in, u64);
    const std::size_t expect_emb =
        ck.model.regime.shared ? arity : 2 * ck.model.subnets.size();
    if (u64 != expect_emb) {
        throw CheckpointError("checkpoint corrupt: embedding tensor count mismatch");
    }
    for (std::uint64_t i = 0; i < u64; ++i) {
        ck.model.embeddings.push_back(detail::read_matrix(in));
    }
    detail::read_pod(in, u64);
    if (u64 != ck.model.subnets.size()) {
        throw CheckpointError("checkpoint corrupt: bias tensor count mismatch");
    }
    for (std::uint64_t i = 0; i < u64; ++i) {
        ck.model.biases.push_back(detail::read_matrix(in));
    }

    // shape validation against schema, vocab and d
    for (std::size_t s = 0; s < ck.model.subnets.size(); ++s) {
        const auto& sn = ck.model.subnets[s];
        const auto src_rows = ck.model.vocab.size(static_cast<std::size_t>(sn.src));
        const auto dst_rows = ck.model.vocab.size(static_cast<std::size_t>(sn.dst));
        if (ck.model.input_matrix(s).rows() != src_rows ||
            ck.model.input_matrix(s).cols() != ck.model.dim ||
            ck.model.target_matrix(s).rows() != dst_rows ||
            ck.model.target_matrix(s).cols() != ck.model.dim ||
            ck.model.biases[s].rows() != 1 || ck.model.biases[s].cols() != dst_rows) {
            throw CheckpointError("checkpoint corrupt: parameter shapes disagree with "
                                  "vocabulary/dimensionality");
        }
    }

    detail::read_pod(in, ck.adam.t);
    detail::read_pod(in, u64);
    if (u64 != ck.model.embeddings.size() + ck.model.biases.size()) {
        throw CheckpointError("checkpoint corrupt: optimizer tensor count mismatch");
    }
    for (std::uint64_t i = 0; i < u64; ++i) ck.adam.m.push_back(detail::read_matrix(in));
    for (std::uint64_t i = 0; i < u64; ++i) ck.adam.v.push_back(detail::read_matrix(in));
    auto params = ck.model.params();
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->same_shape(ck.adam.m[i]) || !params[i]->same_shape(ck.adam.v[i])) {
            throw CheckpointError("checkpoint corrupt: optimizer state shape mismatch");
        }
    }
    return ck;
}

}  // namespace fswrep
