#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fswrep/error.hpp"
#include "fswrep/model.hpp"

namespace fswrep {

// The six event composition functions. Output arity: VerbOnly, Addition and
// CopyObject give d; Concat gives 3d; ConcatAddition gives 2d; Network is a
// scalar plausibility.
enum class CompositionKind {
    VerbOnly,
    Addition,
    CopyObject,
    Concat,
    ConcatAddition,
    Network,
};

inline const char* composition_name(CompositionKind kind) {
    switch (kind) {
        case CompositionKind::VerbOnly: return "verb-only";
        case CompositionKind::Addition: return "addition";
        case CompositionKind::CopyObject: return "copy-object";
        case CompositionKind::Concat: return "concat";
        case CompositionKind::ConcatAddition: return "concat-addition";
        case CompositionKind::Network: return "network";
    }
    return "?";
}

inline CompositionKind parse_composition(const std::string& name) {
    for (auto kind : {CompositionKind::VerbOnly, CompositionKind::Addition,
                      CompositionKind::CopyObject, CompositionKind::Concat,
                      CompositionKind::ConcatAddition, CompositionKind::Network}) {
        if (name == composition_name(kind)) return kind;
    }
    throw ConfigError(
        "unknown composition '" + name +
        "' (expected one of: verb-only, addition, copy-object, concat, "
        "concat-addition, network)");
}

// An (S,V,O) event; words resolve against slots 0,1,2 of a 3-group schema.
struct Event {
    std::string s, v, o;
};

struct CosineStats {
    std::int64_t zero_norm = 0;  // pairs where a zero vector forced cosine := 0
};

// u.v / (|u||v|); 0 when either norm is zero (counted when stats given).
inline double cosine(std::span<const double> u, std::span<const double> v,
                     CosineStats* stats = nullptr) {
    if (u.size() != v.size()) throw ConfigError("cosine: dimensionality mismatch");
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uu += u[i] * u[i];
        vv += v[i] * v[i];
        uv += u[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) {
        if (stats) ++stats->zero_norm;
        return 0.0;
    }
    return uv / (std::sqrt(uu) * std::sqrt(vv));
}

namespace detail {

struct ResolvedEvent {
    std::span<const double> s, v, o;
    Record record;
};

inline ResolvedEvent resolve_event(const ScoringView& view, const Event& e) {
    if (view.model().num_groups() != 3) {
        throw ConfigError("event composition requires a 3-group model");
    }
    ResolvedEvent r;
    r.record = {view.require_word(0, e.s), view.require_word(1, e.v),
                view.require_word(2, e.o)};
    r.s = view.vector_of(0, r.record[0]);
    r.v = view.vector_of(1, r.record[1]);
    r.o = view.vector_of(2, r.record[2]);
    return r;
}

}  // namespace detail

// Composes one event. Network yields a single-element vector holding the
// scalar plausibility.
inline std::vector<double> compose_event(const ScoringView& view, const Event& event,
                                         CompositionKind kind, bool include_bias = true) {
    auto r = detail::resolve_event(view, event);
    const std::size_t d = view.dim();
    std::vector<double> out;
    switch (kind) {
        case CompositionKind::VerbOnly:
            out.assign(r.v.begin(), r.v.end());
            break;
        case CompositionKind::Addition:
            out.resize(d);
            for (std::size_t i = 0; i < d; ++i) out[i] = r.s[i] + r.v[i] + r.o[i];
            break;
        case CompositionKind::CopyObject: {
            // s scaled elementwise by the scalar v.o
            double vo = dot(r.v, r.o);
            out.resize(d);
            for (std::size_t i = 0; i < d; ++i) out[i] = r.s[i] * vo;
            break;
        }
        case CompositionKind::Concat:
            out.reserve(3 * d);
            out.insert(out.end(), r.s.begin(), r.s.end());
            out.insert(out.end(), r.v.begin(), r.v.end());
            out.insert(out.end(), r.o.begin(), r.o.end());
            break;
        case CompositionKind::ConcatAddition:
            // [s,v] + [v,o]
            out.resize(2 * d);
            for (std::size_t i = 0; i < d; ++i) {
                out[i] = r.s[i] + r.v[i];
                out[d + i] = r.v[i] + r.o[i];
            }
            break;
        case CompositionKind::Network:
            out.push_back(view.record_plausibility(r.record, include_bias));
            break;
    }
    return out;
}

// Vector compositions: cosine of the two composed vectors. Network: the
// plausibility of the landmark event (shared S,O with the second verb);
// requires the pair to differ only in V.
inline double event_similarity_score(const ScoringView& view, const Event& e1,
                                     const Event& e2, CompositionKind kind,
                                     bool include_bias = true,
                                     CosineStats* stats = nullptr) {
    if (kind == CompositionKind::Network) {
        if (e1.s != e2.s || e1.o != e2.o) {
            throw ConfigError("network similarity needs events sharing S and O "
                              "(only V may vary)");
        }
        Event landmark{e1.s, e2.v, e1.o};
        return compose_event(view, landmark, CompositionKind::Network, include_bias)[0];
    }
    auto u = compose_event(view, e1, kind, include_bias);
    auto v = compose_event(view, e2, kind, include_bias);
    return cosine(u, v, stats);
}

}  // namespace fswrep
