#pragma once

#include <cstddef>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "fswrep/error.hpp"

namespace fswrep {

// Ordered word-group labels, e.g. {"S","V","O"}. Every tuple record must
// carry exactly one word per group, in this order.
class GroupSchema {
public:
    GroupSchema() = default;

    explicit GroupSchema(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.size() < 2) {
            throw ConfigError("schema needs at least 2 groups, got " +
                              std::to_string(names_.size()));
        }
        std::unordered_set<std::string> seen;
        for (const auto& n : names_) {
            if (n.empty()) throw ConfigError("schema group labels must be non-empty");
            if (!seen.insert(n).second) {
                throw ConfigError("duplicate group label '" + n + "' in schema");
            }
        }
    }

    // Comma-separated label list, e.g. "S,V,O".
    static GroupSchema parse(const std::string& spec) {
        std::vector<std::string> names;
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) names.push_back(item);
        return GroupSchema(std::move(names));
    }

    static GroupSchema svo() { return GroupSchema({"S", "V", "O"}); }

    std::size_t arity() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(std::size_t g) const { return names_.at(g); }

    // Index of a group label; throws if the label is unknown.
    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == label) return i;
        }
        throw LookupError("unknown group '" + label + "' (schema: " + joined() + ")");
    }

    bool has(const std::string& label) const {
        for (const auto& n : names_)
            if (n == label) return true;
        return false;
    }

    std::string joined(char sep = ',') const {
        std::string out;
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (i) out += sep;
            out += names_[i];
        }
        return out;
    }

    bool operator==(const GroupSchema& other) const { return names_ == other.names_; }

private:
    std::vector<std::string> names_;
};

}  // namespace fswrep
