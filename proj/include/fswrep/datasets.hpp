#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fswrep/compose.hpp"
#include "fswrep/error.hpp"

namespace fswrep {

// Event-pair similarity items: `s1 v1 o1 s2 v2 o2 score`, one per line,
// whitespace-separated, score = mean human rating.
struct SimilarityDataset {
    struct Item {
        Event e1, e2;
        double score = 0.0;
    };
    std::string name;
    std::vector<Item> items;
};

inline SimilarityDataset load_similarity_dataset(const std::string& path,
                                                 const std::string& name = "") {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open similarity dataset: " + path);
    SimilarityDataset ds;
    ds.name = name.empty() ? path : name;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        SimilarityDataset::Item item;
        if (!(ss >> item.e1.s >> item.e1.v >> item.e1.o >> item.e2.s >> item.e2.v >>
              item.e2.o >> item.score)) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected `s1 v1 o1 s2 v2 o2 score`");
        }
        ds.items.push_back(std::move(item));
    }
    return ds;
}

enum class ThematicRole { Agent, Patient };

inline const char* role_name(ThematicRole r) {
    return r == ThematicRole::Agent ? "agent" : "patient";
}

// Thematic-fit items: `verb noun role score`, role in {agent, patient},
// human rating on a 1-7 scale.
struct ThematicFitDataset {
    struct Item {
        std::string verb, noun;
        ThematicRole role = ThematicRole::Agent;
        double score = 0.0;
    };
    std::string name;
    std::vector<Item> items;
};

inline ThematicFitDataset load_thematic_dataset(const std::string& path,
                                                const std::string& name = "") {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open thematic-fit dataset: " + path);
    ThematicFitDataset ds;
    ds.name = name.empty() ? path : name;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        ThematicFitDataset::Item item;
        std::string role;
        if (!(ss >> item.verb >> item.noun >> role >> item.score)) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected `verb noun role score`");
        }
        if (role == "agent") {
            item.role = ThematicRole::Agent;
        } else if (role == "patient") {
            item.role = ThematicRole::Patient;
        } else {
            throw DataError(path + ":" + std::to_string(line_no) + ": role '" + role +
                            "' must be agent or patient");
        }
        ds.items.push_back(std::move(item));
    }
    return ds;
}

}  // namespace fswrep
