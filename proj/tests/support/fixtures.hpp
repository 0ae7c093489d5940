#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "goalspot/kb.hpp"

namespace fixtures {

using namespace goalspot;

inline Assessed pr(double v) { return Assessed{v, std::nullopt}; }

inline EvidenceNode term(std::string id, std::string lemma, bool zeroDerivation = false) {
    EvidenceNode n;
    n.id = std::move(id);
    n.kind = NodeKind::Term;
    n.surfaces = {SurfaceForm{{std::move(lemma)}, false}};
    n.zeroDerivation = zeroDerivation;
    return n;
}

inline Link plain(std::string goal, std::string node, double p) {
    return Link{std::move(goal), std::move(node), PlainProb{pr(p)}};
}

inline KbData base(std::vector<Goal> goals) {
    KbData d;
    d.meta.name = "fixture";
    d.goals = std::move(goals);
    return d;
}

// g1 -- print p=0.3, g2 -- chart p=0.2, leak 0.001.
inline KbData print_chart() {
    KbData d = base({{"g1", "Print a document", 0.5}, {"g2", "Make a chart", 0.5}});
    d.scale = BucketScale{0.002, 0.9};
    d.leak = 0.001;
    d.nodes = {term("chart", "chart"), term("print", "print", true)};
    d.links = {plain("g1", "print", 0.3), plain("g2", "chart", 0.2)};
    return d;
}

// Creation goal favours an indefinite chart, modification a definite one.
inline KbData create_modify() {
    KbData d = base({{"create", "Create a chart", 0.5}, {"modify", "Change an existing chart", 0.5}});
    d.nodes = {term("chart", "chart"), term("chang", "chang"), term("creat", "creat")};
    d.links = {
        Link{"create", "chart", DefinitenessSplit{pr(0.6), pr(0.05)}},
        Link{"modify", "chart", DefinitenessSplit{pr(0.05), pr(0.6)}},
        plain("create", "creat", 0.4),
        plain("modify", "chang", 0.4),
    };
    return d;
}

inline std::filesystem::path data_dir() { return GOALSPOT_TEST_DATA_DIR; }

}  // namespace fixtures
