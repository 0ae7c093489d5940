#include "goalspot/kb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <type_traits>

#include "goalspot/kb_io.hpp"

namespace goalspot {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Term: return "term";
        case NodeKind::Phrase: return "phrase";
        case NodeKind::Metonym: return "metonym";
    }
    return "term";
}

std::optional<NodeKind> parse_node_kind(std::string_view s) {
    if (s == "term") return NodeKind::Term;
    if (s == "phrase") return NodeKind::Phrase;
    if (s == "metonym") return NodeKind::Metonym;
    return std::nullopt;
}

std::string_view to_string(FunctionWordClass c) {
    switch (c) {
        case FunctionWordClass::ArticleIndef: return "article-indef";
        case FunctionWordClass::ArticleDef: return "article-def";
        case FunctionWordClass::Possessive: return "possessive";
        case FunctionWordClass::Preposition: return "preposition";
        case FunctionWordClass::Demonstrative: return "demonstrative";
        case FunctionWordClass::Other: return "other";
    }
    return "other";
}

std::optional<FunctionWordClass> parse_function_word_class(std::string_view s) {
    for (auto c : {FunctionWordClass::ArticleIndef, FunctionWordClass::ArticleDef, FunctionWordClass::Possessive,
                   FunctionWordClass::Preposition, FunctionWordClass::Demonstrative, FunctionWordClass::Other}) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

IndefinitenessModel IndefinitenessModel::defaults() {
    IndefinitenessModel m;
    m.priorIndef = 0.5;
    auto add = [&](const char* w, double pi, double pd, FunctionWordClass c) {
        m.functionWords.emplace(w, FunctionWord{pi, pd, c});
    };
    add("a", 0.9, 0.05, FunctionWordClass::ArticleIndef);
    add("an", 0.9, 0.05, FunctionWordClass::ArticleIndef);
    add("the", 0.05, 0.8, FunctionWordClass::ArticleDef);
    add("this", 0.05, 0.8, FunctionWordClass::Demonstrative);
    add("that", 0.05, 0.8, FunctionWordClass::Demonstrative);
    add("my", 0.02, 0.7, FunctionWordClass::Possessive);
    add("your", 0.02, 0.7, FunctionWordClass::Possessive);
    add("our", 0.02, 0.7, FunctionWordClass::Possessive);
    add("its", 0.02, 0.7, FunctionWordClass::Possessive);
    add("under", 0.1, 0.6, FunctionWordClass::Preposition);
    add("on", 0.1, 0.6, FunctionWordClass::Preposition);
    add("in", 0.1, 0.6, FunctionWordClass::Preposition);
    return m;
}

double prior_mixed_probability(const LinkProbs& probs, double priorIndef, double nounVerbPrior) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PlainProb>) {
                return v.p.value;
            } else if constexpr (std::is_same_v<T, DefinitenessSplit>) {
                return v.pIndef.value * priorIndef + v.pDef.value * (1.0 - priorIndef);
            } else if constexpr (std::is_same_v<T, NounVerbSplit>) {
                return v.pNoun.value * nounVerbPrior + v.pVerb.value * (1.0 - nounVerbPrior);
            } else {
                double noun = v.pNounIndef.value * priorIndef + v.pNounDef.value * (1.0 - priorIndef);
                return nounVerbPrior * noun + (1.0 - nounVerbPrior) * v.pVerb.value;
            }
        },
        probs);
}

KnowledgeBase KnowledgeBase::build(KbData data) {
    auto violations = validate_kb(data);
    if (!violations.empty()) throw KbError(std::move(violations));
    return KnowledgeBase(std::move(data));
}

KnowledgeBase::KnowledgeBase(KbData data) : data_(std::move(data)) {
    const auto& goals = data_.goals;
    const auto& nodes = data_.nodes;

    goalIndex_.reserve(goals.size());
    for (std::size_t i = 0; i < goals.size(); ++i) goalIndex_.emplace(goals[i].id, i);
    nodeIndex_.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) nodeIndex_.emplace(nodes[i].id, i);
    for (const auto& [w, fw] : data_.indefiniteness.functionWords) functionWords_.emplace(w, fw);

    std::vector<std::size_t> byId(nodes.size());
    std::iota(byId.begin(), byId.end(), std::size_t{0});
    std::sort(byId.begin(), byId.end(), [&](std::size_t a, std::size_t b) { return nodes[a].id < nodes[b].id; });
    nodeOrder_.resize(nodes.size());
    for (std::size_t r = 0; r < byId.size(); ++r) nodeOrder_[byId[r]] = r;

    goalLinks_.resize(goals.size());
    nodeGoals_.resize(nodes.size());
    const double priorIndef = data_.indefiniteness.priorIndef;
    for (std::size_t li = 0; li < data_.links.size(); ++li) {
        const auto& link = data_.links[li];
        std::size_t g = goalIndex_.at(link.goalId);
        std::size_t n = nodeIndex_.at(link.nodeId);
        CompiledLink c;
        c.node = n;
        c.link = li;
        c.absentProb = prior_mixed_probability(link.probs, priorIndef, data_.nounVerbPrior);
        c.logAbsent = std::log1p(-c.absentProb);
        goalLinks_[g].push_back(c);
        nodeGoals_[n].push_back(g);
    }
    for (auto& v : goalLinks_) {
        std::sort(v.begin(), v.end(),
                  [&](const CompiledLink& a, const CompiledLink& b) { return nodeOrder_[a.node] < nodeOrder_[b.node]; });
    }

    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const auto& node = nodes[n];
        for (std::size_t s = 0; s < node.surfaces.size(); ++s) {
            const auto& surface = node.surfaces[s];
            bool exact = node.surface_is_exact(surface);
            auto& index = exact ? exactSurfaces_ : foldedSurfaces_;
            index[surface.tokens.front()].push_back(SurfaceEntry{n, s, exact});
        }
    }
    auto byLength = [&](const SurfaceEntry& a, const SurfaceEntry& b) {
        std::size_t la = nodes[a.node].surfaces[a.surface].tokens.size();
        std::size_t lb = nodes[b.node].surfaces[b.surface].tokens.size();
        if (la != lb) return la > lb;
        if (a.node != b.node) return a.node < b.node;
        return a.surface < b.surface;
    };
    for (auto& [k, v] : exactSurfaces_) std::sort(v.begin(), v.end(), byLength);
    for (auto& [k, v] : foldedSurfaces_) std::sort(v.begin(), v.end(), byLength);
}

std::optional<std::size_t> KnowledgeBase::find_goal(std::string_view id) const {
    auto it = goalIndex_.find(std::string(id));
    if (it == goalIndex_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> KnowledgeBase::find_node(std::string_view id) const {
    auto it = nodeIndex_.find(std::string(id));
    if (it == nodeIndex_.end()) return std::nullopt;
    return it->second;
}

const FunctionWord* KnowledgeBase::find_function_word(std::string_view lower) const {
    auto it = functionWords_.find(std::string(lower));
    return it == functionWords_.end() ? nullptr : &it->second;
}

const std::vector<SurfaceEntry>* KnowledgeBase::surfaces_starting_with(std::string_view key, bool exact) const {
    const auto& index = exact ? exactSurfaces_ : foldedSurfaces_;
    auto it = index.find(std::string(key));
    return it == index.end() ? nullptr : &it->second;
}

}  // namespace goalspot
