#include "goalspot/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <type_traits>

#include "goalspot/errors.hpp"

namespace goalspot {

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::SeenLinked: return "seen-linked";
        case Outcome::UnseenLinked: return "unseen-linked";
        case Outcome::SeenUnlinked: return "seen-unlinked";
        case Outcome::UnseenUnlinked: return "unseen-unlinked";
    }
    return "seen-linked";
}

double effective_term_prob(const LinkProbs& probs, const UsageResolution& usage) {
    const double pI = usage.pIndefinite;
    const double uN = usage.pNoun;
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PlainProb>) {
                return v.p.value;
            } else if constexpr (std::is_same_v<T, DefinitenessSplit>) {
                return v.pIndef.value * pI + v.pDef.value * (1.0 - pI);
            } else if constexpr (std::is_same_v<T, NounVerbSplit>) {
                return v.pNoun.value * uN + v.pVerb.value * (1.0 - uN);
            } else {
                // Verbs take no articles: definiteness only mixes the noun branch.
                double noun = v.pNounIndef.value * pI + v.pNounDef.value * (1.0 - pI);
                return uN * noun + (1.0 - uN) * v.pVerb.value;
            }
        },
        probs);
}

namespace {

// Activation per node index, after checking the analysis belongs to `kb`.
std::vector<const Activation*> index_activations(const KnowledgeBase& kb, const QueryAnalysis& analysis) {
    std::vector<const Activation*> byNode(kb.nodes().size(), nullptr);
    for (const auto& a : analysis.activations) {
        if (a.node >= byNode.size() || kb.nodes()[a.node].id != a.nodeId)
            throw ContractViolation("activation '" + a.nodeId + "' does not belong to this knowledge base");
        if (byNode[a.node]) throw ContractViolation("node '" + a.nodeId + "' activated twice");
        byNode[a.node] = &a;
    }
    return byNode;
}

struct GoalTally {
    double logScore = 0.0;
    std::size_t seenUnlinked = 0;    // l
    std::size_t unseenUnlinked = 0;  // m
};

GoalTally tally_goal(const KnowledgeBase& kb, std::size_t goal, const std::vector<const Activation*>& byNode,
                     std::size_t activations, double logLeak, double logNoLeak,
                     std::vector<ExplanationFactor>* factors) {
    const auto& links = kb.goal_links(goal);
    double acc = 0.0;
    std::size_t seenLinked = 0;
    for (const auto& c : links) {
        const Activation* act = byNode[c.node];
        if (act) {
            double p = effective_term_prob(kb.links()[c.link].probs, act->usage);
            double lp = std::log(p);
            acc += lp;
            ++seenLinked;
            if (factors) factors->push_back({kb.nodes()[c.node].id, Outcome::SeenLinked, p, lp, p, 1});
        } else {
            acc += c.logAbsent;
            if (factors)
                factors->push_back(
                    {kb.nodes()[c.node].id, Outcome::UnseenLinked, 1.0 - c.absentProb, c.logAbsent, c.absentProb, 1});
        }
    }
    GoalTally t;
    t.seenUnlinked = activations - seenLinked;
    t.unseenUnlinked = kb.nodes().size() - links.size() - t.seenUnlinked;
    const double l = static_cast<double>(t.seenUnlinked);
    const double m = static_cast<double>(t.unseenUnlinked);
    t.logScore = std::log(kb.goals()[goal].prior) + acc + l * logLeak + m * logNoLeak;
    if (factors) {
        factors->push_back({std::string(kLeakAggregate), Outcome::SeenUnlinked, std::exp(l * logLeak), l * logLeak,
                            std::nullopt, t.seenUnlinked});
        factors->push_back({std::string(kAbsentAggregate), Outcome::UnseenUnlinked, std::exp(m * logNoLeak),
                            m * logNoLeak, std::nullopt, t.unseenUnlinked});
    }
    return t;
}

std::vector<std::size_t> order_by_rank(const std::vector<PostingScore>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a].logScore != scores[b].logScore) return scores[a].logScore > scores[b].logScore;
        return scores[a].goalId < scores[b].goalId;
    });
    return order;
}

std::vector<ExplanationFactor> factors_for(const KnowledgeBase& kb, const QueryAnalysis& analysis, std::size_t goal) {
    auto byNode = index_activations(kb, analysis);
    std::vector<ExplanationFactor> factors;
    tally_goal(kb, goal, byNode, analysis.activations.size(), std::log(kb.leak()), std::log1p(-kb.leak()), &factors);
    return factors;
}

}  // namespace

std::vector<PostingScore> score_goals(const KnowledgeBase& kb, const QueryAnalysis& analysis, bool withExplanations) {
    auto byNode = index_activations(kb, analysis);
    const double logLeak = std::log(kb.leak());
    const double logNoLeak = std::log1p(-kb.leak());
    const std::size_t activations = analysis.activations.size();

    std::vector<PostingScore> scores(kb.goals().size());
    double maxLog = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < scores.size(); ++g) {
        auto& s = scores[g];
        s.goal = g;
        s.goalId = kb.goals()[g].id;
        auto t = tally_goal(kb, g, byNode, activations, logLeak, logNoLeak, withExplanations ? &s.factors : nullptr);
        s.logScore = t.logScore;
        maxLog = std::max(maxLog, s.logScore);
    }

    // Normalizer computed relative to the best score so nothing underflows
    // for the leading goals.
    double total = 0.0;
    for (auto& s : scores) {
        s.posterior = std::exp(s.logScore - maxLog);
        total += s.posterior;
    }
    for (auto& s : scores) s.posterior /= total;

    auto order = order_by_rank(scores);
    for (std::size_t r = 0; r < order.size(); ++r) scores[order[r]].rank = r + 1;
    return scores;
}

std::vector<PostingScore> rank_all(const KnowledgeBase& kb, const QueryAnalysis& analysis, bool withExplanations) {
    auto scores = score_goals(kb, analysis, withExplanations);
    std::sort(scores.begin(), scores.end(), [](const PostingScore& a, const PostingScore& b) { return a.rank < b.rank; });
    return scores;
}

RankResult rank(const KnowledgeBase& kb, std::string_view queryText, const RankOptions& options) {
    if (options.topK < 1) throw DomainError("topK must be at least 1");
    RankResult result;
    result.analysis = analyze(queryText, kb, options.text_options());
    auto all = rank_all(kb, result.analysis, false);
    if (all.size() > options.topK) all.resize(options.topK);
    if (options.explain) {
        for (auto& p : all) p.factors = factors_for(kb, result.analysis, p.goal);
    }
    result.postings = std::move(all);
    return result;
}

std::vector<ExplanationFactor> explain(const KnowledgeBase& kb, std::string_view queryText, std::string_view goalId,
                                       const RankOptions& options) {
    auto goal = kb.find_goal(goalId);
    if (!goal) throw NotFoundError("unknown goal '" + std::string(goalId) + "'");
    auto analysis = analyze(queryText, kb, options.text_options());
    return factors_for(kb, analysis, *goal);
}

}  // namespace goalspot
