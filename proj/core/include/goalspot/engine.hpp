#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "goalspot/kb.hpp"
#include "goalspot/text_pipeline.hpp"

namespace goalspot {

enum class Outcome { SeenLinked, UnseenLinked, SeenUnlinked, UnseenUnlinked };

std::string_view to_string(Outcome o);

inline constexpr std::string_view kLeakAggregate = "leak-aggregate";
inline constexpr std::string_view kAbsentAggregate = "absent-aggregate";

struct ExplanationFactor {
    std::string nodeId;  // or kLeakAggregate / kAbsentAggregate
    Outcome outcome = Outcome::SeenLinked;
    double factor = 1.0;
    double logFactor = 0.0;
    // Term probability after usage mixing; unset for aggregates.
    std::optional<double> effectiveProb;
    // Number of nodes folded into an aggregate.
    std::size_t count = 1;
};

struct PostingScore {
    std::size_t goal = 0;
    std::string goalId;
    double logScore = 0.0;
    double posterior = 0.0;
    std::size_t rank = 0;  // 1-based
    std::vector<ExplanationFactor> factors;  // filled when explanations are requested
};

struct RankOptions {
    std::size_t topK = 5;
    bool enableDefiniteness = true;
    bool enableNounVerb = true;
    bool explain = false;

    TextOptions text_options() const { return {enableDefiniteness, enableNounVerb}; }
};

/// Term probability for a link given how the term was used in the query.
double effective_term_prob(const LinkProbs& probs, const UsageResolution& usage);

/// Scores every goal. Result is in goal order with posteriors normalized and
/// ranks assigned (descending log score, goal id ascending on ties).
std::vector<PostingScore> score_goals(const KnowledgeBase& kb, const QueryAnalysis& analysis,
                                      bool withExplanations = false);

struct RankResult {
    QueryAnalysis analysis;
    std::vector<PostingScore> postings;  // top-K, best first
};

RankResult rank(const KnowledgeBase& kb, std::string_view queryText, const RankOptions& options);

/// Full ranking without truncation, best first.
std::vector<PostingScore> rank_all(const KnowledgeBase& kb, const QueryAnalysis& analysis,
                                   bool withExplanations = false);

/// Factor decomposition for one goal. Throws NotFoundError for unknown ids.
std::vector<ExplanationFactor> explain(const KnowledgeBase& kb, std::string_view queryText,
                                       std::string_view goalId, const RankOptions& options);

}  // namespace goalspot
