#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "goalspot/kb.hpp"

namespace goalspot {

struct Token {
    std::string raw;
    std::string lower;
    std::string lemma;
    std::size_t index = 0;
    bool isFunctionWord = false;
    bool sentenceInitial = false;
    // Punctuation separates this token from the previous one.
    bool boundaryBefore = false;

    bool operator==(const Token&) const = default;
};

/// Splits on whitespace and punctuation. Letters, digits, bytes >= 0x80 and
/// apostrophes between letters form words. Function-word flags are left
/// unset; see mark_function_words().
std::vector<Token> tokenize(std::string_view text);

void mark_function_words(std::vector<Token>& tokens, const KnowledgeBase& kb);

struct TokenSpan {
    std::size_t begin = 0;  // first token index
    std::size_t end = 0;    // one past the last

    bool operator==(const TokenSpan&) const = default;
};

struct ClauseContext {
    std::vector<std::string> functionWords;  // in query order
    std::size_t windowStart = 0;
    std::size_t windowEnd = 0;  // == activation start

    bool operator==(const ClauseContext&) const = default;
};

struct UsageResolution {
    double pIndefinite = 0.5;
    double pNoun = 1.0;

    bool operator==(const UsageResolution&) const = default;
};

struct Activation {
    std::size_t node = 0;
    std::string nodeId;
    std::string matchedSurface;
    TokenSpan span;
    ClauseContext context;
    UsageResolution usage;

    bool operator==(const Activation&) const = default;
};

struct TextOptions {
    bool definiteness = true;
    bool nounVerb = true;
};

struct QueryAnalysis {
    std::vector<Token> tokens;
    std::vector<Activation> activations;  // one per node, first-occurrence order
    TextOptions options;

    const Activation* find(std::size_t node) const;
};

struct SurfaceMatch {
    std::size_t node = 0;
    std::size_t surface = 0;
    bool exact = false;
};

/// Single-token lexicon lookup with the capitalization rules: an exact-case
/// surface wins mid-sentence, the case-folded reading wins at sentence start
/// when both exist.
std::optional<SurfaceMatch> resolve_case(const Token& token, const KnowledgeBase& kb);

/// p(I | F1..Fn) under the naive function-word model. Every word must be in
/// the model's lexicon (ContractViolation otherwise). Empty context yields
/// the prior.
double indefiniteness(std::span<const std::string> functionWords, const IndefinitenessModel& model);
double indefiniteness(const ClauseContext& context, const IndefinitenessModel& model);

enum class NounVerbKind { Noun, Verb, Mixture };

struct NounVerbDecision {
    NounVerbKind kind = NounVerbKind::Mixture;
    double pNoun = 0.5;
};

/// Template-based noun/verb usage for a zero-derivation activation. Falls
/// back to a mixture with the KB's noun prior when no template fires.
/// `consumed` marks tokens that belong to some activation.
NounVerbDecision classify_noun_verb(TokenSpan span, std::span<const Token> tokens,
                                    std::span<const bool> consumed, const KnowledgeBase& kb);

/// Longest-match-first spotting of lexicon surfaces, clause contexts and
/// usage resolution.
QueryAnalysis spot_evidence(std::vector<Token> tokens, const KnowledgeBase& kb, const TextOptions& options);

/// tokenize + mark_function_words + spot_evidence.
QueryAnalysis analyze(std::string_view text, const KnowledgeBase& kb, const TextOptions& options);

}  // namespace goalspot
