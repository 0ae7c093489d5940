#include "goalspot/text_pipeline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <memory>

#include "goalspot/errors.hpp"
#include "goalspot/stemmer.hpp"

namespace goalspot {
namespace {

bool word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }
bool alpha_byte(unsigned char c) { return std::isalpha(c) != 0 || c >= 0x80; }
bool sentence_end(char c) { return c == '.' || c == '?' || c == '!'; }

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

constexpr std::array<std::string_view, 17> kDeterminers = {
    "a", "an", "the", "this", "that", "these", "those", "my", "your", "our", "its", "his", "her", "their", "some", "any", "each"};
constexpr std::array<std::string_view, 13> kVerbCues = {
    "to", "can", "could", "do", "does", "did", "will", "would", "should", "shall", "may", "might", "must"};
constexpr std::array<std::string_view, 6> kSubjectPronouns = {"i", "you", "we", "they", "he", "she"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view w) {
    return std::find(set.begin(), set.end(), w) != set.end();
}

bool is_determiner(std::string_view lower, const KnowledgeBase& kb) {
    if (const FunctionWord* fw = kb.find_function_word(lower)) {
        switch (fw->cls) {
            case FunctionWordClass::ArticleIndef:
            case FunctionWordClass::ArticleDef:
            case FunctionWordClass::Possessive:
            case FunctionWordClass::Demonstrative: return true;
            default: break;
        }
    }
    return contains(kDeterminers, lower);
}

// Tokens i-1 and i sit in the same clause (no punctuation, no sentence break).
bool joined(std::span<const Token> tokens, std::size_t i) {
    return i > 0 && i < tokens.size() && !tokens[i].boundaryBefore && !tokens[i].sentenceInitial;
}

bool surface_matches_at(const std::vector<std::string>& surface, bool exact, std::span<const Token> tokens,
                        std::size_t start) {
    if (start + surface.size() > tokens.size()) return false;
    for (std::size_t t = 0; t < surface.size(); ++t) {
        const Token& tok = tokens[start + t];
        if (t > 0 && !joined(tokens, start + t)) return false;
        const std::string& key = exact ? tok.raw : tok.lemma;
        if (key != surface[t]) return false;
    }
    return true;
}

struct Candidate {
    SurfaceEntry entry;
    std::size_t length = 0;
};

std::optional<Candidate> longest_at(const std::vector<SurfaceEntry>* entries, const KnowledgeBase& kb,
                                    std::span<const Token> tokens, std::size_t start) {
    if (!entries) return std::nullopt;
    for (const auto& e : *entries) {
        const auto& surface = kb.nodes()[e.node].surfaces[e.surface].tokens;
        if (surface_matches_at(surface, e.exact, tokens, start)) return Candidate{e, surface.size()};
    }
    return std::nullopt;
}

std::string surface_text(const SurfaceForm& s) {
    std::string out;
    for (const auto& t : s.tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    bool boundary = false;
    bool sentenceBreak = true;
    std::size_t i = 0;
    while (i < text.size()) {
        auto c = static_cast<unsigned char>(text[i]);
        if (!word_byte(c)) {
            if (!std::isspace(c)) boundary = true;
            if (sentence_end(static_cast<char>(c))) sentenceBreak = true;
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size()) {
            auto d = static_cast<unsigned char>(text[i]);
            if (word_byte(d)) {
                ++i;
            } else if ((d == '\'') && i + 1 < text.size() && alpha_byte(static_cast<unsigned char>(text[i + 1])) &&
                       alpha_byte(static_cast<unsigned char>(text[i - 1]))) {
                ++i;
            } else {
                break;
            }
        }
        Token tok;
        tok.raw = std::string(text.substr(start, i - start));
        tok.lower = lower_ascii(tok.raw);
        tok.lemma = stem(tok.lower);
        tok.index = tokens.size();
        tok.sentenceInitial = sentenceBreak;
        tok.boundaryBefore = boundary && !tokens.empty();
        tokens.push_back(std::move(tok));
        boundary = false;
        sentenceBreak = false;
    }
    return tokens;
}

void mark_function_words(std::vector<Token>& tokens, const KnowledgeBase& kb) {
    for (auto& t : tokens) t.isFunctionWord = kb.find_function_word(t.lower) != nullptr;
}

const Activation* QueryAnalysis::find(std::size_t node) const {
    for (const auto& a : activations)
        if (a.node == node) return &a;
    return nullptr;
}

std::optional<SurfaceMatch> resolve_case(const Token& token, const KnowledgeBase& kb) {
    auto single = [&](const std::vector<SurfaceEntry>* entries) -> std::optional<SurfaceEntry> {
        if (!entries) return std::nullopt;
        for (const auto& e : *entries)
            if (kb.nodes()[e.node].surfaces[e.surface].tokens.size() == 1) return e;
        return std::nullopt;
    };
    auto exact = single(kb.surfaces_starting_with(token.raw, true));
    auto folded = single(kb.surfaces_starting_with(token.lemma, false));
    std::optional<SurfaceEntry> pick;
    if (exact && !(token.sentenceInitial && folded)) pick = exact;
    else pick = folded;
    if (!pick) return std::nullopt;
    return SurfaceMatch{pick->node, pick->surface, pick->exact};
}

double indefiniteness(std::span<const std::string> functionWords, const IndefinitenessModel& model) {
    const double prior = model.priorIndef;
    if (functionWords.empty()) return prior;
    double logOdds = std::log(prior) - std::log1p(-prior);
    for (const auto& w : functionWords) {
        auto it = model.functionWords.find(w);
        if (it == model.functionWords.end()) throw ContractViolation("'" + w + "' is not a known function word");
        logOdds += std::log(it->second.pGivenIndef) - std::log(it->second.pGivenDef);
    }
    double p = 1.0 / (1.0 + std::exp(-logOdds));
    return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double indefiniteness(const ClauseContext& context, const IndefinitenessModel& model) {
    return indefiniteness(std::span<const std::string>(context.functionWords), model);
}

NounVerbDecision classify_noun_verb(TokenSpan span, std::span<const Token> tokens, std::span<const bool> consumed,
                                    const KnowledgeBase& kb) {
    if (joined(tokens, span.begin)) {
        const std::string& prev = tokens[span.begin - 1].lower;
        if (is_determiner(prev, kb)) return {NounVerbKind::Noun, 1.0};
        if (contains(kVerbCues, prev) || contains(kSubjectPronouns, prev)) return {NounVerbKind::Verb, 0.0};
    }
    std::size_t next = span.end;
    if (joined(tokens, next) && is_determiner(tokens[next].lower, kb) && joined(tokens, next + 1) &&
        next + 1 < consumed.size() && consumed[next + 1]) {
        return {NounVerbKind::Verb, 0.0};
    }
    return {NounVerbKind::Mixture, kb.noun_verb_prior()};
}

QueryAnalysis spot_evidence(std::vector<Token> tokens, const KnowledgeBase& kb, const TextOptions& options) {
    QueryAnalysis out;
    out.options = options;
    const std::size_t n = tokens.size();
    // make_unique value-initializes, so every flag starts false.
    auto consumed = std::make_unique<bool[]>(n);

    struct Occurrence {
        SurfaceEntry entry;
        TokenSpan span;
    };
    std::vector<Occurrence> firsts;
    std::vector<bool> seenNode(kb.nodes().size(), false);

    std::size_t i = 0;
    while (i < n) {
        auto exact = longest_at(kb.surfaces_starting_with(tokens[i].raw, true), kb, tokens, i);
        auto folded = longest_at(kb.surfaces_starting_with(tokens[i].lemma, false), kb, tokens, i);
        std::optional<Candidate> best;
        if (exact && folded) {
            if (exact->length != folded->length) best = exact->length > folded->length ? exact : folded;
            else best = tokens[i].sentenceInitial ? folded : exact;
        } else {
            best = exact ? exact : folded;
        }
        if (!best) {
            ++i;
            continue;
        }
        TokenSpan span{i, i + best->length};
        for (std::size_t t = span.begin; t < span.end; ++t) consumed[t] = true;
        if (!seenNode[best->entry.node]) {
            seenNode[best->entry.node] = true;
            firsts.push_back(Occurrence{best->entry, span});
        }
        i = span.end;
    }

    std::span<const bool> consumedSpan(consumed.get(), n);

    const auto& model = kb.indefiniteness();
    for (const auto& occ : firsts) {
        const auto& node = kb.nodes()[occ.entry.node];
        Activation a;
        a.node = occ.entry.node;
        a.nodeId = node.id;
        a.matchedSurface = surface_text(node.surfaces[occ.entry.surface]);
        a.span = occ.span;

        std::size_t j = occ.span.begin;
        while (joined(tokens, j) && !consumed[j - 1] && tokens[j - 1].isFunctionWord) --j;
        a.context.windowStart = j;
        a.context.windowEnd = occ.span.begin;
        for (std::size_t t = j; t < occ.span.begin; ++t) a.context.functionWords.push_back(tokens[t].lower);

        a.usage.pIndefinite = options.definiteness ? indefiniteness(a.context, model) : model.priorIndef;
        if (node.zeroDerivation) {
            a.usage.pNoun = options.nounVerb ? classify_noun_verb(a.span, tokens, consumedSpan, kb).pNoun
                                             : kb.noun_verb_prior();
        } else {
            a.usage.pNoun = 1.0;
        }
        out.activations.push_back(std::move(a));
    }
    out.tokens = std::move(tokens);
    return out;
}

QueryAnalysis analyze(std::string_view text, const KnowledgeBase& kb, const TextOptions& options) {
    auto tokens = tokenize(text);
    mark_function_words(tokens, kb);
    return spot_evidence(std::move(tokens), kb, options);
}

}  // namespace goalspot
