#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "goalspot/bucket_scale.hpp"

namespace goalspot {

struct Goal {
    std::string id;
    std::string title;
    double prior = 0.0;

    bool operator==(const Goal&) const = default;
};

enum class NodeKind { Term, Phrase, Metonym };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view s);

struct SurfaceForm {
    std::vector<std::string> tokens;
    bool exactCase = false;

    bool operator==(const SurfaceForm&) const = default;
};

struct EvidenceNode {
    std::string id;
    NodeKind kind = NodeKind::Term;
    std::vector<SurfaceForm> surfaces;
    bool caseSensitive = false;
    bool zeroDerivation = false;

    // A surface is matched on raw text when either flag is set.
    bool surface_is_exact(const SurfaceForm& s) const { return caseSensitive || s.exactCase; }

    bool operator==(const EvidenceNode&) const = default;
};

/// One assessed probability. When `bucket` is set the value was derived
/// from the 13-point scale at load time.
struct Assessed {
    double value = 0.0;
    std::optional<int> bucket;

    bool operator==(const Assessed&) const = default;
};

struct PlainProb {
    Assessed p;
    bool operator==(const PlainProb&) const = default;
};
struct DefinitenessSplit {
    Assessed pIndef;
    Assessed pDef;
    bool operator==(const DefinitenessSplit&) const = default;
};
struct NounVerbSplit {
    Assessed pNoun;
    Assessed pVerb;
    bool operator==(const NounVerbSplit&) const = default;
};
struct FullSplit {
    Assessed pNounIndef;
    Assessed pNounDef;
    Assessed pVerb;
    bool operator==(const FullSplit&) const = default;
};

using LinkProbs = std::variant<PlainProb, DefinitenessSplit, NounVerbSplit, FullSplit>;

struct Link {
    std::string goalId;
    std::string nodeId;
    LinkProbs probs;

    bool operator==(const Link&) const = default;
};

enum class FunctionWordClass { ArticleIndef, ArticleDef, Possessive, Preposition, Demonstrative, Other };

std::string_view to_string(FunctionWordClass c);
std::optional<FunctionWordClass> parse_function_word_class(std::string_view s);

struct FunctionWord {
    double pGivenIndef = 0.0;
    double pGivenDef = 0.0;
    FunctionWordClass cls = FunctionWordClass::Other;

    bool operator==(const FunctionWord&) const = default;
};

struct IndefinitenessModel {
    double priorIndef = 0.5;
    // Ordered so serialization is stable.
    std::map<std::string, FunctionWord> functionWords;

    static IndefinitenessModel defaults();

    bool operator==(const IndefinitenessModel&) const = default;
};

struct KbMeta {
    std::string name = "untitled";
    std::string version = "0";
    std::string language = "en";

    bool operator==(const KbMeta&) const = default;
};

inline constexpr double kDefaultLeak = 1e-4;
inline constexpr double kDefaultNounVerbPrior = 0.5;

/// Plain-data form of a knowledge base: exactly what the file holds, after
/// bucket expansion and prior normalization. Validation runs on this.
struct KbData {
    KbMeta meta;
    BucketScale scale = BucketScale::defaults();
    double leak = kDefaultLeak;
    IndefinitenessModel indefiniteness = IndefinitenessModel::defaults();
    double nounVerbPrior = kDefaultNounVerbPrior;
    std::vector<Goal> goals;
    std::vector<EvidenceNode> nodes;
    std::vector<Link> links;

    bool operator==(const KbData&) const = default;
};

// Link as used by scoring: resolved node index plus the prior-mixed
// probability used when the node is absent from a query.
struct CompiledLink {
    std::size_t node = 0;
    std::size_t link = 0;        // index into links()
    double absentProb = 0.0;     // prior-weighted effective probability
    double logAbsent = 0.0;      // ln(1 - absentProb)
};

// Surface entry keyed by its first token.
struct SurfaceEntry {
    std::size_t node = 0;
    std::size_t surface = 0;
    bool exact = false;
};

/// Validated, indexed, immutable knowledge base. Build one with load_kb()
/// or KnowledgeBase::build(); both validate first.
class KnowledgeBase {
public:
    static KnowledgeBase build(KbData data);

    const KbData& data() const { return data_; }
    const KbMeta& meta() const { return data_.meta; }
    const std::vector<Goal>& goals() const { return data_.goals; }
    const std::vector<EvidenceNode>& nodes() const { return data_.nodes; }
    const std::vector<Link>& links() const { return data_.links; }
    double leak() const { return data_.leak; }
    const BucketScale& scale() const { return data_.scale; }
    const IndefinitenessModel& indefiniteness() const { return data_.indefiniteness; }
    double noun_verb_prior() const { return data_.nounVerbPrior; }

    std::optional<std::size_t> find_goal(std::string_view id) const;
    std::optional<std::size_t> find_node(std::string_view id) const;
    const FunctionWord* find_function_word(std::string_view lower) const;

    // Links of a goal ordered by node id.
    const std::vector<CompiledLink>& goal_links(std::size_t goal) const { return goalLinks_[goal]; }
    // Goal indices linked to a node.
    const std::vector<std::size_t>& node_goals(std::size_t node) const { return nodeGoals_[node]; }

    // Surfaces whose first token is `key` (raw text for exact surfaces,
    // lemma otherwise), longest first.
    const std::vector<SurfaceEntry>* surfaces_starting_with(std::string_view key, bool exact) const;

    // Rank of node `i` in node-id order; scoring accumulates in this order.
    std::size_t node_order(std::size_t node) const { return nodeOrder_[node]; }

private:
    explicit KnowledgeBase(KbData data);

    KbData data_;
    std::unordered_map<std::string, std::size_t> goalIndex_;
    std::unordered_map<std::string, std::size_t> nodeIndex_;
    std::unordered_map<std::string, FunctionWord> functionWords_;
    std::vector<std::vector<CompiledLink>> goalLinks_;
    std::vector<std::vector<std::size_t>> nodeGoals_;
    std::unordered_map<std::string, std::vector<SurfaceEntry>> exactSurfaces_;
    std::unordered_map<std::string, std::vector<SurfaceEntry>> foldedSurfaces_;
    std::vector<std::size_t> nodeOrder_;
};

/// Probability that a link's term shows up when nothing is known about its
/// usage: the split is mixed with the KB's indefinite and noun priors.
double prior_mixed_probability(const LinkProbs& probs, double priorIndef, double nounVerbPrior);

}  // namespace goalspot
