#include "goalspot/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <type_traits>
#include <unordered_set>

#include "goalspot/errors.hpp"
#include "goalspot/stemmer.hpp"
#include "json.hpp"

namespace goalspot {

// ---------------------------------------------------------------------------
// Rng

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw DomainError("Rng::below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::weighted(const double* weights, std::size_t n) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += weights[i];
    if (!(total > 0.0)) throw DomainError("weights must have a positive sum");
    double x = uniform() * total;
    for (std::size_t i = 0; i < n; ++i) {
        if (x < weights[i]) return i;
        x -= weights[i];
    }
    // Rounding can leave x just past the last bin.
    for (std::size_t i = n; i-- > 0;)
        if (weights[i] > 0.0) return i;
    return n - 1;
}

// ---------------------------------------------------------------------------
// Oracle

ObservedEvidence observed_from(const QueryAnalysis& analysis) {
    ObservedEvidence out;
    for (const auto& a : analysis.activations) out.emplace_back(a.node, a.usage);
    return out;
}

namespace {

using Real = long double;

// One value of a node's hidden usage variables and its probability.
struct HiddenState {
    Real weight;
    bool indefinite;
    bool noun;
};

// Conditional probability table lookup p(t+ | usage state, goal).
Real table_prob(const LinkProbs& probs, bool indefinite, bool noun) {
    return std::visit(
        [&](const auto& v) -> Real {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PlainProb>) {
                return v.p.value;
            } else if constexpr (std::is_same_v<T, DefinitenessSplit>) {
                return indefinite ? v.pIndef.value : v.pDef.value;
            } else if constexpr (std::is_same_v<T, NounVerbSplit>) {
                return noun ? v.pNoun.value : v.pVerb.value;
            } else {
                if (!noun) return v.pVerb.value;
                return indefinite ? v.pNounIndef.value : v.pNounDef.value;
            }
        },
        probs);
}

bool uses_indefinite(const LinkProbs& p) {
    return std::holds_alternative<DefinitenessSplit>(p) || std::holds_alternative<FullSplit>(p);
}
bool uses_noun(const LinkProbs& p) {
    return std::holds_alternative<NounVerbSplit>(p) || std::holds_alternative<FullSplit>(p);
}

std::vector<HiddenState> hidden_states(const LinkProbs& probs, double pIndef, double pNoun) {
    std::vector<HiddenState> out;
    bool splitI = uses_indefinite(probs);
    bool splitN = uses_noun(probs);
    for (int i = 0; i < (splitI ? 2 : 1); ++i) {
        for (int n = 0; n < (splitN ? 2 : 1); ++n) {
            Real w = 1.0L;
            if (splitI) w *= i == 0 ? Real(pIndef) : Real(1.0L - Real(pIndef));
            if (splitN) w *= n == 0 ? Real(pNoun) : Real(1.0L - Real(pNoun));
            out.push_back(HiddenState{w, i == 0, n == 0});
        }
    }
    return out;
}

struct OracleNode {
    const LinkProbs* link = nullptr;  // null when the goal has no link to this node
    std::vector<HiddenState> states;
    bool present = false;
};

// Sum over every joint assignment of hidden usage states from node `k` on.
Real joint_sum(const std::vector<OracleNode>& nodes, std::size_t k, Real leak, Real acc) {
    if (k == nodes.size()) return acc;
    const auto& n = nodes[k];
    if (!n.link) {
        Real f = n.present ? leak : 1.0L - leak;
        return joint_sum(nodes, k + 1, leak, acc * f);
    }
    Real total = 0.0L;
    for (const auto& s : n.states) {
        Real p = table_prob(*n.link, s.indefinite, s.noun);
        Real f = n.present ? p : 1.0L - p;
        total += joint_sum(nodes, k + 1, leak, acc * s.weight * f);
    }
    return total;
}

}  // namespace

std::vector<double> oracle_posterior(const KnowledgeBase& kb, const ObservedEvidence& observed) {
    const std::size_t n = kb.nodes().size();
    if (n > kOracleMaxNodes)
        throw DomainError("oracle refuses knowledge bases with more than " + std::to_string(kOracleMaxNodes) + " nodes");

    std::vector<const UsageResolution*> usage(n, nullptr);
    for (const auto& [node, u] : observed) {
        if (node >= n) throw ContractViolation("observed node outside knowledge base");
        usage[node] = &u;
    }
    std::uint32_t observedMask = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (usage[k]) observedMask |= 1u << k;

    const double priorIndef = kb.indefiniteness().priorIndef;
    const double priorNoun = kb.noun_verb_prior();
    const Real leak = kb.leak();

    std::vector<Real> joint(kb.goals().size(), 0.0L);
    for (std::size_t g = 0; g < kb.goals().size(); ++g) {
        std::vector<const LinkProbs*> linkOf(n, nullptr);
        for (const auto& c : kb.goal_links(g)) linkOf[c.node] = &kb.links()[c.link].probs;

        // Every presence pattern over all nodes; only the one matching the
        // observation contributes evidence mass.
        const std::uint64_t patterns = std::uint64_t{1} << n;
        for (std::uint64_t pattern = 0; pattern < patterns; ++pattern) {
            if (pattern != observedMask) continue;
            std::vector<OracleNode> nodes(n);
            for (std::size_t k = 0; k < n; ++k) {
                auto& on = nodes[k];
                on.present = (pattern >> k) & 1u;
                on.link = linkOf[k];
                if (!on.link) continue;
                const UsageResolution* u = on.present ? usage[k] : nullptr;
                double pI = u ? u->pIndefinite : priorIndef;
                double pN = u ? u->pNoun : priorNoun;
                on.states = hidden_states(*on.link, pI, pN);
            }
            joint[g] += joint_sum(nodes, 0, leak, Real(kb.goals()[g].prior));
        }
    }
    Real total = std::accumulate(joint.begin(), joint.end(), Real(0.0L));
    std::vector<double> out(joint.size());
    for (std::size_t g = 0; g < joint.size(); ++g) out[g] = static_cast<double>(joint[g] / total);
    return out;
}

bool ranking_consistent(const std::vector<std::size_t>& order, const std::vector<double>& reference, double tol) {
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j)
            if (reference[order[j]] - reference[order[i]] > tol) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Synthetic knowledge bases

namespace {

// Pronounceable pseudo-words; index -> word is injective.
class WordSource {
public:
    WordSource(std::uint64_t start, const IndefinitenessModel& fw) : next_(start), fw_(fw) {}

    std::string take() {
        while (true) {
            std::string w = spell(next_++);
            if (stem(w) != w || fw_.functionWords.count(w)) continue;
            return w;
        }
    }

private:
    static std::string spell(std::uint64_t i) {
        static constexpr char kCons[] = "bdfgklmnprstvz";
        static constexpr char kVowels[] = "aou";
        std::string w;
        // Three syllables minimum keeps words clear of real English.
        for (int s = 0; s < 3 || i > 0; ++s) {
            w += kCons[i % 14];
            i /= 14;
            w += kVowels[i % 3];
            i /= 3;
        }
        return w;
    }

    std::uint64_t next_;
    const IndefinitenessModel& fw_;
};

std::string padded(char prefix, std::size_t i, std::size_t width) {
    std::string digits = std::to_string(i);
    if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
    return std::string(1, prefix) + digits;
}

}  // namespace

KnowledgeBase synth_kb(const SynthParams& params) {
    if (params.numGoals == 0 || params.numTerms == 0) throw DomainError("synth_kb needs at least one goal and one term");
    if (params.numLinks > params.numGoals * params.numTerms)
        throw DomainError("numLinks exceeds numGoals * numTerms");
    for (double f : {params.fracMetonym, params.fracPhrase, params.fracZeroDerivation, params.fracSplit})
        if (!(f >= 0.0 && f <= 1.0)) throw DomainError("fractions must lie in [0,1]");
    if (params.fracMetonym + params.fracPhrase > 1.0) throw DomainError("fracMetonym + fracPhrase exceeds 1");

    Rng rng(params.seed);
    KbData kb;
    kb.meta = KbMeta{"synth-" + std::to_string(params.seed), "1", "x-synth"};
    kb.scale = BucketScale::defaults();
    if (params.randomizeLeak) {
        kb.leak = kb.scale.pMin * (0.01 + 0.9 * rng.uniform());
        kb.indefiniteness.priorIndef = 0.2 + 0.6 * rng.uniform();
        kb.nounVerbPrior = 0.2 + 0.6 * rng.uniform();
    }

    const std::size_t gw = std::to_string(params.numGoals).size();
    std::vector<double> raw(params.numGoals, 1.0);
    if (params.randomizePriors)
        for (auto& r : raw) r = 0.1 + rng.uniform();
    double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
    for (std::size_t g = 0; g < params.numGoals; ++g) {
        kb.goals.push_back(Goal{padded('g', g, gw), "Synthetic goal " + std::to_string(g), raw[g] / sum});
    }

    WordSource words(rng.below(1000), kb.indefiniteness);
    const std::size_t nw = std::to_string(params.numTerms).size();
    for (std::size_t i = 0; i < params.numTerms; ++i) {
        EvidenceNode node;
        node.id = padded('n', i, nw);
        double u = rng.uniform();
        if (u < params.fracMetonym) {
            node.kind = NodeKind::Metonym;
            std::size_t count = 2 + rng.below(2);
            for (std::size_t s = 0; s < count; ++s) node.surfaces.push_back(SurfaceForm{{words.take()}, false});
        } else if (u < params.fracMetonym + params.fracPhrase) {
            node.kind = NodeKind::Phrase;
            node.surfaces.push_back(SurfaceForm{{words.take(), words.take()}, false});
        } else {
            node.kind = NodeKind::Term;
            node.surfaces.push_back(SurfaceForm{{words.take()}, false});
            node.zeroDerivation = rng.bernoulli(params.fracZeroDerivation);
        }
        kb.nodes.push_back(std::move(node));
    }

    // Distinct (goal, node) pairs.
    const std::uint64_t total = std::uint64_t(params.numGoals) * params.numTerms;
    std::vector<std::uint64_t> pairs;
    pairs.reserve(params.numLinks);
    if (params.numLinks * 2 > total) {
        std::vector<std::uint64_t> all(total);
        std::iota(all.begin(), all.end(), std::uint64_t{0});
        for (std::size_t i = 0; i < params.numLinks; ++i) {
            std::swap(all[i], all[i + rng.below(total - i)]);
            pairs.push_back(all[i]);
        }
    } else {
        std::unordered_set<std::uint64_t> taken;
        taken.reserve(params.numLinks * 2);
        while (pairs.size() < params.numLinks) {
            std::uint64_t p = rng.below(total);
            if (taken.insert(p).second) pairs.push_back(p);
        }
    }
    std::sort(pairs.begin(), pairs.end());

    auto draw = [&]() {
        int b = static_cast<int>(rng.weighted(params.bucketWeights.data(), params.bucketWeights.size())) + 1;
        return Assessed{bucket_to_probability(b, kb.scale), b};
    };
    for (std::uint64_t p : pairs) {
        std::size_t g = p / params.numTerms;
        std::size_t n = p % params.numTerms;
        Link link;
        link.goalId = kb.goals[g].id;
        link.nodeId = kb.nodes[n].id;
        if (rng.bernoulli(params.fracSplit)) {
            if (kb.nodes[n].zeroDerivation) {
                if (rng.bernoulli(0.5)) link.probs = NounVerbSplit{draw(), draw()};
                else link.probs = FullSplit{draw(), draw(), draw()};
            } else {
                link.probs = DefinitenessSplit{draw(), draw()};
            }
        } else {
            link.probs = PlainProb{draw()};
        }
        kb.links.push_back(std::move(link));
    }
    return KnowledgeBase::build(std::move(kb));
}

SampledQuery sample_query(const KnowledgeBase& kb, std::size_t goal, std::uint64_t seed, const SampleOptions& options) {
    if (goal >= kb.goals().size()) throw NotFoundError("goal index out of range");
    Rng rng(seed ^ (0x9E3779B97F4A7C15ULL * (goal + 1)));
    const double leak = options.leakOverride.value_or(kb.leak());

    std::vector<double> presence(kb.nodes().size(), leak);
    for (const auto& c : kb.goal_links(goal)) presence[c.node] = c.absentProb;

    SampledQuery out;
    std::vector<std::string> rendered;
    std::vector<std::string> exactLast;
    for (std::size_t k = 0; k < kb.nodes().size(); ++k) {
        double u = rng.uniform();
        if (!(u < presence[k])) continue;
        const auto& node = kb.nodes()[k];
        const auto& surface = node.surfaces[rng.below(node.surfaces.size())];
        std::string text;
        for (const auto& t : surface.tokens) text += (text.empty() ? "" : " ") + t;
        out.nodes.push_back(k);
        // A leading exact-case surface could be read case-folded at sentence
        // start, so those go after the folded ones.
        (node.surface_is_exact(surface) ? exactLast : rendered).push_back(std::move(text));
    }
    rendered.insert(rendered.end(), exactLast.begin(), exactLast.end());
    for (const auto& r : rendered) out.text += (out.text.empty() ? "" : ", ") + r;
    return out;
}

// ---------------------------------------------------------------------------
// Smoke suites

SuiteParseError::SuiteParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

SmokeSuite parse_smoke_suite(std::string_view text, std::string name) {
    SmokeSuite suite;
    suite.name = std::move(name);
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineNo;
        std::string trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;

        std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos) throw SuiteParseError(lineNo, "expected query<TAB>goalId[,goalId...]");
        SmokeCase c;
        c.line = lineNo;
        c.query = trim(line.substr(0, tab));
        if (c.query.empty()) throw SuiteParseError(lineNo, "empty query");
        std::string ids = trim(line.substr(tab + 1));
        if (ids.find('\t') != std::string::npos) throw SuiteParseError(lineNo, "more than one TAB");
        std::size_t p = 0;
        while (p <= ids.size()) {
            std::size_t comma = ids.find(',', p);
            std::string id = trim(std::string_view(ids).substr(p, comma == std::string::npos ? std::string::npos : comma - p));
            if (id.empty()) throw SuiteParseError(lineNo, "empty goal id");
            c.expectedGoalIds.push_back(std::move(id));
            if (comma == std::string::npos) break;
            p = comma + 1;
        }
        suite.cases.push_back(std::move(c));
    }
    return suite;
}

SmokeSuite load_smoke_suite(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SuiteParseError(0, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_smoke_suite(ss.str(), path);
}

SmokeReport run_smoke(const KnowledgeBase& kb, const SmokeSuite& suite, std::size_t k, double threshold,
                      const RankOptions& base) {
    if (suite.cases.empty()) throw DomainError("smoke suite has no cases");
    if (k < 1) throw DomainError("k must be at least 1");
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("threshold must lie in [0,1]");
    for (const auto& c : suite.cases)
        for (const auto& id : c.expectedGoalIds)
            if (!kb.find_goal(id))
                throw DomainError("line " + std::to_string(c.line) + ": unknown goal id '" + id + "'");

    SmokeReport report;
    report.suiteName = suite.name;
    report.k = k;
    report.threshold = threshold;
    report.cases = suite.cases.size();
    for (const auto& c : suite.cases) {
        auto analysis = analyze(c.query, kb, base.text_options());
        auto ranked = rank_all(kb, analysis);
        SmokeCaseResult r;
        r.topGoalId = ranked.front().goalId;
        for (const auto& p : ranked) {
            if (std::find(c.expectedGoalIds.begin(), c.expectedGoalIds.end(), p.goalId) != c.expectedGoalIds.end()) {
                r.rankOfBestExpected = p.rank;
                break;
            }
        }
        r.hitAtK = r.rankOfBestExpected && *r.rankOfBestExpected <= k;
        if (r.hitAtK) ++report.hits;
        report.perCase.push_back(std::move(r));
    }
    report.topKRate = static_cast<double>(report.hits) / static_cast<double>(report.cases);
    report.passed = report.topKRate >= threshold;
    return report;
}

std::string smoke_report_json(const SmokeReport& report, const SmokeSuite& suite) {
    nlohmann::ordered_json j;
    j["suite"] = report.suiteName;
    j["k"] = report.k;
    j["threshold"] = report.threshold;
    j["cases"] = report.cases;
    j["hits"] = report.hits;
    j["topKRate"] = report.topKRate;
    j["passed"] = report.passed;
    auto perCase = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.perCase.size(); ++i) {
        const auto& r = report.perCase[i];
        const auto& c = suite.cases[i];
        nlohmann::ordered_json e;
        e["line"] = c.line;
        e["query"] = c.query;
        e["expected"] = c.expectedGoalIds;
        e["hit"] = r.hitAtK;
        if (r.rankOfBestExpected) e["rankOfBestExpected"] = *r.rankOfBestExpected;
        else e["rankOfBestExpected"] = nullptr;
        e["topGoal"] = r.topGoalId;
        perCase.push_back(std::move(e));
    }
    j["perCase"] = std::move(perCase);
    return j.dump(2);
}

std::string smoke_report_table(const SmokeReport& report, const SmokeSuite& suite) {
    std::ostringstream os;
    os << "line  hit  rank  top-goal                    query\n";
    for (std::size_t i = 0; i < report.perCase.size(); ++i) {
        const auto& r = report.perCase[i];
        const auto& c = suite.cases[i];
        std::string rank = r.rankOfBestExpected ? std::to_string(*r.rankOfBestExpected) : "-";
        std::string top = r.topGoalId;
        if (top.size() < 26) top.resize(26, ' ');
        os.width(4);
        os << c.line << "  " << (r.hitAtK ? "yes" : "NO ") << "  ";
        os.width(4);
        os << rank << "  " << top << "  " << c.query << '\n';
    }
    os << "top-" << report.k << " rate: " << report.hits << "/" << report.cases << " = " << report.topKRate
       << " (threshold " << report.threshold << ") " << (report.passed ? "PASS" : "FAIL") << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Generative recovery

RecoveryReport generative_recovery(const KnowledgeBase& kb, std::size_t trials, std::uint64_t seed) {
    if (kb.nodes().size() > kOracleMaxNodes)
        throw DomainError("oracle refuses knowledge bases with more than " + std::to_string(kOracleMaxNodes) + " nodes");
    Rng rng(seed);
    std::vector<double> priors;
    for (const auto& g : kb.goals()) priors.push_back(g.prior);

    const TextOptions plain{false, false};
    RecoveryReport report;
    report.trials = trials;
    std::size_t engineTop1 = 0, oracleTop1 = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        std::size_t goal = rng.weighted(priors.data(), priors.size());
        auto sample = sample_query(kb, goal, rng.next());

        auto analysis = analyze(sample.text, kb, plain);
        std::vector<std::size_t> spotted;
        for (const auto& a : analysis.activations) spotted.push_back(a.node);
        std::sort(spotted.begin(), spotted.end());
        if (spotted != sample.nodes) ++report.spotMismatches;

        auto scores = score_goals(kb, analysis);
        ObservedEvidence truth;
        for (std::size_t n : sample.nodes)
            truth.emplace_back(n, UsageResolution{kb.indefiniteness().priorIndef,
                                                  kb.nodes()[n].zeroDerivation ? kb.noun_verb_prior() : 1.0});
        auto oracle = oracle_posterior(kb, truth);

        std::vector<std::size_t> engineOrder(scores.size());
        for (const auto& s : scores) engineOrder[s.rank - 1] = s.goal;
        for (const auto& s : scores)
            report.maxPosteriorGap = std::max(report.maxPosteriorGap, std::abs(s.posterior - oracle[s.goal]));
        if (ranking_consistent(engineOrder, oracle)) ++report.rankingAgreements;

        if (engineOrder.front() == goal) ++engineTop1;
        std::vector<std::size_t> oracleOrder(oracle.size());
        std::iota(oracleOrder.begin(), oracleOrder.end(), std::size_t{0});
        std::stable_sort(oracleOrder.begin(), oracleOrder.end(), [&](std::size_t a, std::size_t b) {
            if (std::abs(oracle[a] - oracle[b]) > 1e-12) return oracle[a] > oracle[b];
            return kb.goals()[a].id < kb.goals()[b].id;
        });
        if (oracleOrder.front() == goal) ++oracleTop1;
    }
    if (trials > 0) {
        report.engineTop1Rate = static_cast<double>(engineTop1) / static_cast<double>(trials);
        report.oracleTop1Rate = static_cast<double>(oracleTop1) / static_cast<double>(trials);
    }
    return report;
}

}  // namespace goalspot
