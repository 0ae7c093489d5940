#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "goalspot/engine.hpp"
#include "goalspot/kb.hpp"
#include "goalspot/text_pipeline.hpp"

namespace goalspot {

// ---------------------------------------------------------------------------
// Random numbers. Distributions are written out here instead of using
// <random>'s, whose outputs differ between standard libraries; synthesized
// KBs must be byte-identical for a seed.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, n).
    std::uint64_t below(std::uint64_t n);
    // Uniform in [0, 1).
    double uniform();
    bool bernoulli(double p) { return uniform() < p; }
    // Index drawn proportionally to non-negative weights.
    std::size_t weighted(const double* weights, std::size_t n);

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Brute-force oracle.

inline constexpr std::size_t kOracleMaxNodes = 20;

/// Observed evidence: node index -> usage of its occurrence.
using ObservedEvidence = std::vector<std::pair<std::size_t, UsageResolution>>;

ObservedEvidence observed_from(const QueryAnalysis& analysis);

/// Posterior per goal (goal order) by enumerating every presence pattern of
/// every node and every hidden usage state of split links, in extended
/// precision. Throws DomainError for KBs with more than kOracleMaxNodes nodes.
std::vector<double> oracle_posterior(const KnowledgeBase& kb, const ObservedEvidence& observed);

/// True when `order` (goal indices, best first) never places a goal above
/// one whose reference posterior is larger by more than `tol`.
bool ranking_consistent(const std::vector<std::size_t>& order, const std::vector<double>& reference,
                        double tol = 1e-12);

// ---------------------------------------------------------------------------
// Synthetic knowledge bases.

struct SynthParams {
    std::size_t numGoals = 40;
    std::size_t numTerms = 600;
    std::size_t numLinks = 2000;
    std::uint64_t seed = 1;
    // Relative weight of buckets 1..13 for drawn link probabilities.
    std::array<double, 13> bucketWeights{1, 1, 1, 2, 3, 4, 5, 5, 4, 3, 2, 1, 1};
    double fracMetonym = 0.05;
    double fracPhrase = 0.05;
    double fracZeroDerivation = 0.05;
    // Share of links that carry a split (definiteness / noun-verb / full).
    double fracSplit = 0.1;
    bool randomizePriors = false;
    bool randomizeLeak = false;
};

/// Deterministic for a seed; the result always validates.
/// Throws DomainError when numLinks > numGoals * numTerms or counts are zero.
KnowledgeBase synth_kb(const SynthParams& params);

struct SampleOptions {
    // Replaces the KB leak while sampling (test hook; may be 0).
    std::optional<double> leakOverride;
};

struct SampledQuery {
    std::string text;
    std::vector<std::size_t> nodes;  // ground-truth activation set, ascending
};

/// Draws a query from the generative model of a goal: each node appears
/// independently with its prior-mixed link probability (ε when unlinked).
SampledQuery sample_query(const KnowledgeBase& kb, std::size_t goal, std::uint64_t seed,
                          const SampleOptions& options = {});

// ---------------------------------------------------------------------------
// Smoke suites.

struct SmokeCase {
    std::string query;
    std::vector<std::string> expectedGoalIds;
    std::size_t line = 0;
};

struct SmokeSuite {
    std::string name;
    std::vector<SmokeCase> cases;
};

class SuiteParseError : public std::runtime_error {
public:
    SuiteParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// `query<TAB>goal[,goal...]` per line; `#` starts a comment line.
SmokeSuite parse_smoke_suite(std::string_view text, std::string name = "suite");
SmokeSuite load_smoke_suite(const std::string& path);

struct SmokeCaseResult {
    bool hitAtK = false;
    std::optional<std::size_t> rankOfBestExpected;
    std::string topGoalId;
};

struct SmokeReport {
    std::string suiteName;
    std::vector<SmokeCaseResult> perCase;
    std::size_t hits = 0;
    std::size_t cases = 0;
    double topKRate = 0.0;
    std::size_t k = 5;
    double threshold = 0.99;
    bool passed = false;
};

/// Throws DomainError on an empty suite, k == 0, a threshold outside [0,1]
/// or expected ids missing from the KB.
SmokeReport run_smoke(const KnowledgeBase& kb, const SmokeSuite& suite, std::size_t k, double threshold,
                      const RankOptions& base = {});

std::string smoke_report_json(const SmokeReport& report, const SmokeSuite& suite);
std::string smoke_report_table(const SmokeReport& report, const SmokeSuite& suite);

// ---------------------------------------------------------------------------
// Generative recovery.

struct RecoveryReport {
    std::size_t trials = 0;
    double engineTop1Rate = 0.0;
    double oracleTop1Rate = 0.0;
    double maxPosteriorGap = 0.0;
    std::size_t rankingAgreements = 0;
    // Trials where spotting the rendered text did not give back the sampled set.
    std::size_t spotMismatches = 0;
};

RecoveryReport generative_recovery(const KnowledgeBase& kb, std::size_t trials, std::uint64_t seed);

}  // namespace goalspot
