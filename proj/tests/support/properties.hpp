#pragma once

// Property checks shared by the unit tests and the acceptance binary.

#include <cstdint>
#include <string>
#include <vector>

#include "goalspot/harness.hpp"
#include "goalspot/kb.hpp"

namespace support {

using namespace goalspot;

struct Check {
    bool ok = true;
    std::size_t cases = 0;
    double worst = 0.0;  // largest deviation seen, where meaningful
    std::string detail;  // first failure

    void fail(std::string why) {
        if (ok) detail = std::move(why);
        ok = false;
    }
};

// Random KB with at most 4 goals and 6 nodes, mixing split links.
KnowledgeBase random_small_kb(std::uint64_t seed);

// Random query over the KB's surfaces, function words, verb cues,
// unknown words and punctuation.
std::string random_query(const KnowledgeBase& kb, Rng& rng, std::size_t maxItems = 8);

// Direct evaluation of the unnormalized score product in extended
// precision, without the engine's log-space path.
std::vector<long double> linear_scores(const KnowledgeBase& kb, const QueryAnalysis& analysis);

Check oracle_equivalence(std::size_t kbs, std::size_t queriesPerKb, double tol, std::uint64_t seed);
Check normalization(std::size_t pairs, double tol, std::uint64_t seed);
Check linear_agreement(std::size_t pairs, double relTol, std::uint64_t seed);
Check duplicate_invariance(std::size_t kbs, std::uint64_t seed);
Check permutation_invariance(std::size_t pairs, double relTol, std::uint64_t seed);
Check unknown_word_append(std::size_t pairs, std::uint64_t seed);
Check leak_semantics(std::size_t pairs, std::uint64_t seed);
Check discrimination_monotonicity(std::uint64_t seed);
Check mixture_convexity(std::size_t draws, std::uint64_t seed);

// Presence frequency of every node in sample_query output, per goal, against
// its model probability within `sigmas` binomial standard deviations.
Check sample_marginals(const KnowledgeBase& kb, std::size_t samplesPerGoal, double sigmas, std::uint64_t seed);

}  // namespace support
