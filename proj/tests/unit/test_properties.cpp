#include <gtest/gtest.h>

#include "goalspot/stemmer.hpp"
#include "properties.hpp"

using namespace support;

#define EXPECT_CHECK(expr)                                   \
    do {                                                     \
        auto c_ = (expr);                                    \
        EXPECT_TRUE(c_.ok) << c_.detail;                     \
        EXPECT_GT(c_.cases, 0u);                             \
    } while (0)

TEST(Properties, OracleEquivalence) { EXPECT_CHECK(oracle_equivalence(30, 10, 1e-9, 101)); }
TEST(Properties, Normalization) { EXPECT_CHECK(normalization(300, 1e-9, 102)); }
TEST(Properties, LinearAgreement) { EXPECT_CHECK(linear_agreement(300, 1e-9, 103)); }
TEST(Properties, DuplicateInvariance) { EXPECT_CHECK(duplicate_invariance(30, 104)); }
TEST(Properties, PermutationInvariance) { EXPECT_CHECK(permutation_invariance(300, 1e-12, 105)); }
TEST(Properties, UnknownWordAppend) { EXPECT_CHECK(unknown_word_append(300, 106)); }
TEST(Properties, LeakSemantics) { EXPECT_CHECK(leak_semantics(300, 107)); }
TEST(Properties, DiscriminationMonotonicity) { EXPECT_CHECK(discrimination_monotonicity(108)); }
TEST(Properties, MixtureConvexity) { EXPECT_CHECK(mixture_convexity(10000, 109)); }

TEST(Properties, SampleMarginals) {
    SynthParams p;
    p.numGoals = 2;
    p.numTerms = 4;
    p.numLinks = 5;
    p.seed = 110;
    auto kb = synth_kb(p);
    EXPECT_CHECK(sample_marginals(kb, 20000, 4.0, 110));
}

TEST(Properties, IndefinitenessMonotone) {
    auto m = IndefinitenessModel::defaults();
    Rng rng(111);
    std::vector<std::string> words;
    for (const auto& [w, fw] : m.functionWords) words.push_back(w);
    for (int i = 0; i < 500; ++i) {
        std::vector<std::string> ctx;
        for (std::size_t k = rng.below(4); k > 0; --k) ctx.push_back(words[rng.below(words.size())]);
        double before = indefiniteness(ctx, m);
        EXPECT_GT(before, 0.0);
        EXPECT_LT(before, 1.0);
        for (const auto& w : words) {
            const auto& fw = m.functionWords.at(w);
            auto more = ctx;
            more.push_back(w);
            double after = indefiniteness(more, m);
            if (fw.pGivenIndef > fw.pGivenDef) EXPECT_GT(after, before);
            if (fw.pGivenIndef < fw.pGivenDef) EXPECT_LT(after, before);
        }
    }
}

TEST(Properties, SpotPermutationWithExtensionsOff) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto kb = random_small_kb(seed + 500);
        Rng rng(seed);
        std::vector<std::string> items;
        for (int k = 0; k < 5; ++k) {
            const auto& n = kb.nodes()[rng.below(kb.nodes().size())];
            std::string s;
            for (const auto& t : n.surfaces[0].tokens) s += (s.empty() ? "" : " ") + t;
            items.push_back(s);
        }
        auto set = [&](const std::vector<std::string>& v) {
            std::string text = "hmm";
            for (const auto& s : v) text += ", " + s;
            std::vector<std::size_t> nodes;
            for (const auto& a : analyze(text, kb, {false, false}).activations) nodes.push_back(a.node);
            std::sort(nodes.begin(), nodes.end());
            return nodes;
        };
        auto before = set(items);
        std::reverse(items.begin(), items.end());
        EXPECT_EQ(set(items), before);
    }
}
