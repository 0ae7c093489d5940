#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "goalspot/errors.hpp"
#include "goalspot/harness.hpp"
#include "goalspot/kb_io.hpp"
#include "json.hpp"

using namespace goalspot;

namespace {

ObservedEvidence observe(const KnowledgeBase& kb, std::string_view text) {
    return observed_from(analyze(text, kb, {}));
}

SynthParams small(std::uint64_t seed) {
    SynthParams p;
    p.numGoals = 4;
    p.numTerms = 6;
    p.numLinks = 10;
    p.seed = seed;
    p.fracSplit = 0.5;
    p.fracZeroDerivation = 0.3;
    p.randomizeLeak = true;
    p.randomizePriors = true;
    return p;
}

}  // namespace

TEST(Oracle, PrintFixture) {
    auto kb = KnowledgeBase::build(fixtures::print_chart());
    auto post = oracle_posterior(kb, observe(kb, "print"));
    EXPECT_NEAR(post[0], 0.14985 / 0.15025, 1e-12);
    EXPECT_NEAR(post[0], 0.99734, 1e-5);
    post = oracle_posterior(kb, observe(kb, ""));
    EXPECT_NEAR(post[0], 7.0 / 15.0, 1e-12);
}

TEST(Oracle, SymmetricGoals) {
    auto d = fixtures::print_chart();
    d.links = {fixtures::plain("g1", "print", 0.3), fixtures::plain("g2", "print", 0.3)};
    auto kb = KnowledgeBase::build(d);
    for (const char* q : {"", "print", "chart", "print chart"}) {
        auto post = oracle_posterior(kb, observe(kb, q));
        EXPECT_NEAR(post[0], 0.5, 1e-15) << q;
        EXPECT_NEAR(post[1], 0.5, 1e-15) << q;
    }
}

TEST(Oracle, SingleGoal) {
    auto d = fixtures::print_chart();
    d.goals = {{"g1", "", 1.0}};
    d.links.pop_back();
    auto kb = KnowledgeBase::build(d);
    EXPECT_EQ(oracle_posterior(kb, observe(kb, "chart"))[0], 1.0);
}

TEST(Oracle, RefusesLargeKb) {
    SynthParams p;
    p.numGoals = 2;
    p.numTerms = 21;
    p.numLinks = 5;
    auto kb = synth_kb(p);
    EXPECT_THROW(oracle_posterior(kb, {}), DomainError);
}

TEST(Oracle, AgreesWithEngineOnSplitLinks) {
    auto kb = KnowledgeBase::build(fixtures::create_modify());
    for (const char* q : {"create a chart", "change this chart", "chart", "under my chart"}) {
        auto analysis = analyze(q, kb, {});
        auto scores = score_goals(kb, analysis);
        auto post = oracle_posterior(kb, observed_from(analysis));
        for (std::size_t g = 0; g < scores.size(); ++g) EXPECT_NEAR(scores[g].posterior, post[g], 1e-12) << q;
    }
}

TEST(Oracle, RandomKbs) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto kb = synth_kb(small(seed));
        Rng rng(seed);
        for (int q = 0; q < 10; ++q) {
            auto sq = sample_query(kb, rng.below(kb.goals().size()), rng.next());
            auto analysis = analyze(sq.text, kb, {});
            auto scores = score_goals(kb, analysis);
            auto post = oracle_posterior(kb, observed_from(analysis));
            for (std::size_t g = 0; g < scores.size(); ++g) EXPECT_NEAR(scores[g].posterior, post[g], 1e-9);
        }
    }
}

TEST(RankingConsistent, Basics) {
    std::vector<double> ref{0.2, 0.5, 0.3};
    EXPECT_TRUE(ranking_consistent({1, 2, 0}, ref));
    EXPECT_FALSE(ranking_consistent({2, 1, 0}, ref));
    std::vector<double> tie{0.5, 0.5 + 1e-16};
    EXPECT_TRUE(ranking_consistent({0, 1}, tie));
}

TEST(Synth, PaperScaleCounts) {
    SynthParams p;
    p.numGoals = 1000;
    p.numTerms = 5000;
    p.numLinks = 145000;
    p.seed = 7;
    auto kb = synth_kb(p);
    EXPECT_EQ(kb.goals().size(), 1000u);
    EXPECT_EQ(kb.nodes().size(), 5000u);
    EXPECT_EQ(kb.links().size(), 145000u);
    EXPECT_TRUE(validate_kb(kb.data()).empty());
}

TEST(Synth, Deterministic) {
    SynthParams p;
    p.seed = 11;
    EXPECT_EQ(serialize_kb(synth_kb(p).data()), serialize_kb(synth_kb(p).data()));
    auto q = p;
    q.seed = 12;
    EXPECT_NE(serialize_kb(synth_kb(p).data()), serialize_kb(synth_kb(q).data()));
}

TEST(Synth, Infeasible) {
    SynthParams p;
    p.numGoals = 2;
    p.numTerms = 3;
    p.numLinks = 7;
    EXPECT_THROW(synth_kb(p), DomainError);
    p.numLinks = 6;
    EXPECT_NO_THROW(synth_kb(p));
    p.numGoals = 0;
    EXPECT_THROW(synth_kb(p), DomainError);
}

TEST(Synth, ProbabilitiesFromBuckets) {
    auto kb = synth_kb(SynthParams{});
    for (const auto& l : kb.links()) {
        if (const auto* p = std::get_if<PlainProb>(&l.probs)) {
            ASSERT_TRUE(p->p.bucket);
            EXPECT_EQ(p->p.value, bucket_to_probability(*p->p.bucket, kb.scale()));
        }
    }
}

TEST(SampleQuery, BinomialPresence) {
    auto d = fixtures::print_chart();
    d.goals = {{"g1", "", 1.0}};
    d.links = {fixtures::plain("g1", "print", 0.9)};
    auto kb = KnowledgeBase::build(d);
    int present = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        auto s = sample_query(kb, 0, seed);
        for (auto n : s.nodes)
            if (kb.nodes()[n].id == "print") ++present;
    }
    // mean 900, sigma sqrt(1000*.9*.1) = 9.49
    EXPECT_NEAR(present, 900, 28.5);
}

TEST(SampleQuery, ZeroLeakOnlyLinked) {
    auto kb = synth_kb(small(3));
    SampleOptions o;
    o.leakOverride = 0.0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        std::size_t goal = seed % kb.goals().size();
        std::set<std::size_t> linked;
        for (const auto& c : kb.goal_links(goal)) linked.insert(c.node);
        for (auto n : sample_query(kb, goal, seed, o).nodes) EXPECT_TRUE(linked.count(n));
    }
}

TEST(SampleQuery, DeterministicAndSpottable) {
    auto kb = synth_kb(small(5));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto a = sample_query(kb, 1, seed);
        auto b = sample_query(kb, 1, seed);
        EXPECT_EQ(a.text, b.text);
        EXPECT_EQ(a.nodes, b.nodes);
        std::vector<std::size_t> got;
        for (const auto& act : analyze(a.text, kb, {}).activations) got.push_back(act.node);
        std::sort(got.begin(), got.end());
        EXPECT_EQ(got, a.nodes) << a.text;
    }
}

class Smoke : public ::testing::Test {
protected:
    KnowledgeBase kb = KnowledgeBase::build(fixtures::print_chart());
};

TEST_F(Smoke, AllHit) {
    auto suite = parse_smoke_suite("print\tg1\nchart\tg2\nprint a chart\tg1,g2\n");
    auto r = run_smoke(kb, suite, 5, 0.99);
    EXPECT_EQ(r.cases, 3u);
    EXPECT_EQ(r.hits, 3u);
    EXPECT_EQ(r.topKRate, 1.0);
    EXPECT_TRUE(r.passed);
}

TEST_F(Smoke, TwoOfThree) {
    auto suite = parse_smoke_suite("print\tg1\nchart\tg2\nprint\tg2\n");
    auto r = run_smoke(kb, suite, 1, 0.99);
    EXPECT_EQ(r.hits, 2u);
    EXPECT_DOUBLE_EQ(r.topKRate, 2.0 / 3.0);
    EXPECT_NEAR(r.topKRate, 0.6667, 1e-4);
    EXPECT_FALSE(r.passed);
    EXPECT_FALSE(r.perCase[2].hitAtK);
    EXPECT_EQ(r.perCase[2].rankOfBestExpected, 2u);
    EXPECT_EQ(r.perCase[2].topGoalId, "g1");
}

TEST_F(Smoke, Errors) {
    EXPECT_THROW(run_smoke(kb, SmokeSuite{}, 5, 0.99), DomainError);
    auto suite = parse_smoke_suite("print\tg1\n");
    EXPECT_THROW(run_smoke(kb, suite, 0, 0.99), DomainError);
    EXPECT_THROW(run_smoke(kb, suite, 5, 1.5), DomainError);
    EXPECT_THROW(run_smoke(kb, parse_smoke_suite("print\tnope\n"), 5, 0.5), DomainError);
}

TEST_F(Smoke, ParseComments) {
    auto s = parse_smoke_suite("# header\n\nprint\tg1\n");
    ASSERT_EQ(s.cases.size(), 1u);
    EXPECT_EQ(s.cases[0].line, 3u);
}

TEST_F(Smoke, MalformedLineNumber) {
    try {
        parse_smoke_suite("print\tg1\nno tab here\n");
        FAIL();
    } catch (const SuiteParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
    }
    EXPECT_THROW(parse_smoke_suite("print\t\n"), SuiteParseError);
}

TEST_F(Smoke, ReportJson) {
    auto suite = parse_smoke_suite("print\tg1\nprint\tg2\n");
    auto r = run_smoke(kb, suite, 1, 0.5);
    auto j = nlohmann::json::parse(smoke_report_json(r, suite));
    EXPECT_EQ(j["hits"], 1);
    EXPECT_EQ(j["passed"], true);
    EXPECT_EQ(j["topKRate"], 0.5);
    EXPECT_FALSE(smoke_report_table(r, suite).empty());
}

TEST(Recovery, SmallKbsAgree) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto kb = synth_kb(small(seed));
        auto r = generative_recovery(kb, 100, seed);
        EXPECT_EQ(r.trials, 100u);
        EXPECT_EQ(r.rankingAgreements, 100u);
        EXPECT_LE(r.maxPosteriorGap, 1e-9);
        EXPECT_EQ(r.spotMismatches, 0u);
        EXPECT_EQ(r.engineTop1Rate, r.oracleTop1Rate);
    }
}

TEST(Recovery, SingleGoal) {
    auto d = fixtures::print_chart();
    d.goals = {{"g1", "", 1.0}};
    d.links.pop_back();
    auto r = generative_recovery(KnowledgeBase::build(d), 50, 1);
    EXPECT_EQ(r.engineTop1Rate, 1.0);
    EXPECT_EQ(r.oracleTop1Rate, 1.0);
}

TEST(Recovery, SymmetricGoals) {
    auto d = fixtures::print_chart();
    d.links = {fixtures::plain("g1", "print", 0.3), fixtures::plain("g2", "print", 0.3)};
    auto r = generative_recovery(KnowledgeBase::build(d), 200, 9);
    EXPECT_EQ(r.rankingAgreements, 200u);
    EXPECT_EQ(r.engineTop1Rate, r.oracleTop1Rate);
}
