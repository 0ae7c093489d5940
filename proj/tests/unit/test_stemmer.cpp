#include <gtest/gtest.h>

#include "goalspot/stemmer.hpp"
#include "porter_golden.hpp"

using namespace goalspot;

TEST(Stem, SpecExamples) {
    EXPECT_EQ(stem("printing"), "print");
    EXPECT_EQ(stem("printed"), "print");
    EXPECT_EQ(stem("print"), "print");
    EXPECT_EQ(stem("charts"), "chart");
}

TEST(Stem, MatchesReferencePorter) {
    for (const auto& [word, expected] : kPorterGolden) EXPECT_EQ(porter_stem(word), expected) << word;
}

TEST(Stem, Idempotent) {
    for (const auto& [word, expected] : kPorterGolden) {
        auto once = stem(word);
        EXPECT_EQ(stem(once), once) << word;
    }
    // plain Porter is not a fixed point here
    EXPECT_EQ(stem("generalizations"), stem(stem("generalizations")));
}

TEST(Stem, ShortAndNonAlphaUnchanged) {
    EXPECT_EQ(stem("is"), "is");
    EXPECT_EQ(stem("a"), "a");
    EXPECT_EQ(stem("x86"), "x86");
    EXPECT_EQ(stem("don't"), "don't");
    EXPECT_EQ(stem(""), "");
}
