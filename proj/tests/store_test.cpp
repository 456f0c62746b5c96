#include "bach/store.hpp"

#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bach/errors.hpp"
#include "bach/term.hpp"
#include "support/generators.hpp"

namespace bach {
namespace {

SiTerm tok(const char* name) { return token(name); }

TEST(Store, TellAddsOccurrences) {
  Store s;
  s.tell(tok("a"));
  EXPECT_EQ(s.count(tok("a")), 1);
  s.tell(tok("a"));
  EXPECT_EQ(s.count(tok("a")), 2);
  s.tell(tok("b"));
  EXPECT_EQ(s.count(tok("a")), 2);
  EXPECT_EQ(s.count(tok("b")), 1);
}

TEST(Store, AskTestsPresenceWithoutChange) {
  Store s;
  EXPECT_FALSE(s.ask(tok("a")));
  s.tell(tok("a"));
  s.tell(tok("a"));
  EXPECT_TRUE(s.ask(tok("a")));
  EXPECT_FALSE(s.ask(tok("b")));
  EXPECT_EQ(s.count(tok("a")), 2);  // unchanged by the queries
}

TEST(Store, GetRemovesOneOccurrence) {
  Store s;
  s.tell(tok("a"));
  s.tell(tok("a"));
  EXPECT_TRUE(s.get(tok("a")));
  EXPECT_EQ(s.count(tok("a")), 1);
  EXPECT_TRUE(s.get(tok("a")));
  EXPECT_EQ(s.count(tok("a")), 0);
  EXPECT_TRUE(s.empty());  // entry deleted at zero, not kept at count 0
}

TEST(Store, GetFailsOnAbsenceWithoutChange) {
  Store s;
  EXPECT_FALSE(s.get(tok("a")));
  s.tell(tok("b"));
  EXPECT_FALSE(s.get(tok("a")));
  EXPECT_EQ(s.count(tok("b")), 1);
}

TEST(Store, NaskTestsAbsence) {
  Store s;
  EXPECT_TRUE(s.nask(tok("a")));
  s.tell(tok("a"));
  EXPECT_FALSE(s.nask(tok("a")));
  EXPECT_TRUE(s.nask(tok("b")));
}

TEST(Store, CountExamples) {
  Store s;
  EXPECT_EQ(s.count(tok("a")), 0);
  s.tell(tok("a"));
  s.tell(tok("a"));
  EXPECT_EQ(s.count(tok("a")), 2);
  s.tell(tok("b"));
  s.tell(tok("b"));
  s.tell(tok("b"));
  EXPECT_EQ(s.count(tok("b")), 3);
}

TEST(Store, PrimitivesRequireGroundTerms) {
  Store s;
  EXPECT_THROW(s.tell(var("X")), Error);
  EXPECT_THROW(s.ask(var("X")), Error);
  EXPECT_THROW(s.get(var("X")), Error);
  EXPECT_THROW(s.nask(var("X")), Error);
  EXPECT_THROW(s.count(compound("f", {var("X")})), Error);
}

TEST(Store, DumpIsSortedAndNewlineTerminated) {
  Store s;
  EXPECT_EQ(s.dump(), "");
  s.tell(tok("b"));
  s.tell(compound("f", {tok("a")}));
  s.tell(tok("b"));
  s.tell(tok("a"));
  EXPECT_EQ(s.dump(), "a : 1\nb : 2\nf(a) : 1\n");
}

TEST(Store, EqualityIsStructural) {
  Store s1;
  s1.tell(tok("a"));
  s1.tell(tok("b"));
  Store s2;
  s2.tell(tok("b"));
  s2.tell(tok("a"));
  EXPECT_EQ(s1, s2);  // insertion order is irrelevant
  s2.tell(tok("a"));
  EXPECT_NE(s1, s2);  // multiplicity matters
}

TEST(Store, GetUndoesTell) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Store s = testgen::random_store(rng);
    SiTerm t = testgen::random_ground_term(rng, 2);
    Store after = s;
    after.tell(t);
    ASSERT_TRUE(after.get(t));
    EXPECT_EQ(after, s);
  }
}

TEST(Store, AskAndNaskAreComplementary) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    Store s = testgen::random_store(rng);
    SiTerm t = testgen::random_ground_term(rng, 2);
    EXPECT_NE(s.ask(t), s.nask(t));
  }
}

TEST(Store, TellsCommute) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    Store base = testgen::random_store(rng);
    SiTerm t1 = testgen::random_ground_term(rng, 2);
    SiTerm t2 = testgen::random_ground_term(rng, 2);
    Store ab = base;
    ab.tell(t1);
    ab.tell(t2);
    Store ba = base;
    ba.tell(t2);
    ba.tell(t1);
    EXPECT_EQ(ab, ba);
  }
}

// Counts must track (#tells - #successful gets) per term, checked against a
// plain list of live terms.
TEST(Store, CountsMatchListOracle) {
  std::mt19937_64 rng(6);
  for (int round = 0; round < 1000; ++round) {
    Store s;
    std::vector<SiTerm> live;
    const int ops = static_cast<int>(testgen::below(rng, 20));
    for (int k = 0; k < ops; ++k) {
      SiTerm t = testgen::random_token(rng);
      if (testgen::coin(rng)) {
        s.tell(t);
        live.push_back(t);
      } else if (s.get(t)) {
        auto it = std::find(live.begin(), live.end(), t);
        ASSERT_NE(it, live.end());
        live.erase(it);
      }
    }
    for (const std::string& name : testgen::token_names()) {
      const SiTerm t = token(name);
      EXPECT_EQ(s.count(t),
                static_cast<long>(std::count(live.begin(), live.end(), t)));
    }
  }
}

}  // namespace
}  // namespace bach
