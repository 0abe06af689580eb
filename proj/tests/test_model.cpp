#include <gtest/gtest.h>

#include "support.hpp"

using namespace uspt;
using namespace uspt::testing;

namespace {

using Sets = std::vector<std::vector<ItemId>>;
using Entries = std::vector<ItemQuantity>;

class RunningExample : public ::testing::Test {
 protected:
  Instance x = running_example();
  ItemId id(const char* name) const { return x.symbols.id(name); }
  Pattern p(const char* text) const { return pat(x, text); }
};

TEST_F(RunningExample, SequenceUtilities) {
  const Money want[] = {56, 67, 94, 67, 76, 81};
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(qsequence_utility(x.db.sequences[k], x.utable), want[k]);
  EXPECT_EQ(database_utility(x.db, x.utable), 441);
}

TEST_F(RunningExample, ItemAndItemsetUtility) {
  const auto& first = x.db.sequences[2].element(0);
  EXPECT_EQ(item_utility(id("a"), 3, x.utable), 12);
  EXPECT_EQ(qitemset_utility(first, x.utable), 22);
}

TEST_F(RunningExample, Miu) {
  EXPECT_EQ(miu(p("[b]"), x.mtable), 500);
  EXPECT_EQ(miu(p("[b e]"), x.mtable), 200);
  EXPECT_EQ(miu(p("[f],[b c],[b]"), x.mtable), 70);
}

TEST_F(RunningExample, MatchesOfBThenCInS3) {
  const auto& s3 = x.db.sequences[2];
  const auto matches = find_matches(p("[b],[c]"), s3);
  ASSERT_EQ(matches.size(), 3u);
  std::vector<Money> utilities;
  for (const auto& m : matches) utilities.push_back(match_utility(m, s3, x.utable));
  std::sort(utilities.begin(), utilities.end());
  EXPECT_EQ(utilities, (std::vector<Money>{13, 25, 30}));
  EXPECT_EQ(pattern_utility_in_sequence(p("[b],[c]"), s3, x.utable), 30);
}

TEST_F(RunningExample, Containment) {
  const auto& s3 = x.db.sequences[2];
  EXPECT_TRUE(contains(s3, p("[a b],[a b c],[b c e]")));
  EXPECT_TRUE(contains(s3, p("[b],[d]")));
  EXPECT_FALSE(contains(s3, p("[a b e]")));
  EXPECT_FALSE(contains(s3, p("[d],[a]")));
  EXPECT_FALSE(pattern_utility_in_sequence(p("[f]"), s3, x.utable).has_value());
}

TEST_F(RunningExample, PatternUtilities) {
  EXPECT_EQ(pattern_utility(p("[b],[c]"), x.db, x.utable), 160);
  EXPECT_EQ(pattern_utility(p("[a b]"), x.db, x.utable), 55);
  EXPECT_EQ(pattern_utility(p("[b],[c e]"), x.db, x.utable), 200);
  EXPECT_EQ(pattern_utility(p("[f],[b c],[b e]"), x.db, x.utable), 81);
  EXPECT_EQ(pattern_utility(p("[f],[b c],[b]"), x.db, x.utable), 73);
  EXPECT_EQ(pattern_utility(p("[f],[b],[b e]"), x.db, x.utable), 72);
}

TEST_F(RunningExample, SingleItemUtilities) {
  const std::pair<const char*, Money> want[] = {{"a", 48}, {"b", 130}, {"c", 72}, {"d", 17}, {"e", 48}, {"f", 24}};
  for (const auto& [name, u] : want) EXPECT_EQ(pattern_utility(Pattern::single(id(name)), x.db, x.utable), u) << name;
}

TEST(Model, QItemsetValidation) {
  EXPECT_THROW(QItemset(Entries{}), InvalidData);
  EXPECT_THROW(QItemset(Entries{{1, 1}, {1, 2}}), InvalidData);
  EXPECT_THROW(QItemset(Entries{{2, 1}, {1, 2}}), InvalidData);
  EXPECT_THROW(QItemset(Entries{{1, 0}}), InvalidData);
  try {
    QItemset(Entries{{3, 1}, {3, 1}});
    FAIL();
  } catch (const InvalidData& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(Model, PatternValidation) {
  EXPECT_THROW(Pattern(Sets{}), InvalidData);
  EXPECT_THROW(Pattern(Sets{{1}, {}}), InvalidData);
  EXPECT_THROW(Pattern(Sets{{2, 1}}), InvalidData);
  const Pattern t(Sets{{0, 1}, {0}});
  EXPECT_EQ(t.k(), 2u);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.last_item(), 0u);
}

TEST(Model, EmptySequenceRejected) { EXPECT_THROW(QSequence(1, {}), InvalidData); }

TEST(Model, UnknownItemInTables) {
  UtilityTable ut{{1, 2}};
  EXPECT_THROW(ut.at(5), UnknownItem);
  MTable mt{{1}};
  EXPECT_THROW(miu(Pattern::single(3), mt), UnknownItem);
}

TEST(Model, EmptyDatabase) {
  QSDatabase db;
  UtilityTable ut{{1}};
  EXPECT_EQ(database_utility(db, ut), 0);
  EXPECT_EQ(pattern_utility(Pattern::single(0), db, ut), 0);
}

TEST(Model, SymbolOrderNumbersFirst) {
  const auto sy = SymbolTable::from_names({"b", "10", "a", "2", "007", "x1"});
  EXPECT_EQ(sy.names(), (std::vector<std::string>{"2", "007", "10", "a", "b", "x1"}));
  EXPECT_THROW(sy.id("zz"), Error);
  EXPECT_THROW(sy.name(99), UnknownItem);
}

TEST(Lstree, Concatenations) {
  const Pattern a(Sets{{0}});
  EXPECT_EQ(i_concatenate(a, 1), Pattern(Sets{{0, 1}}));
  EXPECT_EQ(s_concatenate(a, 0), Pattern(Sets{{0}, {0}}));
  EXPECT_THROW(i_concatenate(a, 0), InvalidConcatenation);
  EXPECT_THROW(i_concatenate(Pattern(Sets{{0, 2}}), 1), InvalidConcatenation);
}

TEST(Lstree, OrderFromTheDefinition) {
  // <a> < <[ab]> < <a,a> < <a,c>
  const Pattern chain[] = {Pattern(Sets{{0}}), Pattern(Sets{{0, 1}}), Pattern(Sets{{0}, {0}}), Pattern(Sets{{0}, {2}})};
  for (std::size_t k = 0; k + 1 < std::size(chain); ++k) {
    EXPECT_TRUE(pattern_order(chain[k], chain[k + 1]) < 0) << k;
    EXPECT_TRUE(pattern_order(chain[k + 1], chain[k]) > 0) << k;
  }
  EXPECT_TRUE(pattern_order(chain[1], chain[1]) == 0);
}

// ---------------------------------------------------------------------------
// Properties

TEST(ModelProperty, FindMatchesAgreesWithNaiveEnumeration) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const auto x = random_instance(seed);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 25; ++k) {
      const Pattern t = random_contained_pattern(x.db, rng, 5);
      for (const auto& s : x.db.sequences) {
        const auto naive = naive_matches(t, s, x.utable);
        const auto got = find_matches(t, s);
        ASSERT_EQ(got.size(), naive.size());
        std::vector<Money> a, b;
        for (const auto& m : got) a.push_back(match_utility(m, s, x.utable));
        for (const auto& m : naive) b.push_back(m.utility);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        ASSERT_EQ(a, b);
        ASSERT_EQ(contains(s, t), !naive.empty());
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(ModelProperty, MiuIgnoresItemOrder) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    MTable mt;
    for (int i = 0; i < 8; ++i) mt.mu.push_back(std::uniform_int_distribution<Money>(0, 1000)(rng));
    std::vector<ItemId> items{0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(items.begin(), items.end(), rng);
    items.resize(4);
    Money direct = kMoneyMax;
    for (ItemId i : items) direct = std::min(direct, mt.mu[i]);
    std::sort(items.begin(), items.end());
    EXPECT_EQ(miu(Pattern(Sets{items}), mt), direct);
    std::vector<std::vector<ItemId>> split;
    for (ItemId i : items) split.push_back({i});
    std::reverse(split.begin(), split.end());
    EXPECT_EQ(miu(Pattern(split), mt), direct);
  }
}

TEST(LstreeProperty, OrderIsStrictAndTotalOnPatterns) {
  std::vector<Pattern> all;
  for (ItemId a = 0; a < 3; ++a) {
    all.push_back(Pattern(Sets{{a}}));
    for (ItemId b = 0; b < 3; ++b) {
      all.push_back(Pattern(Sets{{a}, {b}}));
      if (b > a) all.push_back(Pattern(Sets{{a, b}}));
    }
  }
  for (const auto& p : all)
    for (const auto& q : all) {
      const auto pq = pattern_order(p, q);
      EXPECT_EQ(pq == 0, p == q);
      EXPECT_EQ(pq < 0, pattern_order(q, p) > 0);
      for (const auto& r : all)
        if (pq < 0 && pattern_order(q, r) < 0) {
          EXPECT_TRUE(pattern_order(p, r) < 0);
        }
    }
}

}  // namespace
