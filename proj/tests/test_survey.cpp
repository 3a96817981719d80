#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "halo2d/parallel.hpp"
#include "halo2d/survey.hpp"

using namespace halo2d;

TEST(Config, ParsesValuesCommentsAndLists) {
  const auto c = Config::parse(
      "# comment\n"
      "a = 1.5   # trailing\n"
      "b = 1, 2 ,3\n"
      "c = 0:1:5\n"
      "d = yes\n"
      "name = pure_attractive\n");
  EXPECT_DOUBLE_EQ(c.num("a"), 1.5);
  EXPECT_EQ(c.list("b"), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(c.list("c"), (std::vector<double>{0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_TRUE(c.flag("d", false));
  EXPECT_EQ(c.str("name"), "pure_attractive");
  EXPECT_EQ(c.integer("missing", 7), 7);
  EXPECT_THROW(static_cast<void>(c.integer("a", 0)), ConfigError);
  EXPECT_THROW(static_cast<void>(c.num("name")), ConfigError);
  EXPECT_THROW(static_cast<void>(c.str("missing")), ConfigError);
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(Config::parse("novalue\n"), ConfigError);
  EXPECT_THROW(Config::parse("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(Config::parse(" = 2\n"), ConfigError);
  EXPECT_THROW(static_cast<void>(Config::parse("r = 1:2\n").list("r")), ConfigError);
}

TEST(Config, UnknownKeys) {
  const auto c = Config::parse("sweep.family = pure_attractive\nsweep.famliy = x\n");
  EXPECT_THROW(c.require_known(sweep_keys()), ConfigError);
}

TEST(Config, HashIgnoresLayoutButNotValues) {
  const auto a = Config::parse("x = 1\ny = 2\n");
  const auto b = Config::parse("# reordered\ny   =   2\n\nx = 1\n");
  const auto c = Config::parse("x = 1\ny = 3\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(hash_string(0xabcULL), "fnv1a64:0000000000000abc");
}

TEST(Sweep, FamilyValidation) {
  EXPECT_EQ(family_from_string("repulsive_core"), Family::repulsive_core);
  EXPECT_THROW(family_from_string("soft"), ConfigError);
  EXPECT_TRUE(shape_consistent(Family::repulsive_barrier, 20.0, -30.0));
  EXPECT_FALSE(shape_consistent(Family::repulsive_barrier, -20.0, -30.0));
  EXPECT_FALSE(shape_consistent(Family::repulsive_core, -1.0, 0.0));
  EXPECT_THROW(sweep_from_config(Config::parse("sweep.family = repulsive_core\nsweep.fixed = -2\n")), ConfigError);
  EXPECT_THROW(sweep_from_config(Config::parse("sweep.family = pure_attractive\nsweep.strengths = -1, 2\n")),
               ConfigError);
}

TEST(Sweep, TuneStrengthHitsTarget) {
  SweepConfig cfg;
  cfg.family = Family::repulsive_core;
  cfg.fixed = 10.0;
  const double s1 = tune_strength(cfg, 1e-3);
  EXPECT_LT(s1, 0.0);
  const double e = bound_states(PotentialSpec::gaussian_pair(1.0, s1, 10.0)).back();
  EXPECT_NEAR(-e, 1e-3, 1e-10);
}

TEST(Sweep, CsvHeader) {
  CsvTable t;
  t.columns = {"x", "y"};
  t.add({"1", fmt(0.5)});
  EXPECT_THROW(t.add({"1"}), NumericalError);
  std::ostringstream out;
  write_csv(out, {"demo", 0x1234ULL, kUnitsFinite}, t);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("# halo2d ", 0), 0u);
  EXPECT_NE(s.find("# command: demo\n"), std::string::npos);
  EXPECT_NE(s.find("# config_hash: fnv1a64:0000000000001234\n"), std::string::npos);
  EXPECT_NE(s.find("# units: "), std::string::npos);
  EXPECT_NE(s.find("# generated: "), std::string::npos);
  EXPECT_NE(s.find("\nx,y\n1,0.5\n"), std::string::npos);
  EXPECT_EQ(fmt(std::nan("")), "");
}

TEST(Sweep, PointIsDeterministicAcrossWorkerCounts) {
  SweepConfig cfg;
  cfg.family = Family::pure_attractive;
  cfg.strengths = {-3.0, -4.0};
  cfg.points_per_decade = 8;
  cfg.workers = 1;
  const auto a = fig2_sweep(cfg);
  cfg.workers = 2;
  const auto b = fig2_sweep(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].states.size(), b[i].states.size());
    ASSERT_TRUE(a[i].e2.has_value());
    EXPECT_EQ(*a[i].e2, *b[i].e2);
    for (std::size_t k = 0; k < a[i].states.size(); ++k) EXPECT_EQ(a[i].states[k].E3, b[i].states[k].E3);
  }
  const auto t = fig2_table(cfg, a);
  EXPECT_EQ(t.columns.front(), "family");
  EXPECT_FALSE(t.rows.empty());
}

TEST(Sweep, FreeCellIsUnbound) {
  SweepConfig cfg;
  cfg.family = Family::pure_attractive;
  const auto scan = borromean_scan(cfg, {0.0}, {0.0});
  ASSERT_EQ(scan.cells.size(), 1u);
  EXPECT_EQ(scan.cells[0].label, CellLabel::unbound);
  EXPECT_EQ(scan.borromean_count(), 0);
  EXPECT_THROW(borromean_scan(cfg, {1.0}, {-1.0}), ConfigError);
}

TEST(Parallel, EveryIndexOnceAndLowestErrorRethrown) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  try {
    parallel_for(10, 4, [](std::size_t i) {
      if (i == 3 || i == 7) throw NumericalError("fail " + std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const NumericalError& e) {
    EXPECT_STREQ(e.what(), "fail 3");
  }
}
