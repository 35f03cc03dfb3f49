#include <gtest/gtest.h>

#include "robustreg/config.hpp"
#include "robustreg/errors.hpp"

using namespace robustreg;

TEST(Config, SectionsAndComments) {
  const auto c = Config::parse(
      "top = 1\n"
      "[data]\n"
      "  n = 500   # sample size\n"
      "\n"
      "# whole-line comment\n"
      "[estimator]\n"
      "kernel = triangular_shifted\n");
  EXPECT_EQ(c.get_size("top"), 1u);
  EXPECT_EQ(c.get_size("data.n"), 500u);
  EXPECT_EQ(c.get_string("estimator.kernel"), "triangular_shifted");
  EXPECT_FALSE(c.has("n"));
}

TEST(Config, TypedAccessors) {
  const auto c = Config::parse("[a]\nx = 0.25\nn = 12\nlist = a, b ,,c\nseed = 18446744073709551615\n");
  EXPECT_EQ(c.get_double("a.x"), 0.25);
  EXPECT_EQ(c.get_double("a.missing", 3.0), 3.0);
  EXPECT_EQ(c.get_list("a.list"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(c.get_u64("a.seed", 0), 18446744073709551615ULL);
  EXPECT_THROW(c.get_size("a.x"), ConfigError);
  EXPECT_THROW(c.get_double("a.list"), ConfigError);
  EXPECT_THROW(c.get_string("a.missing"), ConfigError);
}

TEST(Config, ErrorsNameTheKey) {
  const auto c = Config::parse("[data]\nn = ten\n");
  try {
    c.get_size("data.n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "data.n");
  }
}

TEST(Config, MalformedLines) {
  EXPECT_THROW(Config::parse("[data\n"), ConfigError);
  EXPECT_THROW(Config::parse("just words\n"), ConfigError);
  EXPECT_THROW(Config::parse("= 3\n"), ConfigError);
  EXPECT_THROW(Config::parse("[]\n"), ConfigError);
  EXPECT_THROW(Config::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
}

TEST(Config, SetOverrides) {
  auto c = Config::parse("[run]\nseed = 1\n");
  c.set("run.seed", "7");
  EXPECT_EQ(c.get_u64("run.seed", 0), 7u);
}

TEST(Config, RequireKnown) {
  const auto c = Config::parse("[run]\nseed = 1\nsede = 2\n");
  try {
    c.require_known({"run.seed"});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "run.sede");
  }
}

TEST(Config, MissingFile) { EXPECT_THROW(Config::load("/nonexistent/x.cfg"), ConfigError); }
