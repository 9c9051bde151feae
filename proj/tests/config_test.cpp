#include <gtest/gtest.h>

#include "quadratomo/config.hpp"

using quadratomo::ValidationError;
using quadratomo::config::Config;

TEST(Config, ParsesSectionsCommentsAndTypes) {
  const auto c = Config::parse(
      "# header\n"
      "[a]\n"
      "  x = 1.5   ; trailing\n"
      "n=7\n"
      "flag = yes\n"
      "list = 25, 30,35\n"
      "name = best_guess\n"
      "\n"
      "[b]\n"
      "x = -2\n");
  EXPECT_DOUBLE_EQ(c.number("a", "x", 0), 1.5);
  EXPECT_EQ(c.integer("a", "n", 0), 7);
  EXPECT_TRUE(c.boolean("a", "flag", false));
  EXPECT_EQ(c.int_list("a", "list", {}), (std::vector<int>{25, 30, 35}));
  EXPECT_EQ(c.str("a", "name", ""), "best_guess");
  EXPECT_DOUBLE_EQ(*c.number("b", "x"), -2);
  EXPECT_FALSE(c.number("b", "missing"));
  EXPECT_EQ(c.integer("b", "missing", 11), 11);
}

TEST(Config, RejectsMalformedLines) {
  EXPECT_THROW(Config::parse("[a\nx=1\n"), ValidationError);
  EXPECT_THROW(Config::parse("[a]\njust text\n"), ValidationError);
  EXPECT_THROW(Config::parse("[a]\n= 3\n"), ValidationError);
  EXPECT_THROW(Config::parse("[a]\nx = 1\nx = 2\n"), ValidationError);
}

TEST(Config, RejectsBadValues) {
  const auto c = Config::parse("[a]\nx = one\nn = 2.5\nb = maybe\n");
  EXPECT_THROW(c.number("a", "x", 0), ValidationError);
  EXPECT_THROW(c.integer("a", "n", 0), ValidationError);
  EXPECT_THROW(c.boolean("a", "b", false), ValidationError);
  EXPECT_THROW(c.required("a", "missing"), ValidationError);
}

TEST(Config, UnknownKeysAreReported) {
  const auto c = Config::parse("[a]\nsamples = 10\nsampels = 20\n[other]\nz = 1\n");
  c.integer("a", "samples", 0);
  EXPECT_THROW(c.reject_unknown({"a"}), ValidationError);
  c.integer("a", "sampels", 0);
  EXPECT_NO_THROW(c.reject_unknown({"a"}));
}

TEST(Config, PathsResolveAgainstConfigDirectory) {
  const auto c = Config::parse("[a]\nrel = data/x.csv\nabs = /tmp/y.csv\n", "/some/dir");
  EXPECT_EQ(*c.path("a", "rel"), std::filesystem::path("/some/dir/data/x.csv"));
  EXPECT_EQ(*c.path("a", "abs"), std::filesystem::path("/tmp/y.csv"));
  EXPECT_THROW(c.existing_path("a", "rel"), ValidationError);
}

TEST(Config, LoadMissingFileIsValidationError) {
  EXPECT_THROW(Config::load("/nonexistent/quadratomo.ini"), ValidationError);
}
