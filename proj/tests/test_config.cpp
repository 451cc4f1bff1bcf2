#include <gtest/gtest.h>

#include "hybreg/config.hpp"

using hybreg::KeyValueConfig;

TEST(Config, ParsesKeysValuesAndComments) {
    const auto cfg = KeyValueConfig::parse("# header\n a = 1 \nb=two words # trailing\n\n");
    EXPECT_EQ(cfg.get("a").value(), "1");
    EXPECT_EQ(cfg.get("b").value(), "two words");
    EXPECT_FALSE(cfg.contains("c"));
    ASSERT_EQ(cfg.entries().size(), 2u);
    EXPECT_EQ(cfg.entries()[0].first, "a");
}

TEST(Config, LaterDuplicateWins) {
    const auto cfg = KeyValueConfig::parse("k = 1\nk = 2\n");
    EXPECT_EQ(cfg.get("k").value(), "2");
    EXPECT_EQ(cfg.entries().size(), 1u);
}

TEST(Config, MissingEqualsIsParseError) {
    try {
        KeyValueConfig::parse("a = 1\nnot a pair\n");
        FAIL() << "expected ParseError";
    } catch (const hybreg::ParseError& e) {
        EXPECT_EQ(e.row(), 2u);
    }
}

TEST(Config, StrictDoubles) {
    const auto cfg = KeyValueConfig::parse("x = 1.5e2\ny = 1.5abc\n");
    EXPECT_DOUBLE_EQ(cfg.get_double("x").value(), 150.0);
    EXPECT_THROW(cfg.get_double("y"), hybreg::SchemaError);
    EXPECT_FALSE(cfg.get_double("z").has_value());
}

TEST(Config, SplitList) {
    const auto parts = hybreg::detail::split_list("0.251, 1.257 ,0.754");
    ASSERT_EQ(parts.size(), 3u);
    EXPECT_EQ(parts[1], "1.257");
    EXPECT_EQ(hybreg::detail::split_list("a b\tc").size(), 3u);
}
