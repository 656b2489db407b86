#include <doctest.h>

#include <map>
#include <string>

#include "frnn/config.hpp"
#include "frnn/errors.hpp"

using namespace frnn;

TEST_SUITE("config") {

TEST_CASE("text parsing: comments, blanks, whitespace, duplicates") {
    const std::string text =
        "# leading comment\n"
        "\n"
        "gd.initial_gamma = 2.5\n"
        "  gd.batch_size=20   # trailing comment\n"
        "combo.candidates = man, euc ,che\n";
    const auto map = parse_config_text(text);
    REQUIRE(map.size() == 3);
    CHECK(map.at("gd.initial_gamma") == "2.5");
    CHECK(map.at("gd.batch_size") == "20");
    CHECK(map.at("combo.candidates") == "man, euc ,che");

    CHECK_THROWS_AS(parse_config_text("gd.seed\n"), ParseError);
    CHECK_THROWS_AS(parse_config_text("= 3\n"), ParseError);
    CHECK_THROWS_WITH_AS(parse_config_text("a = 1\na = 2\n"),
                         "config line 2: duplicate key 'a'", ParseError);
}

TEST_CASE("all recognised keys reach the tuning configs") {
    const auto map = parse_config_text(
        "gd.initial_gamma = 3\n"
        "gd.batch_size = 50\n"
        "gd.learning_rate = 0.05\n"
        "gd.max_iterations = 123\n"
        "gd.precision = 1e-4\n"
        "gd.seed = 99\n"
        "combo.folds = 7\n"
        "combo.candidates = man,gauss:0.5,csmbr\n"
        "combo.seed = 17\n");
    GradientDescentConfig gd;
    ComboConfig combo;
    apply_config(map, gd, combo);
    CHECK(gd.initial_gamma == 3.0);
    CHECK(gd.batch_size == 50);
    CHECK(gd.learning_rate == 0.05);
    CHECK(gd.max_iterations == 123);
    CHECK(gd.precision == 1e-4);
    CHECK(gd.seed == 99);
    CHECK(combo.inner_folds == 7);
    CHECK(combo.candidates ==
          std::vector<std::string>{"man", "gauss:0.5", "csmbr"});
    CHECK(combo.seed == 17);
}

TEST_CASE("unapplied keys keep their defaults") {
    GradientDescentConfig gd;
    ComboConfig combo;
    apply_config(parse_config_text("gd.batch_size = 4\n"), gd, combo);
    CHECK(gd.batch_size == 4);
    CHECK(gd.initial_gamma == 1.0);
    CHECK(gd.learning_rate == 0.01);
    CHECK(gd.max_iterations == 10000);
    CHECK(gd.precision == 1e-5);
    CHECK(combo.inner_folds == 5);
}

TEST_CASE("unknown keys and bad values are rejected") {
    GradientDescentConfig gd;
    ComboConfig combo;
    CHECK_THROWS_WITH_AS(apply_config({{"gd.gamma", "1"}}, gd, combo),
                         "unknown config key 'gd.gamma'", ParseError);
    CHECK_THROWS_AS(apply_config({{"gd.batch_size", "many"}}, gd, combo), ParseError);
    CHECK_THROWS_AS(apply_config({{"gd.initial_gamma", "2x"}}, gd, combo), ParseError);
    CHECK_THROWS_AS(apply_config({{"gd.seed", "-1"}}, gd, combo), ParseError);
    CHECK_THROWS_AS(apply_config({{"combo.candidates", "man,,euc"}}, gd, combo), ParseError);
}

} // TEST_SUITE
