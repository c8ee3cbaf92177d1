#include <doctest.h>

#include "newspulse/config.hpp"
#include "newspulse/errors.hpp"

using namespace newspulse;

TEST_CASE("config parses sections, types and lists") {
    Config cfg = Config::from_string(R"(
# pipeline config
[paths]
store = /tmp/store
registry = "fixtures/registry.csv"

[curate]
min_articles = 50
min_covid_share = 0.10

[regress]
models = model1, model2 , lag_both
)");
    CHECK(cfg.get("paths", "store") == "/tmp/store");
    CHECK(cfg.get("paths", "registry") == "fixtures/registry.csv");
    CHECK(cfg.get_int("curate", "min_articles", 0) == 50);
    CHECK(cfg.get_double("curate", "min_covid_share", 0) == doctest::Approx(0.10));
    CHECK(cfg.get("missing", "key", "dflt") == "dflt");
    auto models = cfg.get_list("regress", "models");
    REQUIRE(models.size() == 3);
    CHECK(models[0] == "model1");
    CHECK(models[2] == "lag_both");
}

TEST_CASE("config errors carry context") {
    CHECK_THROWS_AS(Config::from_string("[broken\nk = v\n"), ConfigError);
    CHECK_THROWS_AS(Config::from_string("not a k/v line\n"), ConfigError);
    Config cfg = Config::from_string("[curate]\nmin_articles = soon\n");
    CHECK_THROWS_AS(cfg.get_int("curate", "min_articles", 0), ConfigError);
}

TEST_CASE("require_paths names the missing file") {
    Config cfg = Config::from_string("[paths]\ncases = /definitely/not/here.csv\n");
    try {
        cfg.require_paths({"cases"});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/definitely/not/here.csv") != std::string::npos);
    }
    CHECK_THROWS_AS(cfg.require_paths({"votes_2020"}), ConfigError);
}
