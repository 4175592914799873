#include "dlpsmpc/grid_search.hpp"
#include "dlpsmpc/market_data.hpp"

#include <doctest.h>

#include <string>

using namespace dlp;

namespace {

ReturnSeries tiny() { return to_returns(load_prices(std::string(DLP_TEST_DATA) + "/tiny_fixture.csv")); }

}  // namespace

TEST_CASE("2x2x2 grid yields eight ranked rows") {
    const auto r = tiny();
    const ParameterGrid g{{0.1, 1.0}, {2, 5}, {5, 10}};
    GridSearchOptions o;
    o.validation_start = 25;
    const auto rows = grid_search(r, g, ControllerConfig{}, o);
    REQUIRE(rows.size() == 8);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i - 1].criterion);
        REQUIRE(rows[i].criterion);
        CHECK(*rows[i - 1].criterion >= *rows[i].criterion);
    }
}

TEST_CASE("single-point grid and thread-count independence") {
    const auto r = tiny();
    const ParameterGrid one{{0.1}, {3}, {6}};
    GridSearchOptions o;
    o.validation_start = 20;
    CHECK(grid_search(r, one, ControllerConfig{}, o).size() == 1);

    const ParameterGrid g{{0.1, 0.5, 1.0}, {2, 4}, {5, 8}};
    o.threads = 1;
    const auto a = grid_search(r, g, ControllerConfig{}, o);
    o.threads = 4;
    const auto b = grid_search(r, g, ControllerConfig{}, o);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].gamma == b[i].gamma);
        CHECK(a[i].horizon == b[i].horizon);
        CHECK(a[i].window == b[i].window);
        CHECK(a[i].criterion == b[i].criterion);
    }
}

TEST_CASE("invalid grids and splits") {
    const auto r = tiny();
    GridSearchOptions o;
    o.validation_start = 20;
    CHECK_THROWS_AS(grid_search(r, ParameterGrid{{}, {2}, {5}}, ControllerConfig{}, o), std::invalid_argument);
    o.validation_start = r.size() + 5;
    CHECK_THROWS_AS(grid_search(r, ParameterGrid{{0.1}, {2}, {5}}, ControllerConfig{}, o), std::invalid_argument);
}

TEST_CASE("windows longer than the data become failed rows ranked last") {
    const auto r = tiny();
    GridSearchOptions o;
    o.validation_start = 20;
    const auto rows = grid_search(r, ParameterGrid{{0.1}, {2}, {5, 100}}, ControllerConfig{}, o);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].criterion);
    CHECK_FALSE(rows[1].criterion);
    CHECK_FALSE(rows[1].error.empty());
}
