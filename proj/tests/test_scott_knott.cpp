#include <doctest.h>

#include "prlat/error.hpp"
#include "prlat/rng.hpp"
#include "prlat/scott_knott.hpp"

using namespace prlat;

namespace {

std::vector<double> constant(double v, int n) { return std::vector<double>(n, v); }

// mean `center`, alternating +/- spread, zero-mean noise pattern
std::vector<double> around(double center, double spread, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(center + ((i % 2 == 0) ? spread : -spread));
    return v;
}

}  // namespace

TEST_CASE("clearly separated constant treatments form two groups") {
    std::map<std::string, std::vector<double>> t{{"A", constant(0.9, 20)},
                                                 {"B", constant(0.5, 20)}};
    auto groups = scott_knott_esd(t);
    REQUIRE(groups.groups.size() == 2);
    CHECK(groups.rank_of("A") == 1);
    CHECK(groups.rank_of("B") == 2);
}

TEST_CASE("identical observation lists collapse to one group") {
    std::map<std::string, std::vector<double>> t{{"A", {0.7, 0.8, 0.9}},
                                                 {"B", {0.7, 0.8, 0.9}}};
    auto groups = scott_knott_esd(t);
    REQUIRE(groups.groups.size() == 1);
    CHECK(groups.rank_of("A") == 1);
    CHECK(groups.rank_of("B") == 1);
}

TEST_CASE("near-tied top pair merges under the effect-size gate") {
    // A and B differ by 0.01 against within-spread 0.1 (d ~ 0.1 < 0.2);
    // C sits far below (d ~ 3.9).
    std::map<std::string, std::vector<double>> t{{"A", around(0.90, 0.1, 10)},
                                                 {"B", around(0.89, 0.1, 10)},
                                                 {"C", around(0.50, 0.1, 10)}};
    auto groups = scott_knott_esd(t);
    REQUIRE(groups.groups.size() == 2);
    CHECK(groups.rank_of("A") == 1);
    CHECK(groups.rank_of("B") == 1);
    CHECK(groups.rank_of("C") == 2);
}

TEST_CASE("three-tier structure yields three ranks") {
    std::map<std::string, std::vector<double>> t{{"hi", around(0.9, 0.01, 12)},
                                                 {"mid", around(0.7, 0.01, 12)},
                                                 {"lo", around(0.4, 0.01, 12)}};
    auto groups = scott_knott_esd(t);
    REQUIRE(groups.groups.size() == 3);
    CHECK(groups.rank_of("hi") == 1);
    CHECK(groups.rank_of("mid") == 2);
    CHECK(groups.rank_of("lo") == 3);
}

TEST_CASE("ranking invariant under constant shifts and relabeling") {
    auto rng = make_rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<std::string, std::vector<double>> t;
        const int n_treat = 2 + static_cast<int>(draw_below(rng, 5));
        const int n_obs = 5 + static_cast<int>(draw_below(rng, 15));
        for (int i = 0; i < n_treat; ++i) {
            std::vector<double> obs;
            const double center = draw_unit(rng);
            for (int j = 0; j < n_obs; ++j) obs.push_back(center + 0.05 * draw_normal(rng));
            t["t" + std::to_string(i)] = std::move(obs);
        }
        auto base = scott_knott_esd(t);

        const double shift = 10.0 * draw_normal(rng);
        std::map<std::string, std::vector<double>> shifted;
        for (auto& [name, obs] : t) {
            auto copy = obs;
            for (auto& v : copy) v += shift;
            shifted[name] = std::move(copy);
        }
        auto after = scott_knott_esd(shifted);
        REQUIRE(after.groups.size() == base.groups.size());
        for (const auto& [name, _] : t) {
            CHECK(after.rank_of(name) == base.rank_of(name));
        }

        // relabeling permutes names but preserves the partition structure
        std::map<std::string, std::vector<double>> renamed;
        for (auto& [name, obs] : t) renamed["ZZ_" + name] = obs;
        auto relabeled = scott_knott_esd(renamed);
        for (const auto& [name, _] : t) {
            CHECK(relabeled.rank_of("ZZ_" + name) == base.rank_of(name));
        }
    }
}

TEST_CASE("degenerate inputs") {
    std::map<std::string, std::vector<double>> one{{"A", {1.0, 2.0}}};
    CHECK_THROWS_AS(scott_knott_esd(one), Error);

    std::map<std::string, std::vector<double>> ragged{{"A", {1.0, 2.0}}, {"B", {1.0}}};
    CHECK_THROWS_AS(scott_knott_esd(ragged), Error);
}
