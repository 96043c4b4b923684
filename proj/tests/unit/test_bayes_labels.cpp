#include "matchflow/bayes_labels.hpp"
#include "matchflow/error.hpp"
#include "test_support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <random>

using namespace matchflow;
using namespace matchflow::labels;

TEST_SUITE("bayes_labels") {

TEST_CASE("67 of 100 serves won gives exactly 0.67") {
    std::vector<int> victors, servers;
    for (int i = 0; i < 100; ++i) {
        servers.push_back(i % 2 == 0 ? 1 : 2);
        const bool server_wins = i < 67;
        victors.push_back(server_wins ? servers.back() : 3 - servers.back());
    }
    const std::vector<ingest::MatchTimeline> tls{support::timeline_from(victors, servers)};
    const auto s = estimate_serve_win_posterior(tls, TimeUnit::Point);
    CHECK(s.p_win_given_serve == 0.67);
    CHECK(s.p_lose_given_serve == doctest::Approx(0.33).epsilon(1e-12));
    CHECK(s.counts.serves[0] + s.counts.serves[1] == 100);
    CHECK(s.counts.wins_on_serve[0] + s.counts.wins_on_serve[1] == 67);
}

TEST_CASE("counts match a brute-force tally on random timelines") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto victors = support::random_victors(gen, 40 + trial);
        const auto tl = support::timeline_from(victors);
        long serves1 = 0, held1 = 0, held2 = 0, wins2 = 0;
        for (const auto& r : tl.records) {
            serves1 += r.server == 1;
            held1 += r.server == 1 && r.point_victor == 1;
            held2 += r.server == 2 && r.point_victor == 2;
            wins2 += r.point_victor == 2;
        }
        const auto c = count_serve_outcomes(tl, TimeUnit::Point);
        CHECK(c.serves[0] == serves1);
        CHECK(c.wins_on_serve[0] == held1);
        CHECK(c.wins_on_serve[1] == held2);
        CHECK(c.wins[1] == wins2);
        CHECK(c.units == static_cast<long>(tl.size()));

        const auto s = stats_from_counts(c, TimeUnit::Point);
        CHECK(s.p_win_given_serve + s.p_lose_given_serve == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.p_win_given_serve == static_cast<double>(held1 + held2) / static_cast<double>(tl.size()));
        // Bayes rule through marginals agrees with the direct conditional ratio
        CHECK(posterior_via_bayes_rule(c, -1) == doctest::Approx(s.p_win_given_serve).epsilon(1e-12));
        if (c.serves[0] > 0 && c.wins[0] > 0) {
            CHECK(posterior_via_bayes_rule(c, 0) == doctest::Approx(s.player_p_win_given_serve[0]).epsilon(1e-12));
        }
    }
}

TEST_CASE("game and set units take the first server and the last point winner") {
    auto tl = support::timeline_from({1, 1, 2, 1, 2, 2, 2, 2});
    // two games of four points; p1 serves game 1 and holds, p2 serves game 2 and holds
    const auto g = count_serve_outcomes(tl, TimeUnit::Game);
    CHECK(g.units == 2);
    CHECK(g.serves[0] == 1);
    CHECK(g.wins_on_serve[0] == 1);
    CHECK(g.wins_on_serve[1] == 1);
    const auto s = count_serve_outcomes(tl, TimeUnit::Set);
    CHECK(s.units == 1);
    CHECK(s.serves[0] == 1);
    CHECK(s.wins[1] == 1);
}

TEST_CASE("laplace smoothing") {
    ServeCounts c;
    c.serves = {2, 0};
    c.wins_on_serve = {2, 0};
    c.wins = {2, 0};
    c.units = 2;
    CHECK(stats_from_counts(c, TimeUnit::Point).p_win_given_serve == 1.0);
    CHECK(stats_from_counts(c, TimeUnit::Point, true).p_win_given_serve == doctest::Approx(0.75));
}

TEST_CASE("insufficient data") {
    ServeCounts empty;
    CHECK_THROWS_AS(stats_from_counts(empty, TimeUnit::Point), Error);
    CHECK_THROWS_AS(posterior_via_bayes_rule(empty, -1), Error);
}

TEST_CASE("four ordered levels") {
    CHECK(level_for(1, 1) == Level::One);
    CHECK(level_for(1, 2) == Level::Win);
    CHECK(level_for(2, 1) == Level::Lose);
    CHECK(level_for(2, 2) == Level::Zero);

    ServeWinStats s;
    s.p_win_given_serve = 0.6734;
    s.p_lose_given_serve = 0.3266;
    const auto levels = LabelLevels::from(s);
    for (int i = 1; i < kNumLevels; ++i) CHECK(levels.values[i - 1] < levels.values[i]);

    const auto tl = support::timeline_from({1, 2, 1, 1, 2, 2, 1, 2}, {1, 1, 2, 2, 1, 2, 2, 1});
    const auto ls = label_points(tl, s);
    REQUIRE(ls.size() == tl.size());
    CHECK(ls[0].level == Level::One);
    CHECK(ls[1].level == Level::Lose);
    CHECK(ls[2].level == Level::Win);
    CHECK(ls[2].value == 0.6734);
    CHECK(ls[5].level == Level::Zero);
}

TEST_CASE("time unit names") {
    for (auto u : {TimeUnit::Point, TimeUnit::Game, TimeUnit::Set}) CHECK(parse_time_unit(to_string(u)) == u);
    CHECK_THROWS_AS(parse_time_unit("match"), Error);
}


TEST_CASE("an extra serve win never lowers the estimate") {
    std::mt19937_64 gen(19);
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = support::random_victors(gen, 30);
        auto c = count_serve_outcomes(support::timeline_from(v), TimeUnit::Point);
        const double before = stats_from_counts(c, TimeUnit::Point).p_win_given_serve;
        c.serves[trial % 2] += 1;
        c.wins_on_serve[trial % 2] += 1;
        c.wins[trial % 2] += 1;
        c.units += 1;
        CHECK(stats_from_counts(c, TimeUnit::Point).p_win_given_serve >= before);
    }
}

TEST_CASE("labels partition the points") {
    std::mt19937_64 gen(23);
    const auto tl = support::timeline_from(support::random_victors(gen, 64));
    const std::vector<ingest::MatchTimeline> tls{tl};
    const auto s = estimate_serve_win_posterior(tls, TimeUnit::Point);
    std::array<int, kNumLevels> n{};
    for (const auto& l : label_points(tl, s)) ++n[static_cast<std::size_t>(l.index())];
    CHECK(n[0] + n[1] + n[2] + n[3] == 64);
    nlohmann::json j = s;
    CHECK(j["unit"] == "point");
}

}
