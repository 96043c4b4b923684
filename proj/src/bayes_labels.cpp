#include "matchflow/bayes_labels.hpp"

#include "matchflow/error.hpp"

#include <nlohmann/json.hpp>

namespace matchflow::labels {

namespace {

struct UnitOutcome {
    int server = 0;
    int victor = 0;
};

// A game or set is won by whoever wins its final point; its server is the
// server of its first point.
std::vector<UnitOutcome> unit_outcomes(const ingest::MatchTimeline& timeline, TimeUnit unit) {
    std::vector<UnitOutcome> out;
    const auto& recs = timeline.records;
    if (unit == TimeUnit::Point) {
        out.reserve(recs.size());
        for (const auto& r : recs) out.push_back({r.server, r.point_victor});
        return out;
    }
    auto same_unit = [unit](const ingest::PointRecord& a, const ingest::PointRecord& b) {
        return unit == TimeUnit::Set ? a.set_no == b.set_no : (a.set_no == b.set_no && a.game_no == b.game_no);
    };
    std::size_t start = 0;
    for (std::size_t i = 1; i <= recs.size(); ++i) {
        if (i == recs.size() || !same_unit(recs[i], recs[start])) {
            out.push_back({recs[start].server, recs[i - 1].point_victor});
            start = i;
        }
    }
    return out;
}

} // namespace

std::string_view to_string(TimeUnit unit) noexcept {
    switch (unit) {
    case TimeUnit::Point: return "point";
    case TimeUnit::Game: return "game";
    case TimeUnit::Set: return "set";
    }
    return "point";
}

TimeUnit parse_time_unit(std::string_view name) {
    if (name == "point") return TimeUnit::Point;
    if (name == "game") return TimeUnit::Game;
    if (name == "set") return TimeUnit::Set;
    fail(ErrorKind::UnknownName, "unknown time unit '" + std::string(name) + "' (expected point, game or set)");
}

ServeCounts& ServeCounts::operator+=(const ServeCounts& o) noexcept {
    for (int p = 0; p < 2; ++p) {
        serves[p] += o.serves[p];
        wins_on_serve[p] += o.wins_on_serve[p];
        wins[p] += o.wins[p];
    }
    units += o.units;
    return *this;
}

ServeCounts count_serve_outcomes(const ingest::MatchTimeline& timeline, TimeUnit unit) {
    ServeCounts c;
    for (const auto& u : unit_outcomes(timeline, unit)) {
        if (u.server < 1 || u.server > 2 || u.victor < 1 || u.victor > 2) continue;
        ++c.units;
        ++c.serves[u.server - 1];
        ++c.wins[u.victor - 1];
        if (u.server == u.victor) ++c.wins_on_serve[u.server - 1];
    }
    return c;
}

ServeWinStats stats_from_counts(const ServeCounts& counts, TimeUnit unit, bool laplace) {
    const long serves = counts.serves[0] + counts.serves[1];
    if (serves == 0) fail(ErrorKind::InsufficientData, "no served units observed");

    const double add = laplace ? 1.0 : 0.0;
    auto ratio = [add](long num, long den) {
        return den + 2.0 * add > 0.0 ? (static_cast<double>(num) + add) / (static_cast<double>(den) + 2.0 * add)
                                     : 0.0;
    };

    ServeWinStats s;
    s.unit = unit;
    s.counts = counts;
    s.laplace = laplace;
    s.p_win_given_serve = ratio(counts.wins_on_serve[0] + counts.wins_on_serve[1], serves);
    s.p_lose_given_serve = 1.0 - s.p_win_given_serve;
    for (int p = 0; p < 2; ++p) s.player_p_win_given_serve[p] = ratio(counts.wins_on_serve[p], counts.serves[p]);
    return s;
}

ServeWinStats estimate_serve_win_posterior(std::span<const ingest::MatchTimeline> timelines, TimeUnit unit,
                                           bool laplace) {
    ServeCounts total;
    for (const auto& tl : timelines) total += count_serve_outcomes(tl, unit);
    return stats_from_counts(total, unit, laplace);
}

double posterior_via_bayes_rule(const ServeCounts& c, int player) {
    // Each unit yields one observation per player; B = "served", W = "won".
    double obs = 0.0;
    double served = 0.0;
    double won = 0.0;
    double won_and_served = 0.0;
    if (player < 0) {
        obs = 2.0 * static_cast<double>(c.units);
        served = static_cast<double>(c.serves[0] + c.serves[1]);
        won = static_cast<double>(c.wins[0] + c.wins[1]);
        won_and_served = static_cast<double>(c.wins_on_serve[0] + c.wins_on_serve[1]);
    } else {
        obs = static_cast<double>(c.units);
        served = static_cast<double>(c.serves[player]);
        won = static_cast<double>(c.wins[player]);
        won_and_served = static_cast<double>(c.wins_on_serve[player]);
    }
    if (served == 0.0 || won == 0.0 || obs == 0.0) {
        fail(ErrorKind::InsufficientData, "posterior undefined: no serves or no wins observed");
    }
    const double p_b_given_w = won_and_served / won;
    const double p_w = won / obs;
    const double p_b = served / obs;
    return p_b_given_w * p_w / p_b;
}

LabelLevels LabelLevels::from(const ServeWinStats& stats) noexcept {
    LabelLevels l;
    l.values = {0.0, stats.p_lose_given_serve, stats.p_win_given_serve, 1.0};
    return l;
}

ClassLabel LabelLevels::label(Level level) const noexcept {
    return {level, values[static_cast<std::size_t>(level)]};
}

Level level_for(int point_victor, int server) noexcept {
    if (point_victor == 1) return server == 1 ? Level::One : Level::Win;
    return server == 1 ? Level::Lose : Level::Zero;
}

std::vector<ClassLabel> label_points(const ingest::MatchTimeline& timeline, const ServeWinStats& stats) {
    const LabelLevels levels = LabelLevels::from(stats);
    std::vector<ClassLabel> out;
    out.reserve(timeline.size());
    for (const auto& r : timeline.records) out.push_back(levels.label(level_for(r.point_victor, r.server)));
    return out;
}

void to_json(nlohmann::json& j, const ServeWinStats& s) {
    j = nlohmann::json{
        {"unit", to_string(s.unit)},
        {"p_win_given_serve", s.p_win_given_serve},
        {"p_lose_given_serve", s.p_lose_given_serve},
        {"laplace", s.laplace},
        {"per_player",
         {{"player1", s.player_p_win_given_serve[0]}, {"player2", s.player_p_win_given_serve[1]}}},
        {"counts",
         {{"units", s.counts.units},
          {"serves", s.counts.serves},
          {"wins_on_serve", s.counts.wins_on_serve},
          {"wins", s.counts.wins}}},
    };
}

} // namespace matchflow::labels
