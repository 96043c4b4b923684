#pragma once

// Serve-conditioned win probabilities by event counting, and the four-level
// point labels derived from them.

#include "matchflow/ingest.hpp"

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace matchflow::labels {

enum class TimeUnit { Point, Game, Set };

std::string_view to_string(TimeUnit unit) noexcept;
TimeUnit parse_time_unit(std::string_view name);

struct ServeCounts {
    std::array<long, 2> serves{};        // units served, per player
    std::array<long, 2> wins_on_serve{}; // units won while serving, per player
    std::array<long, 2> wins{};          // units won, per player
    long units = 0;

    ServeCounts& operator+=(const ServeCounts& o) noexcept;
};

struct ServeWinStats {
    TimeUnit unit = TimeUnit::Point;
    double p_win_given_serve = 0.0;
    double p_lose_given_serve = 0.0;
    std::array<double, 2> player_p_win_given_serve{};
    ServeCounts counts;
    bool laplace = false;
};

ServeCounts count_serve_outcomes(const ingest::MatchTimeline& timeline, TimeUnit unit);

// Pooled wins-while-serving / serves over both players. Throws
// Error(InsufficientData) when no serves are observed.
ServeWinStats estimate_serve_win_posterior(std::span<const ingest::MatchTimeline> timelines, TimeUnit unit,
                                           bool laplace = false);

ServeWinStats stats_from_counts(const ServeCounts& counts, TimeUnit unit, bool laplace = false);

// P(W|B) = P(B|W) P(W) / P(B) over per-player unit observations, computed from
// the marginals rather than the direct ratio. `player` is 0, 1, or -1 for pooled.
double posterior_via_bayes_rule(const ServeCounts& counts, int player);

enum class Level : int { Zero = 0, Lose = 1, Win = 2, One = 3 };

inline constexpr int kNumLevels = 4;

struct ClassLabel {
    Level level = Level::Zero;
    double value = 0.0;

    int index() const noexcept { return static_cast<int>(level); }
    bool operator==(const ClassLabel&) const = default;
};

struct LabelLevels {
    std::array<double, kNumLevels> values{0.0, 0.0, 0.0, 1.0};

    static LabelLevels from(const ServeWinStats& stats) noexcept;
    ClassLabel label(Level level) const noexcept;
};

// (p1 wins, p1 serves) -> One; (p1 wins, p2 serves) -> Win;
// (p2 wins, p1 serves) -> Lose; (p2 wins, p2 serves) -> Zero.
Level level_for(int point_victor, int server) noexcept;

std::vector<ClassLabel> label_points(const ingest::MatchTimeline& timeline, const ServeWinStats& stats);

void to_json(nlohmann::json& j, const ServeWinStats& stats);

} // namespace matchflow::labels
