#pragma once

// Per-point momentum: a weighted blend of a 3-point and a 7-point centred
// window of point results, each boosted exponentially by the current scoring
// streak, clamped to [0,1].
//
// Indices are 0-based throughout. Players are 1 and 2.

#include "matchflow/ingest.hpp"

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace matchflow::momentum {

struct MomentumParams {
    double w1 = 0.7;       // 3-point window weight
    double w2 = 0.3;       // 7-point window weight
    double alpha1 = 0.0012; // streak growth factor, 3-point window
    double beta1 = 0.0025;  // streak growth factor, 7-point window
    int k_cap = 7;
    int streak_min = 2;     // streaks shorter than this earn no bonus
    bool causal = false;    // past-only windows instead of centred ones

    double alpha2() const noexcept { return -alpha1; }
    double beta2() const noexcept { return -beta1; }
    void validate() const; // throws Error(Config)
};

std::vector<int> victors_of(const ingest::MatchTimeline& timeline);

// +0.5 when `player` won point n, -0.5 otherwise.
double point_result(std::span<const int> victors, std::size_t n, int player);

// Length of the run of consecutive points ending at n won by the winner of n.
int streak_length(std::span<const int> victors, std::size_t n);

// M(n) for half_width 1, N(n) for half_width 3. Windows truncate at the match
// edges and divide by the number of points actually inside.
double window_score(std::span<const int> victors, std::size_t n, int player, int half_width,
                    const MomentumParams& params);

struct PlayerSeries {
    std::vector<double> momentum;
    std::vector<double> short_window; // M
    std::vector<double> long_window;  // N
};

struct MomentumSeries {
    std::vector<int> point_no;
    PlayerSeries p1;
    PlayerSeries p2;
    std::vector<int> streak;        // capped streak length k(n)
    std::vector<int> streak_holder; // winner of point n
};

MomentumSeries momentum_series(std::span<const int> victors, const MomentumParams& params);
MomentumSeries momentum_series(const ingest::MatchTimeline& timeline, const MomentumParams& params);

struct TurningPoint {
    std::size_t index = 0;
    bool peak = true;
    double value = 0.0;
};

// Strict extrema of their +-half_width neighbourhood; plateaus are not reported.
std::vector<TurningPoint> turning_points(std::span<const double> series, int half_width = 3);

std::string series_csv(const MomentumSeries& series);
void to_json(nlohmann::json& j, const MomentumParams& params);
void to_json(nlohmann::json& j, const MomentumSeries& series);

} // namespace matchflow::momentum
