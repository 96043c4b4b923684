#include "matchflow/momentum.hpp"

#include "matchflow/csv.hpp"
#include "matchflow/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace matchflow::momentum {

void MomentumParams::validate() const {
    if (std::abs(w1 + w2 - 1.0) > 1e-12) fail(ErrorKind::Config, "momentum weights w1 + w2 must equal 1");
    if (w1 < 0.0 || w2 < 0.0) fail(ErrorKind::Config, "momentum weights must be non-negative");
    if (k_cap < 0) fail(ErrorKind::Config, "k_cap must be >= 0");
    if (streak_min < 0) fail(ErrorKind::Config, "streak_min must be >= 0");
    if (!std::isfinite(alpha1) || !std::isfinite(beta1)) fail(ErrorKind::Config, "growth factors must be finite");
}

std::vector<int> victors_of(const ingest::MatchTimeline& timeline) {
    std::vector<int> v;
    v.reserve(timeline.size());
    for (const auto& r : timeline.records) v.push_back(r.point_victor);
    return v;
}

namespace {

void check_index(std::span<const int> victors, std::size_t n) {
    if (n >= victors.size()) {
        fail(ErrorKind::Domain, "point index " + std::to_string(n) + " outside a match of " +
                                    std::to_string(victors.size()) + " points");
    }
}

std::vector<int> streaks(std::span<const int> victors) {
    std::vector<int> k(victors.size(), 0);
    for (std::size_t i = 0; i < victors.size(); ++i) {
        k[i] = (i > 0 && victors[i] == victors[i - 1]) ? k[i - 1] + 1 : 1;
    }
    return k;
}

double window_impl(std::span<const int> victors, std::size_t n, int player, int half_width, int streak,
                   const MomentumParams& params) {
    const auto h = static_cast<std::size_t>(half_width);
    std::size_t lo = 0;
    std::size_t hi = 0;
    if (params.causal) {
        lo = n >= 2 * h ? n - 2 * h : 0;
        hi = n;
    } else {
        lo = n >= h ? n - h : 0;
        hi = std::min(victors.size() - 1, n + h);
    }
    double sum = 0.0;
    for (std::size_t s = lo; s <= hi; ++s) sum += victors[s] == player ? 0.5 : -0.5;

    const int k = std::min(streak, params.k_cap);
    double bonus = 0.0;
    if (k >= params.streak_min) {
        const bool holder = victors[n] == player;
        if (half_width == 1) {
            bonus = (holder ? params.alpha1 : params.alpha2()) * std::exp(2.0 * k);
        } else {
            bonus = (holder ? params.beta1 : params.beta2()) * std::exp(static_cast<double>(k));
        }
    }
    return (sum + bonus) / static_cast<double>(hi - lo + 1) + 0.5;
}

} // namespace

double point_result(std::span<const int> victors, std::size_t n, int player) {
    check_index(victors, n);
    return victors[n] == player ? 0.5 : -0.5;
}

int streak_length(std::span<const int> victors, std::size_t n) {
    check_index(victors, n);
    int k = 1;
    while (k <= static_cast<int>(n) && victors[n - static_cast<std::size_t>(k)] == victors[n]) ++k;
    return k;
}

double window_score(std::span<const int> victors, std::size_t n, int player, int half_width,
                    const MomentumParams& params) {
    check_index(victors, n);
    if (half_width != 1 && half_width != 3) fail(ErrorKind::Domain, "half_width must be 1 or 3");
    return window_impl(victors, n, player, half_width, streak_length(victors, n), params);
}

MomentumSeries momentum_series(std::span<const int> victors, const MomentumParams& params) {
    params.validate();
    const std::size_t len = victors.size();
    const std::vector<int> k = streaks(victors);

    MomentumSeries out;
    out.point_no.resize(len);
    out.streak.resize(len);
    out.streak_holder.assign(victors.begin(), victors.end());
    for (PlayerSeries* s : {&out.p1, &out.p2}) {
        s->momentum.resize(len);
        s->short_window.resize(len);
        s->long_window.resize(len);
    }
    for (std::size_t n = 0; n < len; ++n) {
        out.point_no[n] = static_cast<int>(n + 1);
        out.streak[n] = std::min(k[n], params.k_cap);
        for (int player = 1; player <= 2; ++player) {
            PlayerSeries& s = player == 1 ? out.p1 : out.p2;
            const double m = window_impl(victors, n, player, 1, k[n], params);
            const double nn = window_impl(victors, n, player, 3, k[n], params);
            s.short_window[n] = m;
            s.long_window[n] = nn;
            s.momentum[n] = std::clamp(params.w1 * m + params.w2 * nn, 0.0, 1.0);
        }
    }
    return out;
}

MomentumSeries momentum_series(const ingest::MatchTimeline& timeline, const MomentumParams& params) {
    MomentumSeries s = momentum_series(victors_of(timeline), params);
    for (std::size_t i = 0; i < timeline.size(); ++i) s.point_no[i] = timeline.records[i].point_no;
    return s;
}

std::vector<TurningPoint> turning_points(std::span<const double> series, int half_width) {
    std::vector<TurningPoint> out;
    const auto h = static_cast<std::size_t>(std::max(half_width, 1));
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::size_t lo = i >= h ? i - h : 0;
        const std::size_t hi = std::min(series.size() - 1, i + h);
        if (lo == hi) continue;
        bool peak = true;
        bool trough = true;
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            peak = peak && series[i] > series[j];
            trough = trough && series[i] < series[j];
        }
        if (peak || trough) out.push_back({i, peak, series[i]});
    }
    return out;
}

std::string series_csv(const MomentumSeries& s) {
    std::string out = "point_no,p1_momentum,p2_momentum,p1_M,p1_N,p2_M,p2_N,k,streak_holder\n";
    auto d = [](double v) { return csv::format_double(v); };
    for (std::size_t i = 0; i < s.point_no.size(); ++i) {
        out += std::to_string(s.point_no[i]) + "," + d(s.p1.momentum[i]) + "," + d(s.p2.momentum[i]) + "," +
               d(s.p1.short_window[i]) + "," + d(s.p1.long_window[i]) + "," + d(s.p2.short_window[i]) + "," +
               d(s.p2.long_window[i]) + "," + std::to_string(s.streak[i]) + "," + std::to_string(s.streak_holder[i]) +
               "\n";
    }
    return out;
}

void to_json(nlohmann::json& j, const MomentumParams& p) {
    j = nlohmann::json{{"w1", p.w1},         {"w2", p.w2},       {"alpha1", p.alpha1},
                       {"beta1", p.beta1},   {"alpha2", p.alpha2()}, {"beta2", p.beta2()},
                       {"k_cap", p.k_cap},   {"streak_min", p.streak_min}, {"causal", p.causal}};
}

void to_json(nlohmann::json& j, const MomentumSeries& s) {
    j = nlohmann::json{{"point_no", s.point_no},
                       {"p1_momentum", s.p1.momentum},
                       {"p2_momentum", s.p2.momentum},
                       {"p1_M", s.p1.short_window},
                       {"p1_N", s.p1.long_window},
                       {"p2_M", s.p2.short_window},
                       {"p2_N", s.p2.long_window},
                       {"k", s.streak}};
}

} // namespace matchflow::momentum
