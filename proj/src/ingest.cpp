#include "matchflow/ingest.hpp"

#include "matchflow/csv.hpp"
#include "matchflow/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

namespace matchflow::ingest {

namespace {

enum class Policy {
    State,      // carried forward from the previous point
    Score,      // AD/negative -> 50, otherwise mean-imputed
    PlayerId,   // {1,2}
    ServeNo,    // {1,2}, mode-imputed
    Flag,       // {0,1}, mode-imputed
    Cumulative, // recomputed from point_victor when missing or decreasing
    Shot,       // F -> 1, B -> 2, anything else -> 0
    Continuous, // non-negative, mean-imputed
    Integer,    // non-negative integer, rounded mean
    Identity,   // handled by the parser
};

struct FieldInfo {
    std::string_view name;
    Policy policy;
    bool required;
};

constexpr std::array<FieldInfo, kFieldCount> kFields{{
    {"set_no", Policy::State, true},
    {"game_no", Policy::State, true},
    {"point_no", Policy::Identity, true},
    {"p1_sets", Policy::State, true},
    {"p2_sets", Policy::State, true},
    {"p1_games", Policy::State, true},
    {"p2_games", Policy::State, true},
    {"p1_score", Policy::Score, true},
    {"p2_score", Policy::Score, true},
    {"server", Policy::PlayerId, true},
    {"serve_no", Policy::ServeNo, false},
    {"point_victor", Policy::PlayerId, true},
    {"p1_points_won", Policy::Cumulative, true},
    {"p2_points_won", Policy::Cumulative, true},
    {"winner_shot_type", Policy::Shot, false},
    {"p1_ace", Policy::Flag, false},
    {"p2_ace", Policy::Flag, false},
    {"p1_double_fault", Policy::Flag, false},
    {"p2_double_fault", Policy::Flag, false},
    {"p1_unf_err", Policy::Flag, false},
    {"p2_unf_err", Policy::Flag, false},
    {"p1_net_pt", Policy::Flag, false},
    {"p2_net_pt", Policy::Flag, false},
    {"p1_break_pt", Policy::Flag, false},
    {"p2_break_pt", Policy::Flag, false},
    {"p1_break_pt_won", Policy::Flag, false},
    {"p2_break_pt_won", Policy::Flag, false},
    {"p1_break_pt_missed", Policy::Flag, false},
    {"p2_break_pt_missed", Policy::Flag, false},
    {"p1_distance_run", Policy::Continuous, false},
    {"p2_distance_run", Policy::Continuous, false},
    {"rally_count", Policy::Integer, false},
    {"speed_mph", Policy::Continuous, false},
}};

constexpr std::size_t idx(Field f) noexcept { return static_cast<std::size_t>(f); }

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

bool is_integral(double v) noexcept { return std::floor(v) == v; }

std::string header_name(const ColumnMap& columns, std::string_view canonical) {
    auto it = columns.find(std::string(canonical));
    return it == columns.end() ? std::string(canonical) : it->second;
}

using Column = std::vector<std::optional<double>>;

// Interprets one token under its field policy. Invalid tokens become nullopt.
std::optional<double> interpret(Policy policy, std::string_view token, ColumnRepairs& counts) {
    if (policy == Policy::Score && upper(token) == "AD") {
        ++counts.ad_replacements;
        return kAdvantageScore;
    }
    if (policy == Policy::Shot) {
        const std::string t = upper(token);
        if (t == "F") return 1.0;
        if (t == "B") return 2.0;
        if (t.empty()) return 0.0;
        if (auto v = csv::parse_double(t); v && (*v == 0.0 || *v == 1.0 || *v == 2.0)) return *v;
        ++counts.unknown_categories;
        return 0.0;
    }
    if (token.empty()) return std::nullopt;
    auto v = csv::parse_double(token);
    if (!v) {
        ++counts.invalid_tokens;
        return std::nullopt;
    }
    const double x = *v;
    bool ok = true;
    switch (policy) {
    case Policy::Score:
        if (x < 0.0) {
            ++counts.ad_replacements;
            return kAdvantageScore;
        }
        break;
    case Policy::PlayerId:
    case Policy::ServeNo: ok = (x == 1.0 || x == 2.0); break;
    case Policy::Flag: ok = (x == 0.0 || x == 1.0); break;
    case Policy::State:
    case Policy::Cumulative:
    case Policy::Integer: ok = x >= 0.0 && is_integral(x); break;
    case Policy::Continuous: ok = x >= 0.0; break;
    case Policy::Shot:
    case Policy::Identity: break;
    }
    if (!ok) {
        ++counts.invalid_tokens;
        return std::nullopt;
    }
    return x;
}

std::optional<double> column_mean(const Column& col) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& v : col) {
        if (v) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::optional<double> column_mode(const Column& col) {
    std::map<double, std::size_t> freq;
    for (const auto& v : col) {
        if (v) ++freq[*v];
    }
    if (freq.empty()) return std::nullopt;
    // ties resolve to the smallest value: std::map iterates ascending
    auto best = freq.begin();
    for (auto it = freq.begin(); it != freq.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

[[noreturn]] void imputation_impossible(const std::string& match_id, std::string_view column) {
    fail(ErrorKind::ImputationImpossible,
         "column '" + std::string(column) + "' has no usable value in match '" + match_id + "'");
}

} // namespace

std::string_view canonical_name(Field f) noexcept { return kFields[idx(f)].name; }

bool is_required(Field f) noexcept { return kFields[idx(f)].required; }

ColumnRepairs& ColumnRepairs::operator+=(const ColumnRepairs& o) noexcept {
    ad_replacements += o.ad_replacements;
    mean_imputed += o.mean_imputed;
    mode_imputed += o.mode_imputed;
    carried_forward += o.carried_forward;
    recomputed += o.recomputed;
    inferred += o.inferred;
    invalid_tokens += o.invalid_tokens;
    unknown_categories += o.unknown_categories;
    return *this;
}

ColumnRepairs CleaningReport::totals() const {
    ColumnRepairs sum;
    for (const auto& [name, c] : columns) sum += c;
    return sum;
}

ParseResult parse_match_csv(std::string_view text, const ColumnMap& columns) {
    const auto rows = csv::read(text);
    if (rows.empty()) fail(ErrorKind::EmptyInput, "input is empty");

    std::unordered_map<std::string, std::size_t> header;
    for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
        header.emplace(std::string(csv::trim(rows[0].fields[i])), i);
    }
    auto locate = [&](std::string_view canonical) -> std::optional<std::size_t> {
        auto it = header.find(header_name(columns, canonical));
        if (it == header.end()) return std::nullopt;
        return it->second;
    };

    const auto match_col = locate("match_id");
    if (!match_col) fail(ErrorKind::Schema, "missing required column 'match_id'");
    std::array<std::optional<std::size_t>, kFieldCount> where;
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        where[f] = locate(kFields[f].name);
        if (!where[f] && kFields[f].required) {
            fail(ErrorKind::Schema, "missing required column '" + std::string(kFields[f].name) + "'");
        }
    }
    const auto p1_col = locate("player1");
    const auto p2_col = locate("player2");

    if (rows.size() == 1) fail(ErrorKind::EmptyInput, "input has a header but no data rows");

    ParseResult result;
    std::map<std::string, RawTimeline> by_match;
    const std::size_t width = rows[0].fields.size();

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != width) {
            result.rejected.push_back({row.line, "",
                                       "expected " + std::to_string(width) + " fields, found " +
                                           std::to_string(row.fields.size())});
            continue;
        }
        const std::string match_id(csv::trim(row.fields[*match_col]));
        if (match_id.empty()) {
            result.rejected.push_back({row.line, "", "missing match_id"});
            continue;
        }
        const auto point_no = csv::parse_double(row.fields[*where[idx(Field::PointNo)]]);
        if (!point_no || *point_no < 1.0 || !is_integral(*point_no)) {
            result.rejected.push_back({row.line, match_id, "point_no is not a positive integer"});
            continue;
        }

        auto [it, inserted] = by_match.try_emplace(match_id);
        RawTimeline& tl = it->second;
        if (inserted) {
            tl.match_id = match_id;
            if (p1_col) tl.player1 = std::string(csv::trim(row.fields[*p1_col]));
            if (p2_col) tl.player2 = std::string(csv::trim(row.fields[*p2_col]));
            for (std::size_t f = 0; f < kFieldCount; ++f) tl.present[f] = where[f].has_value();
        }
        RawPoint p;
        p.line = row.line;
        p.point_no = static_cast<int>(*point_no);
        for (std::size_t f = 0; f < kFieldCount; ++f) {
            if (where[f]) p.tokens[f] = std::string(csv::trim(row.fields[*where[f]]));
        }
        tl.points.push_back(std::move(p));
    }

    for (auto& [id, tl] : by_match) {
        std::stable_sort(tl.points.begin(), tl.points.end(),
                         [](const RawPoint& a, const RawPoint& b) { return a.point_no < b.point_no; });
        std::vector<RawPoint> unique;
        unique.reserve(tl.points.size());
        for (auto& p : tl.points) {
            if (!unique.empty() && unique.back().point_no == p.point_no) {
                result.rejected.push_back({p.line, id, "duplicate point_no " + std::to_string(p.point_no)});
                continue;
            }
            unique.push_back(std::move(p));
        }
        tl.points = std::move(unique);
        result.matches.push_back(std::move(tl));
    }
    std::sort(result.rejected.begin(), result.rejected.end(),
              [](const RowIssue& a, const RowIssue& b) { return a.line < b.line; });
    return result;
}

CleanResult clean(const RawTimeline& raw) {
    CleanResult out;
    CleaningReport& report = out.report;
    report.match_id = raw.match_id;
    report.rows_in = raw.points.size();

    std::array<ColumnRepairs, kFieldCount> counts{};
    std::array<Column, kFieldCount> cols;
    const std::size_t n_raw = raw.points.size();

    for (std::size_t f = 0; f < kFieldCount; ++f) {
        const Policy policy = kFields[f].policy;
        if (policy == Policy::Identity) continue;
        cols[f].resize(n_raw);
        if (!raw.present[f]) {
            report.absent_columns.emplace_back(kFields[f].name);
            const double fill = policy == Policy::ServeNo ? 1.0 : 0.0;
            std::fill(cols[f].begin(), cols[f].end(), fill);
            continue;
        }
        for (std::size_t i = 0; i < n_raw; ++i) {
            cols[f][i] = interpret(policy, raw.points[i].tokens[f], counts[f]);
        }
    }

    // Identity repairs decide which rows survive, so they run before any imputation.
    auto& victor = cols[idx(Field::PointVictor)];
    auto& server = cols[idx(Field::Server)];
    const auto& won1 = cols[idx(Field::P1PointsWon)];
    const auto& won2 = cols[idx(Field::P2PointsWon)];
    const auto& set_no = cols[idx(Field::SetNo)];
    const auto& game_no = cols[idx(Field::GameNo)];

    std::vector<bool> keep(n_raw, true);
    for (std::size_t i = 0; i < n_raw; ++i) {
        if (victor[i]) continue;
        const std::optional<double> prev1 = i == 0 ? std::optional<double>(0.0) : won1[i - 1];
        const std::optional<double> prev2 = i == 0 ? std::optional<double>(0.0) : won2[i - 1];
        if (won1[i] && won2[i] && prev1 && prev2) {
            const double d1 = *won1[i] - *prev1;
            const double d2 = *won2[i] - *prev2;
            if (d1 == 1.0 && d2 == 0.0) victor[i] = 1.0;
            if (d1 == 0.0 && d2 == 1.0) victor[i] = 2.0;
        }
        if (victor[i]) {
            ++counts[idx(Field::PointVictor)].inferred;
        } else {
            keep[i] = false;
            report.rejected.push_back({raw.points[i].line, raw.match_id, "point_victor unrecoverable"});
        }
    }
    for (std::size_t i = 0; i < n_raw; ++i) {
        if (!keep[i] || server[i]) continue;
        std::map<double, std::size_t> freq;
        for (std::size_t j = 0; j < n_raw; ++j) {
            if (j != i && server[j] && set_no[i] && game_no[i] && set_no[j] == set_no[i] &&
                game_no[j] == game_no[i]) {
                ++freq[*server[j]];
            }
        }
        if (freq.empty()) {
            keep[i] = false;
            report.rejected.push_back({raw.points[i].line, raw.match_id, "server unrecoverable"});
            continue;
        }
        auto best = std::max_element(freq.begin(), freq.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
        server[i] = best->first;
        ++counts[idx(Field::Server)].mode_imputed;
    }

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n_raw; ++i) {
        if (keep[i]) kept.push_back(i);
    }
    for (auto& col : cols) {
        if (col.empty()) continue;
        Column filtered;
        filtered.reserve(kept.size());
        for (std::size_t i : kept) filtered.push_back(col[i]);
        col = std::move(filtered);
    }
    const std::size_t n = kept.size();

    for (std::size_t f = 0; f < kFieldCount; ++f) {
        Column& col = cols[f];
        const Policy policy = kFields[f].policy;
        const bool any_missing = std::any_of(col.begin(), col.end(), [](const auto& v) { return !v; });
        if (!any_missing || policy == Policy::Cumulative) continue;
        ColumnRepairs& c = counts[f];
        switch (policy) {
        case Policy::State: {
            auto first = std::find_if(col.begin(), col.end(), [](const auto& v) { return v.has_value(); });
            if (first == col.end()) imputation_impossible(raw.match_id, kFields[f].name);
            std::optional<double> last = *first;
            for (auto& v : col) {
                if (v) {
                    last = v;
                } else {
                    v = last;
                    ++c.carried_forward;
                }
            }
            break;
        }
        case Policy::Score:
        case Policy::Continuous:
        case Policy::Integer: {
            auto mean = column_mean(col);
            if (!mean) imputation_impossible(raw.match_id, kFields[f].name);
            const double fill = policy == Policy::Integer ? std::round(*mean) : *mean;
            for (auto& v : col) {
                if (!v) {
                    v = fill;
                    ++c.mean_imputed;
                }
            }
            break;
        }
        case Policy::ServeNo:
        case Policy::Flag: {
            auto mode = column_mode(col);
            if (!mode) imputation_impossible(raw.match_id, kFields[f].name);
            for (auto& v : col) {
                if (!v) {
                    v = *mode;
                    ++c.mode_imputed;
                }
            }
            break;
        }
        default: break;
        }
    }

    // Cumulative counters must be non-decreasing and consistent with point_victor.
    for (int player = 1; player <= 2; ++player) {
        const Field f = player == 1 ? Field::P1PointsWon : Field::P2PointsWon;
        Column& col = cols[idx(f)];
        double prev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double won = *cols[idx(Field::PointVictor)][i] == player ? 1.0 : 0.0;
            if (!col[i] || *col[i] < prev) {
                col[i] = (i == 0 ? 0.0 : prev) + won;
                ++counts[idx(f)].recomputed;
            }
            prev = *col[i];
        }
    }

    MatchTimeline& tl = out.timeline;
    tl.match_id = raw.match_id;
    tl.player1 = raw.player1;
    tl.player2 = raw.player2;
    tl.records.reserve(n);
    auto get = [&](Field f, std::size_t i) { return *cols[idx(f)][i]; };
    auto geti = [&](Field f, std::size_t i) { return static_cast<int>(get(f, i)); };
    for (std::size_t k = 0; k < n; ++k) {
        PointRecord r;
        r.match_id = raw.match_id;
        r.point_no = raw.points[kept[k]].point_no;
        r.set_no = geti(Field::SetNo, k);
        r.game_no = geti(Field::GameNo, k);
        r.p1_sets = geti(Field::P1Sets, k);
        r.p2_sets = geti(Field::P2Sets, k);
        r.p1_games = geti(Field::P1Games, k);
        r.p2_games = geti(Field::P2Games, k);
        r.p1_score = get(Field::P1Score, k);
        r.p2_score = get(Field::P2Score, k);
        r.server = geti(Field::Server, k);
        r.serve_no = geti(Field::ServeNo, k);
        r.point_victor = geti(Field::PointVictor, k);
        r.p1_points_won = geti(Field::P1PointsWon, k);
        r.p2_points_won = geti(Field::P2PointsWon, k);
        r.shot_type_code = geti(Field::ShotType, k);
        r.p1 = {geti(Field::P1Ace, k),         geti(Field::P1DoubleFault, k), geti(Field::P1UnforcedError, k),
                geti(Field::P1NetPoint, k),    geti(Field::P1BreakPoint, k),  geti(Field::P1BreakPointWon, k),
                geti(Field::P1BreakPointMissed, k)};
        r.p2 = {geti(Field::P2Ace, k),         geti(Field::P2DoubleFault, k), geti(Field::P2UnforcedError, k),
                geti(Field::P2NetPoint, k),    geti(Field::P2BreakPoint, k),  geti(Field::P2BreakPointWon, k),
                geti(Field::P2BreakPointMissed, k)};
        r.p1_distance_run = get(Field::P1DistanceRun, k);
        r.p2_distance_run = get(Field::P2DistanceRun, k);
        r.rally_count = geti(Field::RallyCount, k);
        r.speed_mph = get(Field::SpeedMph, k);
        tl.records.push_back(std::move(r));
    }

    report.rows_out = n;
    for (std::size_t f = 0; f < kFieldCount; ++f) {
        const auto& c = counts[f];
        if (c.total() + c.invalid_tokens + c.unknown_categories > 0) {
            report.columns.emplace(std::string(kFields[f].name), c);
        }
    }
    return out;
}

std::string write_cleaned_csv(const std::vector<MatchTimeline>& timelines) {
    std::string out;
    std::vector<std::string> fields{"match_id", "player1", "player2"};
    for (const auto& info : kFields) fields.emplace_back(info.name);
    csv::append_row(out, fields);

    auto i = [](int v) { return std::to_string(v); };
    auto d = [](double v) { return csv::format_double(v); };
    for (const auto& tl : timelines) {
        for (const auto& r : tl.records) {
            fields = {r.match_id,
                      tl.player1,
                      tl.player2,
                      i(r.set_no),
                      i(r.game_no),
                      i(r.point_no),
                      i(r.p1_sets),
                      i(r.p2_sets),
                      i(r.p1_games),
                      i(r.p2_games),
                      d(r.p1_score),
                      d(r.p2_score),
                      i(r.server),
                      i(r.serve_no),
                      i(r.point_victor),
                      i(r.p1_points_won),
                      i(r.p2_points_won),
                      i(r.shot_type_code),
                      i(r.p1.ace),
                      i(r.p2.ace),
                      i(r.p1.double_fault),
                      i(r.p2.double_fault),
                      i(r.p1.unforced_error),
                      i(r.p2.unforced_error),
                      i(r.p1.net_point),
                      i(r.p2.net_point),
                      i(r.p1.break_point),
                      i(r.p2.break_point),
                      i(r.p1.break_point_won),
                      i(r.p2.break_point_won),
                      i(r.p1.break_point_missed),
                      i(r.p2.break_point_missed),
                      d(r.p1_distance_run),
                      d(r.p2_distance_run),
                      i(r.rally_count),
                      d(r.speed_mph)};
            csv::append_row(out, fields);
        }
    }
    return out;
}

const std::vector<std::string>& FeatureTable::names() {
    static const std::vector<std::string> kNames{
        "score_diff",          "game_diff",         "set_diff",        "streak_len_p1",
        "streak_len_p2",       "unforced_error_ratio_p1", "unforced_error_ratio_p2",
        "distance_run_diff",   "serve_indicator",   "psychological_factor"};
    return kNames;
}

std::vector<double> FeatureTable::as_vector(const PointFeatures& r) {
    return {r.score_diff,
            r.game_diff,
            r.set_diff,
            r.streak_len_p1,
            r.streak_len_p2,
            r.unforced_error_ratio_p1,
            r.unforced_error_ratio_p2,
            r.distance_run_diff,
            r.serve_indicator,
            r.psychological_factor};
}

std::optional<std::size_t> FeatureTable::index_of(std::string_view name) {
    const auto& all = names();
    auto it = std::find(all.begin(), all.end(), name);
    if (it == all.end()) return std::nullopt;
    return static_cast<std::size_t>(it - all.begin());
}

double psychological_factor(int break_points_won, int double_faults, int opponent_streak) noexcept {
    const double x = static_cast<double>(break_points_won - double_faults - opponent_streak);
    const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    return std::clamp(s, 0.0, 1.0);
}

FeatureTable derive_features(const MatchTimeline& timeline) {
    FeatureTable table;
    table.match_id = timeline.match_id;
    table.rows.reserve(timeline.size());

    int streak1 = 0;
    int streak2 = 0;
    int errors1 = 0;
    int errors2 = 0;
    int break_won1 = 0;
    int double_faults1 = 0;
    for (std::size_t i = 0; i < timeline.records.size(); ++i) {
        const PointRecord& r = timeline.records[i];
        if (r.point_victor == 1) {
            ++streak1;
            streak2 = 0;
        } else {
            ++streak2;
            streak1 = 0;
        }
        errors1 += r.p1.unforced_error;
        errors2 += r.p2.unforced_error;
        break_won1 += r.p1.break_point_won;
        double_faults1 += r.p1.double_fault;
        const double played = static_cast<double>(i + 1);

        PointFeatures f;
        f.score_diff = static_cast<double>(r.p1_points_won - r.p2_points_won);
        f.game_diff = static_cast<double>(r.p1_games - r.p2_games);
        f.set_diff = static_cast<double>(r.p1_sets - r.p2_sets);
        f.streak_len_p1 = streak1;
        f.streak_len_p2 = streak2;
        f.unforced_error_ratio_p1 = errors1 / played;
        f.unforced_error_ratio_p2 = errors2 / played;
        f.distance_run_diff = r.p1_distance_run - r.p2_distance_run;
        f.serve_indicator = r.server == 1 ? 1.0 : 0.0;
        f.psychological_factor = psychological_factor(break_won1, double_faults1, streak2);
        table.rows.push_back(f);
    }
    return table;
}

} // namespace matchflow::ingest
