#pragma once

// Point-by-point match ingestion: CSV parsing, cleaning and feature derivation.
//
// The canonical column names are those of the public Wimbledon point-by-point
// files (match_id, set_no, p1_score, winner_shot_type, p1_unf_err, ...).
// Files with different headers are read through a ColumnMap.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace matchflow::ingest {

enum class Field : std::size_t {
    SetNo,
    GameNo,
    PointNo,
    P1Sets,
    P2Sets,
    P1Games,
    P2Games,
    P1Score,
    P2Score,
    Server,
    ServeNo,
    PointVictor,
    P1PointsWon,
    P2PointsWon,
    ShotType,
    P1Ace,
    P2Ace,
    P1DoubleFault,
    P2DoubleFault,
    P1UnforcedError,
    P2UnforcedError,
    P1NetPoint,
    P2NetPoint,
    P1BreakPoint,
    P2BreakPoint,
    P1BreakPointWon,
    P2BreakPointWon,
    P1BreakPointMissed,
    P2BreakPointMissed,
    P1DistanceRun,
    P2DistanceRun,
    RallyCount,
    SpeedMph,
    Count
};

inline constexpr std::size_t kFieldCount = static_cast<std::size_t>(Field::Count);

std::string_view canonical_name(Field f) noexcept;
bool is_required(Field f) noexcept;

// Canonical name -> header name in the input file. Unlisted names map to themselves.
using ColumnMap = std::map<std::string, std::string>;

struct RawPoint {
    std::size_t line = 0;
    int point_no = 0;
    std::array<std::string, kFieldCount> tokens; // empty when the column is absent
};

struct RawTimeline {
    std::string match_id;
    std::string player1;
    std::string player2;
    std::vector<RawPoint> points; // strictly increasing point_no
    std::array<bool, kFieldCount> present{}; // column present in the header
};

struct RowIssue {
    std::size_t line = 0;
    std::string match_id;
    std::string reason;
};

struct ParseResult {
    std::vector<RawTimeline> matches; // sorted by match_id
    std::vector<RowIssue> rejected;
};

// Throws Error(EmptyInput) on a file with no data rows and Error(Schema) naming
// the first missing required column.
ParseResult parse_match_csv(std::string_view text, const ColumnMap& columns = {});

struct PlayerFlags {
    int ace = 0;
    int double_fault = 0;
    int unforced_error = 0;
    int net_point = 0;
    int break_point = 0;
    int break_point_won = 0;
    int break_point_missed = 0;

    bool operator==(const PlayerFlags&) const = default;
};

struct PointRecord {
    std::string match_id;
    int set_no = 1;
    int game_no = 1;
    int point_no = 1;
    int server = 1;
    int point_victor = 1;
    double p1_score = 0.0;
    double p2_score = 0.0;
    int p1_games = 0;
    int p2_games = 0;
    int p1_sets = 0;
    int p2_sets = 0;
    int p1_points_won = 0;
    int p2_points_won = 0;
    int serve_no = 1;
    int shot_type_code = 0; // 1 forehand, 2 backhand, 0 unknown
    double p1_distance_run = 0.0;
    double p2_distance_run = 0.0;
    int rally_count = 0;
    double speed_mph = 0.0;
    PlayerFlags p1;
    PlayerFlags p2;

    bool operator==(const PointRecord&) const = default;
};

inline constexpr double kAdvantageScore = 50.0;

struct MatchTimeline {
    std::string match_id;
    std::string player1;
    std::string player2;
    std::vector<PointRecord> records;

    std::size_t size() const noexcept { return records.size(); }
};

struct ColumnRepairs {
    int ad_replacements = 0;
    int mean_imputed = 0;
    int mode_imputed = 0;
    int carried_forward = 0;
    int recomputed = 0;
    int inferred = 0;
    int invalid_tokens = 0;
    int unknown_categories = 0;

    int total() const noexcept {
        return ad_replacements + mean_imputed + mode_imputed + carried_forward + recomputed + inferred;
    }
    ColumnRepairs& operator+=(const ColumnRepairs& o) noexcept;
};

struct CleaningReport {
    std::string match_id;
    std::size_t rows_in = 0;
    std::size_t rows_out = 0;
    std::map<std::string, ColumnRepairs> columns; // only columns with at least one event
    std::vector<RowIssue> rejected;
    std::vector<std::string> absent_columns;

    ColumnRepairs totals() const;
};

struct CleanResult {
    MatchTimeline timeline;
    CleaningReport report;
};

// Throws Error(ImputationImpossible) when a column has no usable value in the match.
CleanResult clean(const RawTimeline& raw);

std::string write_cleaned_csv(const std::vector<MatchTimeline>& timelines);

struct PointFeatures {
    double score_diff = 0.0;       // cumulative points won, p1 - p2
    double game_diff = 0.0;
    double set_diff = 0.0;
    double streak_len_p1 = 0.0;    // consecutive points won ending at this point
    double streak_len_p2 = 0.0;
    double unforced_error_ratio_p1 = 0.0; // errors so far / points played so far
    double unforced_error_ratio_p2 = 0.0;
    double distance_run_diff = 0.0;
    double serve_indicator = 0.0;  // 1 when player 1 serves
    double psychological_factor = 0.5;

    bool operator==(const PointFeatures&) const = default;
};

struct FeatureTable {
    std::string match_id;
    std::vector<PointFeatures> rows;

    static const std::vector<std::string>& names();
    static std::vector<double> as_vector(const PointFeatures& row);
    static std::optional<std::size_t> index_of(std::string_view name);
};

// Player-1 pressure composite in [0,1]: logistic of
// (break points won so far - double faults so far - opponent's current streak).
double psychological_factor(int break_points_won, int double_faults, int opponent_streak) noexcept;

FeatureTable derive_features(const MatchTimeline& timeline);

} // namespace matchflow::ingest
