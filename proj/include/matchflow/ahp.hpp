#pragma once

// Analytic hierarchy process: reciprocal judgment matrices, priority weights,
// consistency ratio, and weighted round scoring.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace matchflow::ahp {

struct Judgment {
    int i = 0; // 0-based row
    int j = 0; // 0-based column
    double value = 1.0; // on the 1/9 .. 9 scale
};

class JudgmentMatrix {
public:
    // Validates positivity, unit diagonal and reciprocity (1e-9).
    explicit JudgmentMatrix(Eigen::MatrixXd entries);

    int order() const noexcept { return static_cast<int>(a_.rows()); }
    double operator()(int i, int j) const { return a_(i, j); }
    const Eigen::MatrixXd& entries() const noexcept { return a_; }

private:
    Eigen::MatrixXd a_;
};

// Unspecified pairs default to 1. Throws Error(Domain) for values outside
// [1/9, 9] or diagonal entries, Error(Conflict) for a pair given twice.
JudgmentMatrix build_judgment_matrix(int n, std::span<const Judgment> judgments);

// Reads a square, header-free CSV of positive reals.
JudgmentMatrix judgment_matrix_from_csv(std::string_view text);

// a_ij = w_i / w_j.
JudgmentMatrix consistent_matrix(std::span<const double> weights);

enum class WeightMethod { RowSum, GeometricMean };

WeightMethod parse_weight_method(std::string_view name);

// RowSum: (row sum + n/2 - 1) / (n(n-1)), renormalised to sum 1.
// GeometricMean: normalised row geometric means.
std::vector<double> weights(const JudgmentMatrix& matrix, WeightMethod method = WeightMethod::GeometricMean);

// Saaty random index for n = 1..9.
std::optional<double> random_index(int n) noexcept;

struct AhpResult {
    std::vector<double> weights;
    double lambda_max = 0.0;
    double ci = 0.0;
    double cr = 0.0;
    bool consistent = true;
};

// lambda_max = mean_i (A w)_i / w_i. CR is 0 for n <= 2. For n > 9 a random
// index must be supplied, otherwise Error(MissingRandomIndex).
AhpResult consistency(const JudgmentMatrix& matrix, std::span<const double> weights,
                      std::optional<double> ri_override = std::nullopt);

// Hierarchy-wide ratio: sum_j CI_j a_j / sum_j RI_j a_j.
double composite_consistency_ratio(std::span<const double> ci, std::span<const double> ri,
                                   std::span<const double> layer_weights);

// Column-wise min-max to [0,1]; constant columns map to 0.5. `cost` columns
// are flipped so that larger is always better.
Eigen::MatrixXd min_max_normalize(const Eigen::MatrixXd& indicators, std::span<const bool> cost = {});

struct RoundScores {
    std::vector<double> score;
    std::vector<double> standardized; // score / sum of scores
    std::vector<int> rank;            // dense, 1 = highest
};

RoundScores score_rounds(const Eigen::MatrixXd& normalized_indicators, std::span<const double> weights);

std::vector<int> dense_rank_descending(std::span<const double> values);

void to_json(nlohmann::json& j, const AhpResult& result);
std::string rounds_csv(const RoundScores& scores);

} // namespace matchflow::ahp
