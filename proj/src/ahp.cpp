#include "matchflow/ahp.hpp"

#include "matchflow/csv.hpp"
#include "matchflow/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

namespace matchflow::ahp {

JudgmentMatrix::JudgmentMatrix(Eigen::MatrixXd entries) : a_(std::move(entries)) {
    if (a_.rows() != a_.cols() || a_.rows() < 1) fail(ErrorKind::Shape, "judgment matrix must be square and non-empty");
    const Eigen::Index n = a_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(a_(i, j) > 0.0) || !std::isfinite(a_(i, j))) {
                fail(ErrorKind::Domain, "judgment entries must be positive and finite");
            }
        }
        if (std::abs(a_(i, i) - 1.0) > 1e-9) fail(ErrorKind::Domain, "judgment matrix diagonal must be 1");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(a_(i, j) * a_(j, i) - 1.0) > 1e-9) {
                fail(ErrorKind::Domain, "judgment matrix is not reciprocal at (" + std::to_string(i + 1) + "," +
                                            std::to_string(j + 1) + ")");
            }
        }
    }
}

JudgmentMatrix build_judgment_matrix(int n, std::span<const Judgment> judgments) {
    if (n < 1) fail(ErrorKind::Domain, "matrix order must be positive");
    Eigen::MatrixXd a = Eigen::MatrixXd::Ones(n, n);
    std::set<std::pair<int, int>> seen;
    for (const auto& jd : judgments) {
        if (jd.i < 0 || jd.j < 0 || jd.i >= n || jd.j >= n) fail(ErrorKind::Domain, "judgment index out of range");
        if (jd.i == jd.j) fail(ErrorKind::Domain, "diagonal judgments are fixed at 1");
        if (!(jd.value >= 1.0 / 9.0 - 1e-12 && jd.value <= 9.0 + 1e-12)) {
            fail(ErrorKind::Domain, "judgment value " + csv::format_double(jd.value) + " outside [1/9, 9]");
        }
        const int lo = std::min(jd.i, jd.j);
        const int hi = std::max(jd.i, jd.j);
        if (!seen.emplace(lo, hi).second) {
            fail(ErrorKind::Conflict, "pair (" + std::to_string(lo + 1) + "," + std::to_string(hi + 1) +
                                          ") specified more than once");
        }
        const double upper = jd.i < jd.j ? jd.value : 1.0 / jd.value;
        a(lo, hi) = upper;
        a(hi, lo) = 1.0 / upper;
    }
    return JudgmentMatrix(std::move(a));
}

JudgmentMatrix judgment_matrix_from_csv(std::string_view text) {
    const auto rows = csv::read(text);
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) fail(ErrorKind::EmptyInput, "judgment matrix file is empty");
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& f = rows[static_cast<std::size_t>(i)].fields;
        if (static_cast<Eigen::Index>(f.size()) != n) fail(ErrorKind::Shape, "judgment matrix CSV is not square");
        for (Eigen::Index j = 0; j < n; ++j) {
            std::string_view tok = csv::trim(f[static_cast<std::size_t>(j)]);
            std::optional<double> v;
            if (auto slash = tok.find('/'); slash != std::string_view::npos) {
                auto num = csv::parse_double(tok.substr(0, slash));
                auto den = csv::parse_double(tok.substr(slash + 1));
                if (num && den && *den != 0.0) v = *num / *den;
            } else {
                v = csv::parse_double(tok);
            }
            if (!v) fail(ErrorKind::Schema, "unreadable judgment entry '" + std::string(tok) + "'");
            a(i, j) = *v;
        }
    }
    return JudgmentMatrix(std::move(a));
}

JudgmentMatrix consistent_matrix(std::span<const double> w) {
    const auto n = static_cast<Eigen::Index>(w.size());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            a(i, j) = i == j ? 1.0 : w[static_cast<std::size_t>(i)] / w[static_cast<std::size_t>(j)];
        }
    }
    return JudgmentMatrix(std::move(a));
}

WeightMethod parse_weight_method(std::string_view name) {
    if (name == "row_sum") return WeightMethod::RowSum;
    if (name == "geometric_mean") return WeightMethod::GeometricMean;
    fail(ErrorKind::UnknownName, "unknown weight method '" + std::string(name) + "'");
}

std::vector<double> weights(const JudgmentMatrix& matrix, WeightMethod method) {
    const int n = matrix.order();
    if (n < 2) fail(ErrorKind::Domain, "weights need a matrix of order >= 2");
    std::vector<double> w(static_cast<std::size_t>(n));
    const auto& a = matrix.entries();
    for (int i = 0; i < n; ++i) {
        if (method == WeightMethod::RowSum) {
            w[static_cast<std::size_t>(i)] = (a.row(i).sum() + n / 2.0 - 1.0) / (n * (n - 1.0));
        } else {
            // log-domain mean avoids overflow for large orders
            w[static_cast<std::size_t>(i)] = std::exp(a.row(i).array().log().mean());
        }
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= total;
    return w;
}

std::optional<double> random_index(int n) noexcept {
    static constexpr std::array<double, 10> kRi{0.0, 0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45};
    if (n < 1 || n > 9) return std::nullopt;
    return kRi[static_cast<std::size_t>(n)];
}

AhpResult consistency(const JudgmentMatrix& matrix, std::span<const double> w, std::optional<double> ri_override) {
    const int n = matrix.order();
    if (static_cast<int>(w.size()) != n) fail(ErrorKind::Shape, "weight vector length differs from matrix order");
    Eigen::Map<const Eigen::VectorXd> wv(w.data(), n);
    if ((wv.array() <= 0.0).any()) fail(ErrorKind::Domain, "weights must be positive");

    const Eigen::VectorXd aw = matrix.entries() * wv;
    AhpResult r;
    const double total = wv.sum();
    r.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r.weights[static_cast<std::size_t>(i)] = wv(i) / total;
    r.lambda_max = (aw.array() / wv.array()).mean();
    r.ci = n > 1 ? (r.lambda_max - n) / (n - 1.0) : 0.0;
    if (n <= 2) {
        r.cr = 0.0;
    } else {
        const auto ri = ri_override ? ri_override : random_index(n);
        if (!ri) fail(ErrorKind::MissingRandomIndex, "no random index for order " + std::to_string(n));
        if (!(*ri > 0.0)) fail(ErrorKind::Domain, "random index must be positive");
        r.cr = r.ci / *ri;
    }
    r.consistent = r.cr < 0.1;
    return r;
}

double composite_consistency_ratio(std::span<const double> ci, std::span<const double> ri,
                                   std::span<const double> layer_weights) {
    if (ci.size() != ri.size() || ci.size() != layer_weights.size()) {
        fail(ErrorKind::Shape, "CI, RI and layer weights must have equal length");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < ci.size(); ++j) {
        num += ci[j] * layer_weights[j];
        den += ri[j] * layer_weights[j];
    }
    return den == 0.0 ? 0.0 : num / den;
}

Eigen::MatrixXd min_max_normalize(const Eigen::MatrixXd& x, std::span<const bool> cost) {
    if (!cost.empty() && static_cast<Eigen::Index>(cost.size()) != x.cols()) {
        fail(ErrorKind::Shape, "cost flags must match the number of indicator columns");
    }
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double lo = x.col(c).minCoeff();
        const double hi = x.col(c).maxCoeff();
        if (hi == lo) {
            out.col(c).setConstant(0.5);
            continue;
        }
        out.col(c) = (x.col(c).array() - lo) / (hi - lo);
        if (!cost.empty() && cost[static_cast<std::size_t>(c)]) out.col(c) = (1.0 - out.col(c).array()).matrix();
    }
    return out;
}

std::vector<int> dense_rank_descending(std::span<const double> values) {
    std::vector<double> distinct(values.begin(), values.end());
    std::sort(distinct.begin(), distinct.end(), std::greater<>());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> rank;
    rank.reserve(values.size());
    for (double v : values) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), v, std::greater<>());
        rank.push_back(static_cast<int>(it - distinct.begin()) + 1);
    }
    return rank;
}

RoundScores score_rounds(const Eigen::MatrixXd& x, std::span<const double> w) {
    if (static_cast<Eigen::Index>(w.size()) != x.cols()) {
        fail(ErrorKind::Shape, "weight count differs from the number of indicators");
    }
    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(wsum - 1.0) > 1e-9) fail(ErrorKind::Domain, "indicator weights must sum to 1");

    Eigen::Map<const Eigen::VectorXd> wv(w.data(), x.cols());
    const Eigen::VectorXd s = x * wv;
    RoundScores out;
    out.score.assign(s.data(), s.data() + s.size());
    const double total = s.sum();
    for (double v : out.score) out.standardized.push_back(total == 0.0 ? 0.0 : v / total);
    out.rank = dense_rank_descending(out.score);
    return out;
}

void to_json(nlohmann::json& j, const AhpResult& r) {
    j = nlohmann::json{{"weights", r.weights}, {"lambda_max", r.lambda_max}, {"ci", r.ci},
                       {"cr", r.cr},           {"consistent", r.consistent}};
}

std::string rounds_csv(const RoundScores& s) {
    std::string out = "round,score,standardization,ranking\n";
    for (std::size_t i = 0; i < s.score.size(); ++i) {
        out += std::to_string(i + 1) + "," + csv::format_double(s.score[i]) + "," +
               csv::format_double(s.standardized[i]) + "," + std::to_string(s.rank[i]) + "\n";
    }
    return out;
}

} // namespace matchflow::ahp
