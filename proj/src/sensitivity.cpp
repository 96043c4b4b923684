#include "matchflow/sensitivity.hpp"

#include "matchflow/csv.hpp"
#include "matchflow/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

namespace matchflow::sweep {

namespace {

constexpr std::size_t kMaxCells = 1'000'000;

std::size_t feature_index(const ResponseModel& model, const std::string& name) {
    const auto& names = model.feature_names();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) fail(ErrorKind::UnknownName, "unknown indicator '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

std::vector<double> checked_baseline(const ResponseModel& model, const SweepSpec& spec) {
    const auto p = model.feature_names().size();
    if (spec.baseline.empty()) return std::vector<double>(p, 0.0);
    if (spec.baseline.size() != p) fail(ErrorKind::Shape, "baseline length differs from the model's feature count");
    return spec.baseline;
}

int sign_within(double d, double tol) noexcept {
    if (std::abs(d) < tol) return 0;
    return d > 0.0 ? 1 : -1;
}

} // namespace

std::vector<double> MomentumResponseModel::expand(std::span<const double> x) {
    const auto serve = *ingest::FeatureTable::index_of("serve_indicator");
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (j != serve) out.push_back(x[j] * x[j]);
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (j != serve) out.push_back(x[serve] * x[j]);
    }
    return out;
}

MomentumResponseModel MomentumResponseModel::fit(std::span<const ingest::FeatureTable> tables,
                                                 std::span<const std::vector<double>> momentum,
                                                 const softmax::TrainConfig& cfg) {
    if (tables.size() != momentum.size()) fail(ErrorKind::Shape, "one momentum series per feature table required");
    std::size_t rows = 0;
    for (std::size_t t = 0; t < tables.size(); ++t) {
        if (tables[t].rows.size() != momentum[t].size()) fail(ErrorKind::Shape, "momentum length differs from table");
        rows += tables[t].rows.size();
    }
    if (rows == 0) fail(ErrorKind::InsufficientData, "no rows to fit the momentum response");

    const auto width = static_cast<Eigen::Index>(expand(std::vector<double>(ingest::FeatureTable::names().size(), 0.0)).size());
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), width);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(rows), 2);
    Eigen::Index r = 0;
    for (std::size_t t = 0; t < tables.size(); ++t) {
        for (std::size_t i = 0; i < tables[t].rows.size(); ++i, ++r) {
            const auto e = expand(ingest::FeatureTable::as_vector(tables[t].rows[i]));
            for (Eigen::Index c = 0; c < width; ++c) x(r, c) = e[static_cast<std::size_t>(c)];
            const double m = std::clamp(momentum[t][i], 0.0, 1.0);
            y(r, 0) = m;
            y(r, 1) = 1.0 - m;
        }
    }
    MomentumResponseModel out;
    out.model_ = softmax::train_soft(x, y, cfg);
    out.model_.class_names = {"momentum", "reference"};
    out.model_.class_values = {1.0, 0.0};
    return out;
}

double MomentumResponseModel::evaluate(std::span<const double> features) const {
    if (features.size() != feature_names().size()) fail(ErrorKind::Shape, "feature vector has the wrong length");
    return softmax::predict_proba(model_, expand(features))[0];
}

std::vector<double> axis_grid(const Axis& a) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi) || !(a.lo < a.hi)) {
        fail(ErrorKind::InvalidSpec, "axis '" + a.indicator + "' needs lo < hi");
    }
    if (!(a.step > 0.0)) fail(ErrorKind::InvalidSpec, "axis '" + a.indicator + "' needs a positive step");
    const double span = (a.hi - a.lo) / a.step;
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    if (count < 2) fail(ErrorKind::InvalidSpec, "axis '" + a.indicator + "' yields fewer than 2 samples");
    if (count > kMaxCells) fail(ErrorKind::InvalidSpec, "axis '" + a.indicator + "' is too fine");
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) g[i] = a.lo + static_cast<double>(i) * a.step;
    return g;
}

std::vector<Crossover> find_crossovers(std::span<const double> grid, std::span<const double> diff, double tol) {
    if (grid.size() != diff.size()) fail(ErrorKind::Shape, "grid and difference lengths differ");
    std::vector<Crossover> out;
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        const int s = sign_within(diff[i], tol);
        if (s == 0) continue;
        if (last && sign_within(diff[*last], tol) != s) {
            const std::size_t a = *last;
            const double t = diff[a] / (diff[a] - diff[i]);
            out.push_back({grid[a] + t * (grid[i] - grid[a]), a, i});
        }
        last = i;
    }
    return out;
}

SweepResult1D sweep_1d(const ResponseModel& model, const SweepSpec& spec) {
    if (spec.axes.size() != 1) fail(ErrorKind::InvalidSpec, "a 1-D sweep needs exactly one indicator");
    const std::size_t ind = feature_index(model, spec.axes[0].indicator);
    const std::size_t ctx = feature_index(model, spec.context_feature);

    SweepResult1D r;
    r.indicator = spec.axes[0].indicator;
    r.grid = axis_grid(spec.axes[0]);
    std::vector<double> row = checked_baseline(model, spec);
    const std::size_t n = r.grid.size();
    r.serve_first.resize(n);
    r.serve_second.resize(n);
    r.mean.resize(n);
    std::vector<double> diff(n);
    bool coincident = true;
    for (std::size_t i = 0; i < n; ++i) {
        row[ind] = r.grid[i];
        row[ctx] = spec.serve_first_value;
        r.serve_first[i] = model.evaluate(row);
        row[ctx] = spec.serve_second_value;
        r.serve_second[i] = model.evaluate(row);
        r.mean[i] = 0.5 * (r.serve_first[i] + r.serve_second[i]);
        diff[i] = r.serve_first[i] - r.serve_second[i];
        coincident = coincident && std::abs(diff[i]) < spec.tolerance;
    }
    r.coincident = coincident;
    if (!coincident) r.crossovers = find_crossovers(r.grid, diff, spec.tolerance);
    r.argmax_mean = static_cast<std::size_t>(std::max_element(r.mean.begin(), r.mean.end()) - r.mean.begin());
    return r;
}

SweepResult2D sweep_2d(const ResponseModel& model, const SweepSpec& spec) {
    if (spec.axes.size() != 2) fail(ErrorKind::InvalidSpec, "a 2-D sweep needs exactly two indicators");
    const std::size_t ix = feature_index(model, spec.axes[0].indicator);
    const std::size_t iy = feature_index(model, spec.axes[1].indicator);
    const std::size_t ctx = feature_index(model, spec.context_feature);
    if (ix == iy) fail(ErrorKind::InvalidSpec, "the two sweep indicators must differ");

    SweepResult2D r;
    r.indicator_x = spec.axes[0].indicator;
    r.indicator_y = spec.axes[1].indicator;
    r.grid_x = axis_grid(spec.axes[0]);
    r.grid_y = axis_grid(spec.axes[1]);
    const std::size_t nx = r.grid_x.size();
    const std::size_t ny = r.grid_y.size();
    if (nx * ny > kMaxCells) fail(ErrorKind::InvalidSpec, "sweep grid exceeds 1e6 cells");

    const auto rows = static_cast<Eigen::Index>(nx);
    const auto cols = static_cast<Eigen::Index>(ny);
    r.serve_first.resize(rows, cols);
    r.serve_second.resize(rows, cols);
    std::vector<double> row = checked_baseline(model, spec);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            row[ix] = r.grid_x[i];
            row[iy] = r.grid_y[j];
            row[ctx] = spec.serve_first_value;
            r.serve_first(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = model.evaluate(row);
            row[ctx] = spec.serve_second_value;
            r.serve_second(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = model.evaluate(row);
        }
    }
    r.mean = 0.5 * (r.serve_first + r.serve_second);
    const Eigen::MatrixXd diff = r.serve_first - r.serve_second;
    r.coincident = (diff.array().abs() < spec.tolerance).all();

    if (!r.coincident) {
        std::vector<double> line;
        for (std::size_t j = 0; j < ny; ++j) {
            line.resize(nx);
            for (std::size_t i = 0; i < nx; ++i) line[i] = diff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            for (const auto& c : find_crossovers(r.grid_x, line, spec.tolerance)) r.locus.push_back({c.at, r.grid_y[j]});
        }
        for (std::size_t i = 0; i < nx; ++i) {
            line.resize(ny);
            for (std::size_t j = 0; j < ny; ++j) line[j] = diff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            for (const auto& c : find_crossovers(r.grid_y, line, spec.tolerance)) r.locus.push_back({r.grid_x[i], c.at});
        }
        std::sort(r.locus.begin(), r.locus.end(),
                  [](const LocusPoint& a, const LocusPoint& b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
        r.locus.erase(std::unique(r.locus.begin(), r.locus.end(),
                                  [](const LocusPoint& a, const LocusPoint& b) { return a.x == b.x && a.y == b.y; }),
                      r.locus.end());
    }
    Eigen::Index mx = 0, my = 0;
    r.mean.maxCoeff(&mx, &my);
    r.argmax_x = static_cast<std::size_t>(mx);
    r.argmax_y = static_cast<std::size_t>(my);
    return r;
}

std::string sweep_csv(const SweepResult1D& r) {
    std::string out = r.indicator + ",context,momentum\n";
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        const std::string x = csv::format_double(r.grid[i]);
        out += x + ",serve_first," + csv::format_double(r.serve_first[i]) + "\n";
        out += x + ",serve_second," + csv::format_double(r.serve_second[i]) + "\n";
        out += x + ",mean," + csv::format_double(r.mean[i]) + "\n";
    }
    return out;
}

std::string sweep_csv(const SweepResult2D& r) {
    std::string out = r.indicator_x + "," + r.indicator_y + ",context,momentum\n";
    for (std::size_t i = 0; i < r.grid_x.size(); ++i) {
        for (std::size_t j = 0; j < r.grid_y.size(); ++j) {
            const auto a = static_cast<Eigen::Index>(i);
            const auto b = static_cast<Eigen::Index>(j);
            const std::string xy = csv::format_double(r.grid_x[i]) + "," + csv::format_double(r.grid_y[j]);
            out += xy + ",serve_first," + csv::format_double(r.serve_first(a, b)) + "\n";
            out += xy + ",serve_second," + csv::format_double(r.serve_second(a, b)) + "\n";
            out += xy + ",mean," + csv::format_double(r.mean(a, b)) + "\n";
        }
    }
    return out;
}

void to_json(nlohmann::json& j, const SweepResult1D& r) {
    nlohmann::json cross = nlohmann::json::array();
    for (const auto& c : r.crossovers) {
        cross.push_back({{"at", c.at}, {"bracket", {r.grid[c.lo_index], r.grid[c.hi_index]}}});
    }
    j = nlohmann::json{{"indicator", r.indicator},
                       {"grid_points", r.grid.size()},
                       {"coincident", r.coincident},
                       {"crossovers", cross},
                       {"argmax_mean", {{"at", r.grid[r.argmax_mean]}, {"momentum", r.mean[r.argmax_mean]}}}};
}

void to_json(nlohmann::json& j, const SweepResult2D& r) {
    nlohmann::json locus = nlohmann::json::array();
    for (const auto& p : r.locus) locus.push_back({p.x, p.y});
    const auto mx = static_cast<Eigen::Index>(r.argmax_x);
    const auto my = static_cast<Eigen::Index>(r.argmax_y);
    j = nlohmann::json{{"indicators", {r.indicator_x, r.indicator_y}},
                       {"grid_shape", {r.grid_x.size(), r.grid_y.size()}},
                       {"coincident", r.coincident},
                       {"intersection_locus", locus},
                       {"argmax_mean",
                        {{"at", {r.grid_x[r.argmax_x], r.grid_y[r.argmax_y]}}, {"momentum", r.mean(mx, my)}}}};
}

} // namespace matchflow::sweep
