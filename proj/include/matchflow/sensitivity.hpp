#pragma once

// Grid sensitivity of a learned momentum response under serve-first and
// serve-second contexts, with crossover detection.

#include "matchflow/ingest.hpp"
#include "matchflow/softmax_model.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace matchflow::sweep {

class ResponseModel {
public:
    virtual ~ResponseModel() = default;
    virtual const std::vector<std::string>& feature_names() const = 0;
    virtual double evaluate(std::span<const double> features) const = 0;
};

class FunctionResponse final : public ResponseModel {
public:
    using Fn = std::function<double(std::span<const double>)>;
    FunctionResponse(std::vector<std::string> names, Fn fn) : names_(std::move(names)), fn_(std::move(fn)) {}

    const std::vector<std::string>& feature_names() const override { return names_; }
    double evaluate(std::span<const double> features) const override { return fn_(features); }

private:
    std::vector<std::string> names_;
    Fn fn_;
};

// Fractional logistic regression of player-1 momentum on the feature table,
// expanded with squared terms and serve-context interactions so that the two
// contexts can respond differently.
class MomentumResponseModel final : public ResponseModel {
public:
    static MomentumResponseModel fit(std::span<const ingest::FeatureTable> tables,
                                     std::span<const std::vector<double>> momentum,
                                     const softmax::TrainConfig& cfg);

    const std::vector<std::string>& feature_names() const override { return ingest::FeatureTable::names(); }
    double evaluate(std::span<const double> features) const override;

    const softmax::SoftmaxModel& model() const noexcept { return model_; }
    static std::vector<double> expand(std::span<const double> features);

private:
    softmax::SoftmaxModel model_;
};

struct Axis {
    std::string indicator;
    double lo = 0.0;
    double hi = 1.0;
    double step = 0.1;
};

struct SweepSpec {
    std::vector<Axis> axes; // one or two
    std::vector<double> baseline;
    std::string context_feature = "serve_indicator";
    double serve_first_value = 1.0;
    double serve_second_value = 0.0;
    double tolerance = 1e-3;
};

// lo, lo + step, ... up to hi (inclusive within step * 1e-9). Throws
// Error(InvalidSpec) unless lo < hi, step > 0 and at least 2 samples.
std::vector<double> axis_grid(const Axis& axis);

struct Crossover {
    double at = 0.0;
    std::size_t lo_index = 0; // bracketing grid indices with opposite signs
    std::size_t hi_index = 0;
};

// Sign changes of `diff`, ignoring entries within tolerance of zero.
std::vector<Crossover> find_crossovers(std::span<const double> grid, std::span<const double> diff, double tolerance);

struct SweepResult1D {
    std::string indicator;
    std::vector<double> grid;
    std::vector<double> serve_first;
    std::vector<double> serve_second;
    std::vector<double> mean;
    std::vector<Crossover> crossovers;
    bool coincident = false; // every grid point within tolerance
    std::size_t argmax_mean = 0;
};

struct LocusPoint {
    double x = 0.0;
    double y = 0.0;
};

struct SweepResult2D {
    std::string indicator_x;
    std::string indicator_y;
    std::vector<double> grid_x;
    std::vector<double> grid_y;
    Eigen::MatrixXd serve_first; // rows index x, columns index y
    Eigen::MatrixXd serve_second;
    Eigen::MatrixXd mean;
    std::vector<LocusPoint> locus;
    bool coincident = false;
    std::size_t argmax_x = 0;
    std::size_t argmax_y = 0;
};

SweepResult1D sweep_1d(const ResponseModel& model, const SweepSpec& spec);
SweepResult2D sweep_2d(const ResponseModel& model, const SweepSpec& spec);

std::string sweep_csv(const SweepResult1D& r);
std::string sweep_csv(const SweepResult2D& r);
void to_json(nlohmann::json& j, const SweepResult1D& r);
void to_json(nlohmann::json& j, const SweepResult2D& r);

} // namespace matchflow::sweep
