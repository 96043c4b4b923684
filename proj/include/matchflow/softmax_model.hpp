#pragma once

// K-class logistic regression with the last class as the zero-score reference.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace matchflow::softmax {

// 1 / (1 + e^-z), evaluated without overflow for any finite z.
double sigmoid(double z) noexcept;

struct TrainConfig {
    double learning_rate = 1.0;
    int max_iters = 500;
    double tol = 1e-6;       // stop when the gradient norm falls to this
    double l2_penalty = 1e-4; // intercepts are not penalised
    std::uint64_t seed = 42;
    double train_fraction = 0.8;
    int max_backtracks = 30;

    void validate() const; // throws Error(Config)
};

struct TrainingInfo {
    int iterations = 0;
    double final_loss = 0.0;
    double gradient_norm = 0.0;
    std::string stop_reason;
    std::vector<double> loss_history; // one entry per accepted step, plus the start
};

struct SoftmaxModel {
    std::vector<std::string> class_names;
    std::vector<double> class_values;
    std::vector<std::string> feature_names;
    Eigen::MatrixXd coefficients; // (K-1) x (p+1); column 0 is the intercept
    std::vector<double> feature_mean;
    std::vector<double> feature_scale;
    std::uint64_t seed = 0;
    TrainingInfo info;

    int n_classes() const noexcept { return static_cast<int>(coefficients.rows()) + 1; }
    int n_features() const noexcept { return static_cast<int>(coefficients.cols()) - 1; }
};

struct Objective {
    double loss = 0.0;
    Eigen::MatrixXd gradient; // same shape as the coefficients
};

// Mean negative log-likelihood plus 0.5 * l2 * |non-intercept coefficients|^2.
// `design` is n x (p+1) with a leading column of ones; `targets` is n x K with
// rows on the probability simplex (one-hot for hard labels).
Objective negative_log_likelihood(const Eigen::MatrixXd& coefficients, const Eigen::MatrixXd& design,
                                  const Eigen::MatrixXd& targets, double l2_penalty);

// Class probabilities from raw linear scores for the first K-1 classes.
Eigen::VectorXd softmax_with_reference(const Eigen::VectorXd& scores);

// Throws Error(DegenerateLabels) when a class in [0, n_classes) is absent and
// Error(Divergence) when the line search cannot make progress.
SoftmaxModel train(const Eigen::MatrixXd& features, std::span<const int> labels, int n_classes,
                   const TrainConfig& cfg);

// Fractional targets (rows of `targets` sum to 1).
SoftmaxModel train_soft(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, const TrainConfig& cfg);

std::vector<double> predict_proba(const SoftmaxModel& model, std::span<const double> row);

// Index of the largest entry; ties go to the lowest index.
int argmax_class(std::span<const double> proba);

int predict(const SoftmaxModel& model, std::span<const double> row);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Per-class seeded shuffle, first round(fraction * class size) go to train.
Split stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed);

void to_json(nlohmann::json& j, const SoftmaxModel& model);
SoftmaxModel model_from_json(const nlohmann::json& j);

} // namespace matchflow::softmax
