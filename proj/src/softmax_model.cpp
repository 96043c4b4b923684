#include "matchflow/softmax_model.hpp"

#include "matchflow/error.hpp"
#include "matchflow/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace matchflow::softmax {

double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        fail(ErrorKind::Config, "learning_rate must be positive");
    }
    if (max_iters < 0) fail(ErrorKind::Config, "max_iters must be >= 0");
    if (!(tol > 0.0)) fail(ErrorKind::Config, "tol must be positive");
    if (!(l2_penalty >= 0.0)) fail(ErrorKind::Config, "l2_penalty must be >= 0");
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
        fail(ErrorKind::Config, "train_fraction must lie in (0, 1]");
    }
    if (max_backtracks < 1) fail(ErrorKind::Config, "max_backtracks must be >= 1");
}

Eigen::VectorXd softmax_with_reference(const Eigen::VectorXd& scores) {
    const Eigen::Index k = scores.size() + 1;
    Eigen::VectorXd full(k);
    full.head(k - 1) = scores;
    full(k - 1) = 0.0;
    const double m = full.maxCoeff();
    Eigen::VectorXd e = (full.array() - m).exp().matrix();
    return e / e.sum();
}

Objective negative_log_likelihood(const Eigen::MatrixXd& coefficients, const Eigen::MatrixXd& design,
                                  const Eigen::MatrixXd& targets, double l2_penalty) {
    const Eigen::Index n = design.rows();
    const Eigen::Index k = targets.cols();
    Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n, k);
    scores.leftCols(k - 1) = design * coefficients.transpose();

    Eigen::MatrixXd probs(n, k);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double m = scores.row(i).maxCoeff();
        const Eigen::ArrayXd e = (scores.row(i).array() - m).exp().transpose();
        const double sum = e.sum();
        const double lse = m + std::log(sum);
        probs.row(i) = (e / sum).transpose();
        loss += lse * targets.row(i).sum() - targets.row(i).dot(scores.row(i));
    }
    loss /= static_cast<double>(n);

    Objective obj;
    obj.gradient = ((probs - targets).leftCols(k - 1).transpose() * design) / static_cast<double>(n);
    if (l2_penalty > 0.0) {
        const auto slopes = coefficients.rightCols(coefficients.cols() - 1);
        loss += 0.5 * l2_penalty * slopes.squaredNorm();
        obj.gradient.rightCols(coefficients.cols() - 1) += l2_penalty * slopes;
    }
    obj.loss = loss;
    return obj;
}

namespace {

SoftmaxModel fit(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, const TrainConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = features.rows();
    const Eigen::Index p = features.cols();
    const Eigen::Index k = targets.cols();
    if (n == 0) fail(ErrorKind::InsufficientData, "no training rows");
    if (targets.rows() != n) fail(ErrorKind::Shape, "targets and features disagree on the number of rows");
    if (!features.allFinite()) fail(ErrorKind::Domain, "features contain non-finite values");

    SoftmaxModel model;
    model.seed = cfg.seed;
    model.feature_mean.resize(static_cast<std::size_t>(p));
    model.feature_scale.resize(static_cast<std::size_t>(p));
    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = features.col(j).mean();
        const double var = (features.col(j).array() - mean).square().mean();
        const double scale = var > 0.0 ? std::sqrt(var) : 1.0;
        model.feature_mean[static_cast<std::size_t>(j)] = mean;
        model.feature_scale[static_cast<std::size_t>(j)] = scale;
        design.col(j + 1) = (features.col(j).array() - mean) / scale;
    }

    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(k - 1, p + 1);
    Objective obj = negative_log_likelihood(coef, design, targets, cfg.l2_penalty);
    if (!std::isfinite(obj.loss)) fail(ErrorKind::Divergence, "initial loss is not finite");

    TrainingInfo& info = model.info;
    info.loss_history.push_back(obj.loss);
    info.stop_reason = "max_iters";
    for (int it = 0; it < cfg.max_iters; ++it) {
        const double gnorm = obj.gradient.norm();
        if (gnorm <= cfg.tol) {
            info.stop_reason = "converged";
            break;
        }
        double step = cfg.learning_rate;
        bool accepted = false;
        double last_trial = obj.loss;
        for (int b = 0; b < cfg.max_backtracks; ++b) {
            Eigen::MatrixXd trial = coef - step * obj.gradient;
            Objective next = negative_log_likelihood(trial, design, targets, cfg.l2_penalty);
            last_trial = next.loss;
            if (std::isfinite(next.loss) && next.loss <= obj.loss) {
                coef = std::move(trial);
                obj = std::move(next);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            const double slack = 1e-12 * std::max(1.0, std::abs(obj.loss));
            if (std::isfinite(last_trial) && last_trial - obj.loss <= slack) {
                info.stop_reason = "numerical_floor";
                break;
            }
            fail(ErrorKind::Divergence, "loss did not decrease after " + std::to_string(cfg.max_backtracks) +
                                            " step halvings; learning rate too high");
        }
        ++info.iterations;
        info.loss_history.push_back(obj.loss);
    }
    info.final_loss = obj.loss;
    info.gradient_norm = obj.gradient.norm();
    if (info.stop_reason == "max_iters" && info.gradient_norm <= cfg.tol) info.stop_reason = "converged";
    model.coefficients = std::move(coef);
    return model;
}

} // namespace

SoftmaxModel train(const Eigen::MatrixXd& features, std::span<const int> labels, int n_classes,
                   const TrainConfig& cfg) {
    if (n_classes < 2) fail(ErrorKind::DegenerateLabels, "at least two classes are required");
    if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
        fail(ErrorKind::Shape, "label count does not match feature rows");
    }
    std::vector<int> seen(static_cast<std::size_t>(n_classes), 0);
    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(features.rows(), n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < 0 || y >= n_classes) fail(ErrorKind::Domain, "label " + std::to_string(y) + " out of range");
        seen[static_cast<std::size_t>(y)] = 1;
        targets(static_cast<Eigen::Index>(i), y) = 1.0;
    }
    for (int c = 0; c < n_classes; ++c) {
        if (!seen[static_cast<std::size_t>(c)]) {
            fail(ErrorKind::DegenerateLabels, "class " + std::to_string(c) + " is absent from the training data");
        }
    }
    SoftmaxModel model = fit(features, targets, cfg);
    for (int c = 0; c < n_classes; ++c) {
        model.class_names.push_back("class_" + std::to_string(c));
        model.class_values.push_back(static_cast<double>(c));
    }
    return model;
}

SoftmaxModel train_soft(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, const TrainConfig& cfg) {
    if (targets.cols() < 2) fail(ErrorKind::DegenerateLabels, "at least two classes are required");
    for (Eigen::Index i = 0; i < targets.rows(); ++i) {
        if ((targets.row(i).array() < 0.0).any() || std::abs(targets.row(i).sum() - 1.0) > 1e-9) {
            fail(ErrorKind::Domain, "target rows must lie on the probability simplex");
        }
    }
    SoftmaxModel model = fit(features, targets, cfg);
    for (Eigen::Index c = 0; c < targets.cols(); ++c) {
        model.class_names.push_back("class_" + std::to_string(c));
        model.class_values.push_back(static_cast<double>(c));
    }
    return model;
}

std::vector<double> predict_proba(const SoftmaxModel& model, std::span<const double> row) {
    const int p = model.n_features();
    if (static_cast<int>(row.size()) != p) {
        fail(ErrorKind::Shape, "row has " + std::to_string(row.size()) + " features, model expects " +
                                   std::to_string(p));
    }
    Eigen::VectorXd x(p + 1);
    x(0) = 1.0;
    for (int j = 0; j < p; ++j) {
        const auto js = static_cast<std::size_t>(j);
        x(j + 1) = (row[js] - model.feature_mean[js]) / model.feature_scale[js];
    }
    const Eigen::VectorXd probs = softmax_with_reference(model.coefficients * x);
    return {probs.data(), probs.data() + probs.size()};
}

int argmax_class(std::span<const double> proba) {
    if (proba.empty()) fail(ErrorKind::Shape, "empty probability vector");
    int best = 0;
    for (std::size_t i = 1; i < proba.size(); ++i) {
        if (proba[i] > proba[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    }
    return best;
}

int predict(const SoftmaxModel& model, std::span<const double> row) {
    return argmax_class(predict_proba(model, row));
}

Split stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    Split split;
    for (auto& [label, members] : by_class) {
        auto gen = rng::substream(seed, static_cast<std::uint64_t>(label));
        rng::shuffle(std::span<std::size_t>(members), gen);
        const auto m = members.size();
        auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(m)));
        n_train = std::clamp<std::size_t>(n_train, std::min<std::size_t>(1, m), m);
        split.train.insert(split.train.end(), members.begin(), members.begin() + static_cast<long>(n_train));
        split.test.insert(split.test.end(), members.begin() + static_cast<long>(n_train), members.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

void to_json(nlohmann::json& j, const SoftmaxModel& m) {
    nlohmann::json coef = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.coefficients.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.coefficients.cols()));
        for (Eigen::Index c = 0; c < m.coefficients.cols(); ++c) row[static_cast<std::size_t>(c)] = m.coefficients(r, c);
        coef.push_back(row);
    }
    j = nlohmann::json{
        {"classes", {{"names", m.class_names}, {"values", m.class_values}, {"reference", m.class_names.empty() ? "" : m.class_names.back()}}},
        {"feature_names", m.feature_names},
        {"coefficients", coef},
        {"standardization", {{"mean", m.feature_mean}, {"scale", m.feature_scale}}},
        {"training",
         {{"seed", m.seed},
          {"iterations", m.info.iterations},
          {"final_loss", m.info.final_loss},
          {"gradient_norm", m.info.gradient_norm},
          {"stop_reason", m.info.stop_reason}}},
    };
}

SoftmaxModel model_from_json(const nlohmann::json& j) {
    SoftmaxModel m;
    try {
        m.class_names = j.at("classes").at("names").get<std::vector<std::string>>();
        m.class_values = j.at("classes").at("values").get<std::vector<double>>();
        m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        const auto rows = j.at("coefficients").get<std::vector<std::vector<double>>>();
        m.feature_mean = j.at("standardization").at("mean").get<std::vector<double>>();
        m.feature_scale = j.at("standardization").at("scale").get<std::vector<double>>();
        const auto p1 = static_cast<Eigen::Index>(m.feature_mean.size() + 1);
        m.coefficients.resize(static_cast<Eigen::Index>(rows.size()), p1);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<Eigen::Index>(rows[r].size()) != p1) fail(ErrorKind::Shape, "coefficient row width mismatch");
            for (std::size_t c = 0; c < rows[r].size(); ++c) {
                m.coefficients(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
            }
        }
        const auto& t = j.at("training");
        m.seed = t.at("seed").get<std::uint64_t>();
        m.info.iterations = t.at("iterations").get<int>();
        m.info.final_loss = t.at("final_loss").get<double>();
        m.info.gradient_norm = t.at("gradient_norm").get<double>();
        m.info.stop_reason = t.at("stop_reason").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Schema, std::string("malformed model JSON: ") + e.what());
    }
    return m;
}

} // namespace matchflow::softmax
