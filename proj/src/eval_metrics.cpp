#include "matchflow/eval_metrics.hpp"

#include "matchflow/csv.hpp"
#include "matchflow/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace matchflow::metrics {

long ConfusionCounts::correct() const noexcept {
    long sum = 0;
    for (const auto& c : per_class) sum += c.tp;
    return sum;
}

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> pred, int n_classes) {
    if (truth.size() != pred.size()) fail(ErrorKind::Shape, "truth and prediction lengths differ");
    if (n_classes < 1) fail(ErrorKind::Domain, "n_classes must be positive");

    ConfusionCounts out;
    out.n_classes = n_classes;
    out.total = static_cast<long>(truth.size());
    out.per_class.assign(static_cast<std::size_t>(n_classes), ClassCounts{});
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i];
        const int p = pred[i];
        if (t < 0 || t >= n_classes || p < 0 || p >= n_classes) {
            fail(ErrorKind::Domain, "label outside the class set at index " + std::to_string(i));
        }
        if (t == p) {
            ++out.per_class[static_cast<std::size_t>(t)].tp;
        } else {
            ++out.per_class[static_cast<std::size_t>(p)].fp;
            ++out.per_class[static_cast<std::size_t>(t)].fn;
        }
    }
    for (auto& c : out.per_class) c.tn = out.total - c.tp - c.fp - c.fn;
    return out;
}

double safe_ratio(double num, double den) noexcept { return den == 0.0 ? 0.0 : num / den; }

double f1_score(double precision, double recall) noexcept {
    return safe_ratio(2.0 * precision * recall, precision + recall);
}

namespace {

Scores scores_from(double tp, double fp, double fn, double tn) {
    Scores s;
    s.precision = safe_ratio(tp, tp + fp);
    s.recall = safe_ratio(tp, tp + fn);
    s.specificity = safe_ratio(tn, tn + fp);
    s.accuracy = safe_ratio(tp + tn, tp + tn + fp + fn);
    s.f1 = f1_score(s.precision, s.recall);
    return s;
}

} // namespace

SummaryMetrics summary_metrics(const ConfusionCounts& counts) {
    SummaryMetrics m;
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& c : counts.per_class) {
        m.per_class.push_back(scores_from(static_cast<double>(c.tp), static_cast<double>(c.fp),
                                          static_cast<double>(c.fn), static_cast<double>(c.tn)));
        tp += static_cast<double>(c.tp);
        fp += static_cast<double>(c.fp);
        fn += static_cast<double>(c.fn);
        tn += static_cast<double>(c.tn);
    }

    const double k = static_cast<double>(m.per_class.size());
    if (k > 0) {
        for (const auto& s : m.per_class) {
            m.macro.precision += s.precision;
            m.macro.recall += s.recall;
            m.macro.specificity += s.specificity;
            m.macro.accuracy += s.accuracy;
        }
        m.macro.precision /= k;
        m.macro.recall /= k;
        m.macro.specificity /= k;
        m.macro.accuracy /= k;
        m.macro.f1 = f1_score(m.macro.precision, m.macro.recall);
    }

    m.micro.precision = safe_ratio(tp, tp + fp);
    m.micro.recall = safe_ratio(tp, tp + fn);
    m.micro.specificity = safe_ratio(tn, tn + fp);
    m.micro.accuracy = safe_ratio(static_cast<double>(counts.correct()), static_cast<double>(counts.total));
    m.micro.f1 = f1_score(m.micro.precision, m.micro.recall);
    return m;
}

RocCurve roc_auc(std::span<const int> truth, std::span<const double> scores, int positive) {
    if (truth.size() != scores.size()) fail(ErrorKind::Shape, "truth and score lengths differ");
    std::vector<std::size_t> order(truth.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    double n_pos = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!std::isfinite(scores[i])) fail(ErrorKind::Domain, "non-finite score at index " + std::to_string(i));
        if (truth[i] == positive) n_pos += 1.0;
    }
    const double n_neg = static_cast<double>(truth.size()) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0) {
        fail(ErrorKind::UndefinedRoc, "ROC needs both positive and negative samples");
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    double tp = 0.0;
    double fp = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            if (truth[order[i]] == positive) {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            ++i;
        }
        const RocPoint prev = curve.points.back();
        const RocPoint next{fp / n_neg, tp / n_pos};
        curve.auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) * 0.5;
        curve.thresholds.push_back(threshold);
        curve.points.push_back(next);
    }
    return curve;
}

std::string roc_csv(const RocCurve& curve) {
    std::string out = "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const std::string thr = i == 0 ? "inf" : csv::format_double(curve.thresholds[i - 1]);
        out += thr + "," + csv::format_double(curve.points[i].fpr) + "," + csv::format_double(curve.points[i].tpr) + "\n";
    }
    return out;
}

nlohmann::json metrics_report(const ConfusionCounts& counts, const SummaryMetrics& summary,
                              const std::vector<std::string>& class_names) {
    using nlohmann::json;
    std::vector<std::string> columns = class_names;
    columns.emplace_back("MacroAVG");
    columns.emplace_back("MicroAVG");

    const double k = static_cast<double>(counts.per_class.size());
    auto count_row = [&](auto member) {
        json row = json::object();
        double sum = 0.0;
        for (std::size_t c = 0; c < counts.per_class.size(); ++c) {
            const long v = counts.per_class[c].*member;
            row[class_names[c]] = v;
            sum += static_cast<double>(v);
        }
        row["MacroAVG"] = k > 0 ? sum / k : 0.0;
        row["MicroAVG"] = k > 0 ? sum / k : 0.0;
        return row;
    };
    auto score_row = [&](double Scores::*member) {
        json row = json::object();
        for (std::size_t c = 0; c < summary.per_class.size(); ++c) row[class_names[c]] = summary.per_class[c].*member;
        row["MacroAVG"] = summary.macro.*member;
        row["MicroAVG"] = summary.micro.*member;
        return row;
    };

    json rows = json::object();
    rows["true_positive"] = count_row(&ClassCounts::tp);
    rows["false_positive"] = count_row(&ClassCounts::fp);
    rows["false_negative"] = count_row(&ClassCounts::fn);
    rows["true_negative"] = count_row(&ClassCounts::tn);
    rows["precision"] = score_row(&Scores::precision);
    rows["sensitivity"] = score_row(&Scores::recall);
    rows["specificity"] = score_row(&Scores::specificity);
    rows["accuracy"] = score_row(&Scores::accuracy);
    rows["f_measure"] = score_row(&Scores::f1);

    return json{{"columns", columns},
                {"rows", rows},
                {"samples", counts.total},
                {"macro_f1", summary.macro.f1},
                {"micro_f1", summary.micro.f1},
                {"micro_accuracy", summary.micro.accuracy}};
}

} // namespace matchflow::metrics
