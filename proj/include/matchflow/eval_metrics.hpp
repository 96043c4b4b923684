#pragma once

// One-vs-rest confusion statistics, macro/micro F1 and ROC/AUC for
// single-label multiclass predictions. Classes are integer indices.

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace matchflow::metrics {

struct ClassCounts {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    long tn = 0;

    bool operator==(const ClassCounts&) const = default;
};

struct ConfusionCounts {
    int n_classes = 0;
    long total = 0;
    std::vector<ClassCounts> per_class;

    long correct() const noexcept;
};

// Throws Error(Shape) on length mismatch and Error(Domain) on labels outside [0, n_classes).
ConfusionCounts confusion(std::span<const int> truth, std::span<const int> pred, int n_classes);

struct Scores {
    double precision = 0.0;
    double recall = 0.0; // sensitivity
    double specificity = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
};

struct SummaryMetrics {
    std::vector<Scores> per_class;
    Scores macro; // mean of per-class P and R, then the F1 formula on those means
    Scores micro; // pooled counts; micro accuracy is the multiclass accuracy
};

// 0/0 ratios are taken as 0.
double safe_ratio(double num, double den) noexcept;
double f1_score(double precision, double recall) noexcept;

SummaryMetrics summary_metrics(const ConfusionCounts& counts);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<double> thresholds; // descending; thresholds[i] produces points[i + 1]
    std::vector<RocPoint> points;   // (0,0) first, (1,1) last
    double auc = 0.0;
};

// Equal scores form a single threshold step. Throws Error(UndefinedRoc) when
// either the positive or the negative class is absent.
RocCurve roc_auc(std::span<const int> truth, std::span<const double> scores, int positive);

std::string roc_csv(const RocCurve& curve);

// Table layout: rows are evaluation indices, columns are classes then MacroAVG/MicroAVG.
nlohmann::json metrics_report(const ConfusionCounts& counts, const SummaryMetrics& summary,
                              const std::vector<std::string>& class_names);

} // namespace matchflow::metrics
