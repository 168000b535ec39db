#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "mvcca/errors.hpp"

namespace mvcca {

/// C x C counts; rows are actual classes, columns are predicted classes.
struct ConfusionMatrix {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
    std::int64_t n_total = 0;

    int classes() const { return static_cast<int>(counts.rows()); }
};

/// Per-class one-vs-rest metrics. single_accuracy equals sensitivity;
/// total_accuracy = TP/n_total so the column sums to the overall accuracy;
/// error_total = FP/n_total as its dual. A 0/0 denominator yields 0 with
/// `degenerate` set.
struct ClassMetrics {
    double single_accuracy = 0.0;
    double error_single = 0.0;
    double total_accuracy = 0.0;
    double error_total = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double precision = 0.0;
    double fpr = 0.0;
    bool degenerate = false;
};

/// Overall row: accuracy = trace/n; the other four are unweighted (macro)
/// means of the per-class columns.
struct OverallMetrics {
    double accuracy = 0.0;
    double error = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double precision = 0.0;
    double fpr = 0.0;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& actual,
                                 const std::vector<int>& predicted, int class_count);

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm);

OverallMetrics overall_metrics(const ConfusionMatrix& cm);

/// Aggregates already-computed per-class rows: macro means for the four
/// rate columns, accuracy as the sum of the total_accuracy column.
OverallMetrics overall_from_per_class(const std::vector<ClassMetrics>& per_class);

struct MetricsReport {
    std::vector<std::string> class_names;
    std::vector<ClassMetrics> per_class;
    OverallMetrics overall;
};

MetricsReport report(const ConfusionMatrix& cm, const std::vector<std::string>& class_names);
MetricsReport report(const ConfusionMatrix& cm);   // names default to "class0".."classN"

/// CSV schema: header class,single_accuracy,error_single,total_accuracy,
/// error_total,sensitivity,specificity,precision,fpr; one row per class and
/// a terminal OVERALL row (accuracy/error fill the accuracy columns, macro
/// means the rest). Values print with 17 significant digits so a re-parse is
/// bit-exact.
std::string report_csv(const MetricsReport& rep);
std::string report_text(const MetricsReport& rep);
void save_report_csv(const MetricsReport& rep, const std::string& path);
void save_report_text(const MetricsReport& rep, const std::string& path);
MetricsReport parse_report_csv(const std::string& csv);

} // namespace mvcca
