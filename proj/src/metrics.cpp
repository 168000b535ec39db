#include "mvcca/metrics.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mvcca {

namespace {

// 0/0 -> 0 with the degenerate flag; the balanced tasks never hit this.
double ratio(std::int64_t num, std::int64_t den, bool& degenerate) {
    if (den == 0) {
        degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ConfusionMatrix confusion_matrix(const std::vector<int>& actual,
                                 const std::vector<int>& predicted, int class_count) {
    if (actual.size() != predicted.size())
        throw DimensionError("confusion_matrix: label vectors differ in length");
    if (class_count < 1)
        throw ConfigError("confusion_matrix: class_count must be positive");
    ConfusionMatrix cm;
    cm.counts.setZero(class_count, class_count);
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const int a = actual[i];
        const int p = predicted[i];
        if (a < 0 || a >= class_count)
            throw LabelError("actual label " + std::to_string(a) + " outside 0.." +
                             std::to_string(class_count - 1));
        if (p < 0 || p >= class_count)
            throw LabelError("predicted label " + std::to_string(p) + " outside 0.." +
                             std::to_string(class_count - 1));
        ++cm.counts(a, p);
    }
    cm.n_total = static_cast<std::int64_t>(actual.size());
    return cm;
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm) {
    if (cm.n_total <= 0)
        throw EmptyError("per_class_metrics: empty confusion matrix");
    const int c_count = cm.classes();
    std::vector<ClassMetrics> out(static_cast<std::size_t>(c_count));
    for (int c = 0; c < c_count; ++c) {
        const std::int64_t tp = cm.counts(c, c);
        const std::int64_t fn = cm.counts.row(c).sum() - tp;
        const std::int64_t fp = cm.counts.col(c).sum() - tp;
        const std::int64_t tn = cm.n_total - tp - fn - fp;
        ClassMetrics& m = out[static_cast<std::size_t>(c)];
        m.sensitivity = ratio(tp, tp + fn, m.degenerate);
        m.specificity = ratio(tn, tn + fp, m.degenerate);
        m.precision = ratio(tp, tp + fp, m.degenerate);
        m.fpr = ratio(fp, fp + tn, m.degenerate);
        m.single_accuracy = m.sensitivity;
        m.error_single = 1.0 - m.single_accuracy;
        m.total_accuracy = static_cast<double>(tp) / static_cast<double>(cm.n_total);
        m.error_total = static_cast<double>(fp) / static_cast<double>(cm.n_total);
    }
    return out;
}

OverallMetrics overall_from_per_class(const std::vector<ClassMetrics>& per_class) {
    if (per_class.empty())
        throw EmptyError("overall_from_per_class: no classes");
    OverallMetrics o;
    for (const ClassMetrics& m : per_class) {
        o.accuracy += m.total_accuracy;
        o.sensitivity += m.sensitivity;
        o.specificity += m.specificity;
        o.precision += m.precision;
        o.fpr += m.fpr;
    }
    const double c = static_cast<double>(per_class.size());
    o.sensitivity /= c;
    o.specificity /= c;
    o.precision /= c;
    o.fpr /= c;
    o.error = 1.0 - o.accuracy;
    return o;
}

OverallMetrics overall_metrics(const ConfusionMatrix& cm) {
    OverallMetrics o = overall_from_per_class(per_class_metrics(cm));
    // trace/n directly rather than the per-class sum, so the headline number
    // is a single rounding step.
    o.accuracy = static_cast<double>(cm.counts.trace()) / static_cast<double>(cm.n_total);
    o.error = 1.0 - o.accuracy;
    return o;
}

MetricsReport report(const ConfusionMatrix& cm, const std::vector<std::string>& class_names) {
    if (static_cast<int>(class_names.size()) != cm.classes())
        throw DimensionError("report: expected " + std::to_string(cm.classes()) +
                             " class names, got " + std::to_string(class_names.size()));
    MetricsReport rep;
    rep.class_names = class_names;
    rep.per_class = per_class_metrics(cm);
    rep.overall = overall_metrics(cm);
    return rep;
}

MetricsReport report(const ConfusionMatrix& cm) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(cm.classes()));
    for (int c = 0; c < cm.classes(); ++c)
        names.push_back("class" + std::to_string(c));
    return report(cm, names);
}

static const char* kReportHeader =
    "class,single_accuracy,error_single,total_accuracy,error_total,"
    "sensitivity,specificity,precision,fpr";

std::string report_csv(const MetricsReport& rep) {
    std::ostringstream out;
    out << kReportHeader << '\n';
    for (std::size_t i = 0; i < rep.per_class.size(); ++i) {
        const ClassMetrics& m = rep.per_class[i];
        out << rep.class_names[i] << ',' << format17(m.single_accuracy) << ','
            << format17(m.error_single) << ',' << format17(m.total_accuracy) << ','
            << format17(m.error_total) << ',' << format17(m.sensitivity) << ','
            << format17(m.specificity) << ',' << format17(m.precision) << ','
            << format17(m.fpr) << '\n';
    }
    const OverallMetrics& o = rep.overall;
    out << "OVERALL," << format17(o.accuracy) << ',' << format17(o.error) << ','
        << format17(o.accuracy) << ',' << format17(o.error) << ','
        << format17(o.sensitivity) << ',' << format17(o.specificity) << ','
        << format17(o.precision) << ',' << format17(o.fpr) << '\n';
    return out.str();
}

std::string report_text(const MetricsReport& rep) {
    static const char* cols[] = {"single_acc", "err_single", "total_acc", "err_total",
                                 "sensitivity", "specificity", "precision", "fpr"};
    std::size_t name_width = 7;   // "OVERALL"
    for (const std::string& n : rep.class_names)
        name_width = std::max(name_width, n.size());

    std::ostringstream out;
    char buf[64];
    out << std::string(name_width, ' ');
    for (const char* c : cols) {
        std::snprintf(buf, sizeof(buf), "  %12s", c);
        out << buf;
    }
    out << '\n';
    auto row = [&](const std::string& name, const double* vals) {
        out << name << std::string(name_width - name.size(), ' ');
        for (int i = 0; i < 8; ++i) {
            std::snprintf(buf, sizeof(buf), "  %12.6g", vals[i]);
            out << buf;
        }
        out << '\n';
    };
    for (std::size_t i = 0; i < rep.per_class.size(); ++i) {
        const ClassMetrics& m = rep.per_class[i];
        const double vals[8] = {m.single_accuracy, m.error_single, m.total_accuracy,
                                m.error_total, m.sensitivity, m.specificity,
                                m.precision, m.fpr};
        row(rep.class_names[i], vals);
    }
    const OverallMetrics& o = rep.overall;
    const double vals[8] = {o.accuracy, o.error, o.accuracy, o.error,
                            o.sensitivity, o.specificity, o.precision, o.fpr};
    row("OVERALL", vals);
    return out.str();
}

namespace {

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out.flush())
        throw IoError("write to '" + path + "' failed");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_f64(const std::string& s) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw ParseError("bad numeric field '" + s + "' in report CSV");
    return v;
}

} // namespace

void save_report_csv(const MetricsReport& rep, const std::string& path) {
    write_text_file(report_csv(rep), path);
}

void save_report_text(const MetricsReport& rep, const std::string& path) {
    write_text_file(report_text(rep), path);
}

MetricsReport parse_report_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != kReportHeader)
        throw ParseError("report CSV header mismatch");
    MetricsReport rep;
    bool saw_overall = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (saw_overall)
            throw ParseError("report CSV has rows after OVERALL");
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 9)
            throw ParseError("report CSV row has " + std::to_string(f.size()) +
                             " fields, expected 9");
        if (f[0] == "OVERALL") {
            rep.overall.accuracy = parse_f64(f[1]);
            rep.overall.error = parse_f64(f[2]);
            rep.overall.sensitivity = parse_f64(f[5]);
            rep.overall.specificity = parse_f64(f[6]);
            rep.overall.precision = parse_f64(f[7]);
            rep.overall.fpr = parse_f64(f[8]);
            saw_overall = true;
            continue;
        }
        ClassMetrics m;
        m.single_accuracy = parse_f64(f[1]);
        m.error_single = parse_f64(f[2]);
        m.total_accuracy = parse_f64(f[3]);
        m.error_total = parse_f64(f[4]);
        m.sensitivity = parse_f64(f[5]);
        m.specificity = parse_f64(f[6]);
        m.precision = parse_f64(f[7]);
        m.fpr = parse_f64(f[8]);
        rep.class_names.push_back(f[0]);
        rep.per_class.push_back(m);
    }
    if (!saw_overall)
        throw ParseError("report CSV is missing the OVERALL row");
    return rep;
}

} // namespace mvcca
