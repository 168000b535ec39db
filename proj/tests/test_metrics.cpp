#include <doctest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include "mvcca/metrics.hpp"
#include "mvcca/rng.hpp"
#include "tempdir.hpp"

using namespace mvcca;
using testutil::TempDir;

TEST_CASE("confusion matrix counts agree with a scalar loop") {
    Rng rng(11);
    const int C = 4;
    std::vector<int> actual(1000), predicted(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
        actual[i] = static_cast<int>(rng.bounded(C));
        predicted[i] = static_cast<int>(rng.bounded(C));
    }
    const ConfusionMatrix cm = confusion_matrix(actual, predicted, C);
    CHECK(cm.n_total == 1000);
    for (int i = 0; i < C; ++i)
        for (int j = 0; j < C; ++j) {
            std::int64_t count = 0;
            for (std::size_t k = 0; k < 1000; ++k)
                if (actual[k] == i && predicted[k] == j) ++count;
            CHECK(cm.counts(i, j) == count);
        }
}

TEST_CASE("confusion matrix places actual on rows, predicted on columns") {
    const ConfusionMatrix diag = confusion_matrix({0, 1, 2}, {0, 1, 2}, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(diag.counts(i, j) == (i == j ? 1 : 0));

    const ConfusionMatrix off = confusion_matrix({0, 0}, {1, 1}, 2);
    CHECK(off.counts(0, 1) == 2);
    CHECK(off.counts(0, 0) == 0);
    CHECK(off.counts(1, 0) == 0);
    CHECK(off.counts(1, 1) == 0);
}

TEST_CASE("confusion matrix contract errors") {
    CHECK_THROWS_AS(confusion_matrix({0, 1}, {0}, 2), DimensionError);
    CHECK_THROWS_AS(confusion_matrix({0, 2}, {0, 1}, 2), LabelError);
    CHECK_THROWS_AS(confusion_matrix({0, -1}, {0, 1}, 2), LabelError);
    CHECK_THROWS_AS(confusion_matrix({0, 1}, {0, 1}, 0), ConfigError);
}

TEST_CASE("binary hand example reproduces every column") {
    // counts [[9,1],[0,10]]: class 0 has TP=9 FN=1 FP=0 TN=10;
    // class 1 has TP=10 FN=0 FP=1 TN=9.
    ConfusionMatrix cm;
    cm.counts.resize(2, 2);
    cm.counts << 9, 1, 0, 10;
    cm.n_total = 20;
    const std::vector<ClassMetrics> rows = per_class_metrics(cm);
    REQUIRE(rows.size() == 2);

    CHECK(rows[0].sensitivity == doctest::Approx(0.9));
    CHECK(rows[0].precision == doctest::Approx(1.0));
    CHECK(rows[0].specificity == doctest::Approx(1.0));
    CHECK(rows[0].fpr == doctest::Approx(0.0));
    CHECK(rows[0].single_accuracy == doctest::Approx(0.9));
    CHECK(rows[0].error_single == doctest::Approx(0.1));
    CHECK(rows[0].total_accuracy == doctest::Approx(9.0 / 20.0));
    CHECK(rows[0].error_total == doctest::Approx(0.0));

    CHECK(rows[1].sensitivity == doctest::Approx(1.0));
    CHECK(rows[1].precision == doctest::Approx(10.0 / 11.0));
    CHECK(rows[1].specificity == doctest::Approx(0.9));
    CHECK(rows[1].fpr == doctest::Approx(0.1));
    CHECK(rows[1].total_accuracy == doctest::Approx(0.5));
    CHECK(rows[1].error_total == doctest::Approx(1.0 / 20.0));
}

TEST_CASE("perfect balanced matrix saturates every rate") {
    ConfusionMatrix cm;
    cm.counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(10, 10);
    for (int c = 0; c < 10; ++c) cm.counts(c, c) = 100;
    cm.n_total = 1000;
    for (const ClassMetrics& m : per_class_metrics(cm)) {
        CHECK(m.sensitivity == 1.0);
        CHECK(m.specificity == 1.0);
        CHECK(m.precision == 1.0);
        CHECK(m.fpr == 0.0);
        CHECK(m.total_accuracy == doctest::Approx(0.1));
        CHECK_FALSE(m.degenerate);
    }
    const OverallMetrics overall = overall_metrics(cm);
    CHECK(overall.accuracy == 1.0);
    CHECK(overall.fpr == 0.0);
}

TEST_CASE("per-class identities hold on random matrices") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const int C = 2 + static_cast<int>(rng.bounded(5));
        std::vector<int> actual, predicted;
        for (int k = 0; k < 300; ++k) {
            actual.push_back(static_cast<int>(rng.bounded(C)));
            predicted.push_back(static_cast<int>(rng.bounded(C)));
        }
        const ConfusionMatrix cm = confusion_matrix(actual, predicted, C);
        const std::vector<ClassMetrics> rows = per_class_metrics(cm);
        const OverallMetrics overall = overall_metrics(cm);

        double total_sum = 0;
        for (const ClassMetrics& m : rows) {
            CHECK(std::abs(m.single_accuracy + m.error_single - 1.0) <= 1e-12);
            CHECK(std::abs(m.fpr - (1.0 - m.specificity)) <= 1e-12);
            CHECK(m.single_accuracy == m.sensitivity);
            CHECK(m.single_accuracy >= 0.0);
            CHECK(m.single_accuracy <= 1.0);
            CHECK(m.precision >= 0.0);
            CHECK(m.precision <= 1.0);
            total_sum += m.total_accuracy;
        }
        // The total-accuracy column sums to the overall accuracy.
        CHECK(total_sum == doctest::Approx(overall.accuracy).epsilon(1e-12));
        CHECK(std::abs(overall.accuracy + overall.error - 1.0) <= 1e-12);

        // Macro means match the per-class columns.
        double sens = 0, spec = 0, prec = 0, fpr = 0;
        for (const ClassMetrics& m : rows) {
            sens += m.sensitivity;
            spec += m.specificity;
            prec += m.precision;
            fpr += m.fpr;
        }
        CHECK(overall.sensitivity == doctest::Approx(sens / C).epsilon(1e-12));
        CHECK(overall.specificity == doctest::Approx(spec / C).epsilon(1e-12));
        CHECK(overall.precision == doctest::Approx(prec / C).epsilon(1e-12));
        CHECK(overall.fpr == doctest::Approx(fpr / C).epsilon(1e-12));
    }
}

TEST_CASE("permuting class indices permutes rows and fixes the overall values") {
    const std::vector<int> actual{0, 0, 1, 1, 2, 2, 2, 0};
    const std::vector<int> predicted{0, 1, 1, 1, 2, 0, 2, 0};
    const ConfusionMatrix cm = confusion_matrix(actual, predicted, 3);

    // Swap classes 0 and 2 everywhere.
    auto swap02 = [](std::vector<int> v) {
        for (int& x : v) x = x == 0 ? 2 : (x == 2 ? 0 : x);
        return v;
    };
    const ConfusionMatrix sw = confusion_matrix(swap02(actual), swap02(predicted), 3);
    const std::vector<ClassMetrics> a = per_class_metrics(cm);
    const std::vector<ClassMetrics> b = per_class_metrics(sw);
    CHECK(a[0].sensitivity == b[2].sensitivity);
    CHECK(a[2].precision == b[0].precision);
    CHECK(a[1].fpr == b[1].fpr);

    const OverallMetrics oa = overall_metrics(cm);
    const OverallMetrics ob = overall_metrics(sw);
    CHECK(oa.accuracy == doctest::Approx(ob.accuracy).epsilon(1e-15));
    CHECK(oa.precision == doctest::Approx(ob.precision).epsilon(1e-15));
    CHECK(oa.fpr == doctest::Approx(ob.fpr).epsilon(1e-15));
}

TEST_CASE("a class that never occurs is flagged degenerate, not divided by zero") {
    // Class 2 exists in the label space but has no samples and no predictions.
    const ConfusionMatrix cm = confusion_matrix({0, 1, 0, 1}, {0, 1, 1, 1}, 3);
    const std::vector<ClassMetrics> rows = per_class_metrics(cm);
    REQUIRE(rows.size() == 3);
    CHECK(rows[2].degenerate);
    CHECK(rows[2].sensitivity == 0.0);
    CHECK(rows[2].precision == 0.0);
    CHECK(std::isfinite(rows[2].fpr));
}

TEST_CASE("empty input is rejected") {
    ConfusionMatrix cm;
    cm.counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(2, 2);
    cm.n_total = 0;
    CHECK_THROWS_AS(per_class_metrics(cm), EmptyError);
    CHECK_THROWS_AS(overall_metrics(cm), EmptyError);
    CHECK_THROWS_AS(overall_from_per_class({}), EmptyError);
}

TEST_CASE("overall_from_per_class aggregates published-style columns") {
    // Synthetic rows with known means.
    std::vector<ClassMetrics> rows(4);
    for (int c = 0; c < 4; ++c) {
        rows[static_cast<std::size_t>(c)].precision = 0.9 + 0.02 * c;
        rows[static_cast<std::size_t>(c)].fpr = 0.01 * c;
        rows[static_cast<std::size_t>(c)].sensitivity = 0.8 + 0.05 * c;
        rows[static_cast<std::size_t>(c)].specificity = 1.0 - 0.01 * c;
        rows[static_cast<std::size_t>(c)].total_accuracy = 0.2;
    }
    const OverallMetrics o = overall_from_per_class(rows);
    CHECK(o.precision == doctest::Approx(0.93));
    CHECK(o.fpr == doctest::Approx(0.015));
    CHECK(o.sensitivity == doctest::Approx(0.875));
    CHECK(o.specificity == doctest::Approx(0.985));
    CHECK(o.accuracy == doctest::Approx(0.8));
    CHECK(o.error == doctest::Approx(0.2));
}

TEST_CASE("report names default and validate") {
    const ConfusionMatrix cm = confusion_matrix({0, 1}, {0, 1}, 2);
    const MetricsReport rep = report(cm);
    CHECK(rep.class_names == std::vector<std::string>{"class0", "class1"});
    CHECK_THROWS_AS(report(cm, {"only-one"}), DimensionError);
    const MetricsReport named = report(cm, {"cat", "dog"});
    CHECK(named.class_names[1] == "dog");
}

TEST_CASE("CSV report round-trips bit-for-bit") {
    Rng rng(99);
    std::vector<int> actual, predicted;
    for (int k = 0; k < 500; ++k) {
        actual.push_back(static_cast<int>(rng.bounded(3)));
        // Mostly right, sometimes off by one class.
        predicted.push_back(rng.bounded(10) < 8
                                ? actual.back()
                                : static_cast<int>(rng.bounded(3)));
    }
    const MetricsReport rep = report(confusion_matrix(actual, predicted, 3));
    const std::string csv = report_csv(rep);
    CHECK(csv.rfind("class,single_accuracy,error_single,total_accuracy,error_total,"
                    "sensitivity,specificity,precision,fpr\n",
                    0) == 0);

    const MetricsReport back = parse_report_csv(csv);
    REQUIRE(back.per_class.size() == rep.per_class.size());
    for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
        CHECK(back.per_class[c].single_accuracy == rep.per_class[c].single_accuracy);
        CHECK(back.per_class[c].error_single == rep.per_class[c].error_single);
        CHECK(back.per_class[c].total_accuracy == rep.per_class[c].total_accuracy);
        CHECK(back.per_class[c].error_total == rep.per_class[c].error_total);
        CHECK(back.per_class[c].sensitivity == rep.per_class[c].sensitivity);
        CHECK(back.per_class[c].specificity == rep.per_class[c].specificity);
        CHECK(back.per_class[c].precision == rep.per_class[c].precision);
        CHECK(back.per_class[c].fpr == rep.per_class[c].fpr);
        CHECK(back.class_names[c] == rep.class_names[c]);
    }
    CHECK(back.overall.accuracy == rep.overall.accuracy);
    CHECK(back.overall.precision == rep.overall.precision);
    CHECK(back.overall.fpr == rep.overall.fpr);
}

TEST_CASE("CSV parser rejects malformed tables") {
    CHECK_THROWS_AS(parse_report_csv("not,a,report\n1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_report_csv(""), ParseError);
    const std::string header =
        "class,single_accuracy,error_single,total_accuracy,error_total,"
        "sensitivity,specificity,precision,fpr\n";
    CHECK_THROWS_AS(parse_report_csv(header + "a,1,0,1,0,1\n"), ParseError);
    CHECK_THROWS_AS(parse_report_csv(header + "a,1,0,1,0,1,1,1,potato\n"), ParseError);
}

TEST_CASE("text report aligns a readable table") {
    const ConfusionMatrix cm = confusion_matrix({0, 1, 1}, {0, 1, 0}, 2);
    const std::string text = report_text(report(cm, {"first", "second"}));
    CHECK(text.find("first") != std::string::npos);
    CHECK(text.find("second") != std::string::npos);
    CHECK(text.find("OVERALL") != std::string::npos);
    CHECK(text.find("sensitivity") != std::string::npos);
}

TEST_CASE("report files save and reload") {
    TempDir dir("report");
    const ConfusionMatrix cm = confusion_matrix({0, 1, 1, 0}, {0, 1, 1, 1}, 2);
    const MetricsReport rep = report(cm);
    save_report_csv(rep, dir.file("r.csv"));
    save_report_text(rep, dir.file("r.txt"));

    std::ifstream csv_in(dir.file("r.csv"));
    std::string first;
    REQUIRE(std::getline(csv_in, first));
    CHECK(first.rfind("class,", 0) == 0);

    std::ifstream txt_in(dir.file("r.txt"));
    REQUIRE(std::getline(txt_in, first));
    CHECK_FALSE(first.empty());
}
