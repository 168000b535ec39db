#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mvcca/errors.hpp"

namespace mvcca {

/// One view's feature matrix: rows are feature dimensions, columns are
/// samples (p x n). All entries must be finite.
struct FeatureMatrix {
    Eigen::MatrixXd data;

    FeatureMatrix() = default;
    explicit FeatureMatrix(Eigen::MatrixXd m) : data(std::move(m)) {}

    Eigen::Index p() const { return data.rows(); }
    Eigen::Index n() const { return data.cols(); }
};

/// A named feature matrix together with its centering state. After
/// center_samples() the `mean` field holds the subtracted per-feature
/// training means so test-time data can be shifted into the same frame.
struct FeatureSet {
    FeatureMatrix matrix;
    std::string name;
    Eigen::VectorXd mean;     // length p once centered
    bool centered = false;

    FeatureSet() = default;
    FeatureSet(FeatureMatrix m, std::string set_name)
        : matrix(std::move(m)), name(std::move(set_name)) {}

    Eigen::Index p() const { return matrix.p(); }
    Eigen::Index n() const { return matrix.n(); }
};

/// Multiple views over the same samples, plus integer labels in 0..C-1.
struct LabeledDataset {
    std::vector<FeatureSet> views;
    std::vector<int> labels;
    int class_count = 0;

    Eigen::Index n() const {
        return views.empty() ? 0 : views.front().n();
    }
    void validate() const;
};

enum class MatrixFormat { csv, fmat };

MatrixFormat matrix_format_from_string(const std::string& s);

/// Reads a matrix from disk. CSV: one row per line, comma separated, '.'
/// decimal, no header. fmat: "FMAT1\0" magic, u64 p, u64 n (little-endian),
/// then p*n float64 values in row-major order.
FeatureMatrix load_matrix(const std::string& path, MatrixFormat format);
void save_matrix(const FeatureMatrix& m, const std::string& path, MatrixFormat format);

/// Stream-level fmat codec, reused by the container formats (CCAT1/MCCA1/SVMM1).
void write_fmat(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_fmat(std::istream& in);

/// Labels: one integer per line.
std::vector<int> load_labels(const std::string& path);
void save_labels(const std::vector<int>& labels, const std::string& path);

/// Returns a copy with per-feature means subtracted and recorded. A set that
/// is already centered is returned unchanged, keeping the original means.
FeatureSet center_samples(const FeatureSet& fs);

/// Count of singular values above tol. Negative tol selects the automatic
/// tolerance max(p, n) * eps * sigma_max.
Eigen::Index numerical_rank(const FeatureMatrix& m, double tol = -1.0);

/// Throws DataError if any entry is non-finite.
void require_finite(const Eigen::MatrixXd& m, const std::string& what);

/// Dataset manifest: plain-text key=value lines with repeated `view=` entries
/// (in view order), one `labels=` entry and `class_count=`. Relative paths
/// resolve against the manifest's directory. View names come from the file
/// stem with the `view_` prefix (added by save_dataset) removed, so names
/// survive a save/load round trip.
LabeledDataset load_dataset(const std::string& manifest_path);
void save_dataset(const LabeledDataset& ds, const std::string& dir,
                  const std::string& manifest_name = "manifest.txt");

} // namespace mvcca
