#pragma once

#include <Eigen/Dense>

#include <string>

#include "mvcca/matrixio.hpp"

namespace mvcca {

/// Covariance structure of a view pair, unbiased 1/(n-1) normalization.
/// vyx is stored as the exact transpose of vxy.
struct CovarianceBlocks {
    Eigen::MatrixXd vxx;   // p x p
    Eigen::MatrixXd vyy;   // q x q
    Eigen::MatrixXd vxy;   // p x q
    Eigen::MatrixXd vyx;   // q x p
    Eigen::Index n = 0;
};

/// A fitted two-view canonical correlation transform.
///
/// Columns of `a` and `b` project the centered views onto canonical variates
/// with unit training variance; `gamma` holds the canonical correlations in
/// non-increasing order, clipped to [0, 1]. `x_mean`/`y_mean` are the training
/// means subtracted before projection, so the transform can be replayed on
/// held-out data.
struct CcaTransform {
    Eigen::MatrixXd a;        // p x r
    Eigen::MatrixXd b;        // q x r
    Eigen::VectorXd gamma;    // length r, non-increasing, in [0, 1]
    Eigen::Index r = 0;
    Eigen::VectorXd x_mean;   // length p
    Eigen::VectorXd y_mean;   // length q
    double ridge = 0.0;

    Eigen::Index p() const { return a.rows(); }
    Eigen::Index q() const { return b.rows(); }
};

struct CanonicalVariates {
    Eigen::MatrixXd xstar;  // r x n
    Eigen::MatrixXd ystar;  // r x n
};

enum class FuseMode { sum, concat };

FuseMode fuse_mode_from_string(const std::string& s);
const char* fuse_mode_name(FuseMode mode);

struct FusedFeatures {
    Eigen::MatrixXd data;   // r x n (sum) or (r1+r2) x n (concat)
    FuseMode mode = FuseMode::sum;
};

/// Cross- and auto-covariance blocks of two views sharing n samples. Views
/// flagged as centered are used as-is; otherwise centering happens internally.
CovarianceBlocks covariance_blocks(const FeatureSet& x, const FeatureSet& y);

/// Fits CCA through the whitened formulation: with Rx = Vxx^{-1/2} and
/// Ry = Vyy^{-1/2} (symmetric inverse square roots), the singular value
/// decomposition T = Rx Vxy Ry = U S W^T yields gamma = diag(S),
/// a = Rx U and b = Ry W. This diagonalizes the same product matrices as the
/// two-sided eigenvalue formulation but stays symmetric and well conditioned.
///
/// ridge_rel > 0 adds ridge_rel * mean(diag(V)) * I to each auto-covariance
/// block before inversion, which keeps the fit defined when p or q exceeds n.
/// With ridge_rel = 0 an exactly singular block raises SingularError.
CcaTransform fit_cca(const FeatureSet& x, const FeatureSet& y, double ridge_rel = 1e-4);

/// Projects raw (uncentered) matrices through a fitted transform:
/// xstar = a^T (x - x_mean 1^T), ystar = b^T (y - y_mean 1^T).
CanonicalVariates project(const CcaTransform& t, const FeatureMatrix& x,
                          const FeatureMatrix& y);

FusedFeatures fuse_sum(const CanonicalVariates& v);
FusedFeatures fuse_concat(const CanonicalVariates& v);
FusedFeatures fuse(const CanonicalVariates& v, FuseMode mode);

/// CCAT1 container serialization.
void save_cca(const CcaTransform& t, const std::string& path);
CcaTransform load_cca(const std::string& path);
void write_cca(std::ostream& out, const CcaTransform& t);
CcaTransform read_cca(std::istream& in);

} // namespace mvcca
