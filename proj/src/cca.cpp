#include "mvcca/cca.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace mvcca {

namespace {

constexpr char kCcatMagic[6] = {'C', 'C', 'A', 'T', '1', '\0'};

struct CenteredPair {
    Eigen::MatrixXd x;        // centered copies
    Eigen::MatrixXd y;
    Eigen::VectorXd x_mean;
    Eigen::VectorXd y_mean;
};

CenteredPair center_pair(const FeatureSet& x, const FeatureSet& y) {
    if (x.n() != y.n())
        throw DimensionError("views disagree on sample count: " + std::to_string(x.n()) +
                             " vs " + std::to_string(y.n()));
    CenteredPair out;
    out.x_mean = x.matrix.data.rowwise().mean();
    out.y_mean = y.matrix.data.rowwise().mean();
    out.x = x.matrix.data.colwise() - out.x_mean;
    out.y = y.matrix.data.colwise() - out.y_mean;
    return out;
}

CovarianceBlocks blocks_from_centered(const Eigen::MatrixXd& xc,
                                      const Eigen::MatrixXd& yc) {
    const double denom = static_cast<double>(xc.cols() - 1);
    CovarianceBlocks blocks;
    blocks.vxx = (xc * xc.transpose()) / denom;
    blocks.vyy = (yc * yc.transpose()) / denom;
    blocks.vxy = (xc * yc.transpose()) / denom;
    blocks.vyx = blocks.vxy.transpose();
    blocks.n = xc.cols();
    // Exact symmetry of the auto blocks; the products are symmetric only up
    // to rounding.
    blocks.vxx = ((blocks.vxx + blocks.vxx.transpose()) / 2.0).eval();
    blocks.vyy = ((blocks.vyy + blocks.vyy.transpose()) / 2.0).eval();
    return blocks;
}

/// Symmetric inverse square root via eigendecomposition. Throws
/// SingularError when the matrix is singular to working precision.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& v, const char* which) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v);
    if (eig.info() != Eigen::Success)
        throw SingularError(std::string(which) + " eigendecomposition failed");
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double lambda_max = lambda(lambda.size() - 1);
    const double tol = static_cast<double>(v.rows()) *
                       std::numeric_limits<double>::epsilon() * std::max(lambda_max, 0.0);
    Eigen::VectorXd inv_sqrt(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) <= tol)
            throw SingularError(std::string(which) +
                                " covariance block is singular; use ridge_rel > 0");
        inv_sqrt(i) = 1.0 / std::sqrt(lambda(i));
    }
    return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

} // namespace

FuseMode fuse_mode_from_string(const std::string& s) {
    if (s == "sum") return FuseMode::sum;
    if (s == "concat") return FuseMode::concat;
    throw ConfigError("unknown fuse mode '" + s + "' (expected sum or concat)");
}

const char* fuse_mode_name(FuseMode mode) {
    return mode == FuseMode::sum ? "sum" : "concat";
}

CovarianceBlocks covariance_blocks(const FeatureSet& x, const FeatureSet& y) {
    if (x.n() != y.n())
        throw DimensionError("covariance_blocks: sample counts differ");
    if (x.n() < 2)
        throw DegenerateError("covariance needs at least 2 samples");
    if (x.centered && y.centered)
        return blocks_from_centered(x.matrix.data, y.matrix.data);
    const FeatureSet xc = center_samples(x);
    const FeatureSet yc = center_samples(y);
    return blocks_from_centered(xc.matrix.data, yc.matrix.data);
}

CcaTransform fit_cca(const FeatureSet& x, const FeatureSet& y, double ridge_rel) {
    if (x.n() != y.n())
        throw DimensionError("fit_cca: sample counts differ");
    const Eigen::Index n = x.n();
    if (n < 3)
        throw DegenerateError("fit_cca needs at least 3 samples");
    if (ridge_rel < 0.0)
        throw RangeError("ridge_rel must be nonnegative");
    require_finite(x.matrix.data, "fit_cca x");
    require_finite(y.matrix.data, "fit_cca y");

    CenteredPair c = center_pair(x, y);
    CovarianceBlocks blocks = blocks_from_centered(c.x, c.y);

    Eigen::MatrixXd vxx_reg = blocks.vxx;
    Eigen::MatrixXd vyy_reg = blocks.vyy;
    if (ridge_rel > 0.0) {
        vxx_reg.diagonal().array() += ridge_rel * blocks.vxx.diagonal().mean();
        vyy_reg.diagonal().array() += ridge_rel * blocks.vyy.diagonal().mean();
    }

    const Eigen::MatrixXd rx = inverse_sqrt(vxx_reg, "x");
    const Eigen::MatrixXd ry = inverse_sqrt(vyy_reg, "y");

    const Eigen::MatrixXd t = rx * blocks.vxy * ry;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();

    // Effective rank: singular values above the numerical tolerance, further
    // capped by n-1 (centered data cannot carry more directions).
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    const double tol = static_cast<double>(std::max(t.rows(), t.cols())) *
                       std::numeric_limits<double>::epsilon() * sigma_max;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > tol) ++r;
    r = std::min(r, n - 1);
    if (r == 0)
        throw DegenerateError("fit_cca: views share no correlated directions");

    CcaTransform out;
    out.a = rx * svd.matrixU().leftCols(r);
    out.b = ry * svd.matrixV().leftCols(r);
    out.gamma = sigma.head(r).cwiseMin(1.0).cwiseMax(0.0);
    out.r = r;
    out.x_mean = std::move(c.x_mean);
    out.y_mean = std::move(c.y_mean);
    out.ridge = ridge_rel;

    // Rescale to unit training variance against the unridged covariance so
    // the identity blocks of the projected structure hold literally.
    for (Eigen::Index j = 0; j < r; ++j) {
        const double var_x = out.a.col(j).dot(blocks.vxx * out.a.col(j));
        const double var_y = out.b.col(j).dot(blocks.vyy * out.b.col(j));
        if (var_x > 0.0) out.a.col(j) /= std::sqrt(var_x);
        if (var_y > 0.0) out.b.col(j) /= std::sqrt(var_y);
    }

    // Deterministic signs: largest-magnitude entry of each a column positive,
    // then b oriented so the training cross-covariance is nonnegative.
    for (Eigen::Index j = 0; j < r; ++j) {
        Eigen::Index argmax = 0;
        out.a.col(j).cwiseAbs().maxCoeff(&argmax);
        if (out.a(argmax, j) < 0.0) out.a.col(j) = -out.a.col(j);
        const double cross = out.a.col(j).dot(blocks.vxy * out.b.col(j));
        if (cross < 0.0) out.b.col(j) = -out.b.col(j);
    }
    return out;
}

CanonicalVariates project(const CcaTransform& t, const FeatureMatrix& x,
                          const FeatureMatrix& y) {
    if (t.r == 0)
        throw UnfittedError("project: transform is not fitted");
    if (x.p() != t.p() || y.p() != t.q())
        throw DimensionError("project: feature dimensions do not match the transform");
    if (x.n() != y.n())
        throw DimensionError("project: sample counts differ");
    CanonicalVariates out;
    out.xstar = t.a.transpose() * (x.data.colwise() - t.x_mean);
    out.ystar = t.b.transpose() * (y.data.colwise() - t.y_mean);
    return out;
}

FusedFeatures fuse_sum(const CanonicalVariates& v) {
    if (v.xstar.rows() != v.ystar.rows() || v.xstar.cols() != v.ystar.cols())
        throw DimensionError("fuse_sum: variate shapes differ");
    return FusedFeatures{v.xstar + v.ystar, FuseMode::sum};
}

FusedFeatures fuse_concat(const CanonicalVariates& v) {
    if (v.xstar.cols() != v.ystar.cols())
        throw DimensionError("fuse_concat: column counts differ");
    Eigen::MatrixXd stacked(v.xstar.rows() + v.ystar.rows(), v.xstar.cols());
    stacked.topRows(v.xstar.rows()) = v.xstar;
    stacked.bottomRows(v.ystar.rows()) = v.ystar;
    return FusedFeatures{std::move(stacked), FuseMode::concat};
}

FusedFeatures fuse(const CanonicalVariates& v, FuseMode mode) {
    return mode == FuseMode::sum ? fuse_sum(v) : fuse_concat(v);
}

namespace {

void write_field(std::ostream& out, const std::string& bytes) {
    std::uint64_t len = bytes.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_field(std::istream& in) {
    std::uint64_t len = 0;
    if (!in.read(reinterpret_cast<char*>(&len), 8))
        throw ParseError("container field truncated");
    if (len > (1ull << 34))
        throw ParseError("container field implausibly large");
    std::string bytes(len, '\0');
    if (len && !in.read(bytes.data(), static_cast<std::streamsize>(len)))
        throw ParseError("container field payload truncated");
    return bytes;
}

std::string fmat_bytes(const Eigen::MatrixXd& m) {
    std::ostringstream ss(std::ios::binary);
    write_fmat(ss, m);
    return ss.str();
}

Eigen::MatrixXd fmat_from_bytes(const std::string& bytes) {
    std::istringstream ss(bytes, std::ios::binary);
    return read_fmat(ss);
}

Eigen::VectorXd vector_from_bytes(const std::string& bytes, const char* what) {
    Eigen::MatrixXd m = fmat_from_bytes(bytes);
    if (m.cols() != 1)
        throw ParseError(std::string("CCAT1 field ") + what + " is not a column vector");
    return m.col(0);
}

std::string f64_bytes(double v) {
    return std::string(reinterpret_cast<const char*>(&v), 8);
}

std::string u64_bytes(std::uint64_t v) {
    return std::string(reinterpret_cast<const char*>(&v), 8);
}

} // namespace

void write_cca(std::ostream& out, const CcaTransform& t) {
    out.write(kCcatMagic, sizeof(kCcatMagic));
    write_field(out, fmat_bytes(t.a));
    write_field(out, fmat_bytes(t.b));
    write_field(out, fmat_bytes(t.gamma));
    write_field(out, fmat_bytes(t.x_mean));
    write_field(out, fmat_bytes(t.y_mean));
    write_field(out, f64_bytes(t.ridge));
    write_field(out, u64_bytes(static_cast<std::uint64_t>(t.r)));
}

CcaTransform read_cca(std::istream& in) {
    char magic[sizeof(kCcatMagic)] = {};
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCcatMagic, sizeof(magic)) != 0)
        throw ParseError("missing CCAT1 magic");
    CcaTransform t;
    t.a = fmat_from_bytes(read_field(in));
    t.b = fmat_from_bytes(read_field(in));
    t.gamma = vector_from_bytes(read_field(in), "gamma");
    t.x_mean = vector_from_bytes(read_field(in), "x_mean");
    t.y_mean = vector_from_bytes(read_field(in), "y_mean");
    std::string ridge = read_field(in);
    std::string r = read_field(in);
    if (ridge.size() != 8 || r.size() != 8)
        throw ParseError("CCAT1 scalar field has wrong width");
    std::memcpy(&t.ridge, ridge.data(), 8);
    std::uint64_t rank = 0;
    std::memcpy(&rank, r.data(), 8);
    t.r = static_cast<Eigen::Index>(rank);
    if (t.a.cols() != t.r || t.b.cols() != t.r || t.gamma.rows() != t.r)
        throw ParseError("CCAT1 rank disagrees with stored matrices");
    return t;
}

void save_cca(const CcaTransform& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    write_cca(out, t);
    if (!out.flush())
        throw IoError("write to '" + path + "' failed");
}

CcaTransform load_cca(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    return read_cca(in);
}

} // namespace mvcca
