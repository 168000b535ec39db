#include "mvcca/matrixio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace mvcca {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts are unsupported");
static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559);

namespace {

constexpr char kFmatMagic[6] = {'F', 'M', 'A', 'T', '1', '\0'};

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), 8))
        throw ParseError("unexpected end of file while reading u64");
    return v;
}

double parse_double(const std::string& token, const std::string& context) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError("malformed numeric token '" + token + "' in " + context);
    return value;
}

} // namespace

void LabeledDataset::validate() const {
    if (views.empty())
        throw EmptyError("dataset has no views");
    const Eigen::Index samples = views.front().n();
    for (const auto& v : views) {
        if (v.n() != samples)
            throw DimensionError("view '" + v.name + "' has " + std::to_string(v.n()) +
                                 " samples, expected " + std::to_string(samples));
    }
    if (static_cast<Eigen::Index>(labels.size()) != samples)
        throw DimensionError("label count " + std::to_string(labels.size()) +
                             " does not match sample count " + std::to_string(samples));
    if (class_count < 1)
        throw ConfigError("class_count must be positive");
    for (int label : labels) {
        if (label < 0 || label >= class_count)
            throw LabelError("label " + std::to_string(label) + " outside 0.." +
                             std::to_string(class_count - 1));
    }
}

MatrixFormat matrix_format_from_string(const std::string& s) {
    if (s == "csv") return MatrixFormat::csv;
    if (s == "fmat") return MatrixFormat::fmat;
    throw ConfigError("unknown matrix format '" + s + "' (expected csv or fmat)");
}

void require_finite(const Eigen::MatrixXd& m, const std::string& what) {
    if (!m.allFinite())
        throw DataError(what + " contains a NaN or Inf entry");
}

void write_fmat(std::ostream& out, const Eigen::MatrixXd& m) {
    out.write(kFmatMagic, sizeof(kFmatMagic));
    write_u64(out, static_cast<std::uint64_t>(m.rows()));
    write_u64(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v = m(i, j);
            out.write(reinterpret_cast<const char*>(&v), 8);
        }
}

Eigen::MatrixXd read_fmat(std::istream& in) {
    char magic[sizeof(kFmatMagic)] = {};
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kFmatMagic, sizeof(magic)) != 0)
        throw ParseError("missing FMAT1 magic");
    const std::uint64_t p = read_u64(in);
    const std::uint64_t n = read_u64(in);
    if (p == 0 || n == 0)
        throw DimensionError("fmat dimensions must be positive");
    if (p > (1ull << 32) || n > (1ull << 32) || p * n > (1ull << 34))
        throw ParseError("fmat dimensions implausibly large");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v;
            if (!in.read(reinterpret_cast<char*>(&v), 8))
                throw ParseError("fmat payload truncated");
            m(i, j) = v;
        }
    return m;
}

namespace {

Eigen::MatrixXd load_csv_matrix(std::istream& in, const std::string& path) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string token;
        while (std::getline(ss, token, ','))
            row.push_back(parse_double(token, path + ":" + std::to_string(line_no)));
        if (line.back() == ',')
            throw ParseError("trailing comma in " + path + ":" + std::to_string(line_no));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DimensionError("inconsistent row length in " + path + ":" +
                                 std::to_string(line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty())
        throw ParseError("empty CSV matrix in " + path);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

} // namespace

FeatureMatrix load_matrix(const std::string& path, MatrixFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    Eigen::MatrixXd m = (format == MatrixFormat::csv) ? load_csv_matrix(in, path)
                                                      : read_fmat(in);
    require_finite(m, "matrix '" + path + "'");
    return FeatureMatrix(std::move(m));
}

void save_matrix(const FeatureMatrix& m, const std::string& path, MatrixFormat format) {
    if (path.empty())
        throw IoError("empty output path");
    if (m.p() < 1 || m.n() < 1)
        throw DimensionError("cannot save an empty matrix");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    if (format == MatrixFormat::fmat) {
        write_fmat(out, m.data);
    } else {
        char buf[64];
        for (Eigen::Index i = 0; i < m.p(); ++i) {
            for (Eigen::Index j = 0; j < m.n(); ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", m.data(i, j));
                if (j) out << ',';
                out << buf;
            }
            out << '\n';
        }
    }
    out.flush();
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

std::vector<int> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open labels file '" + path + "'");
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        int value = 0;
        auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
        if (ec != std::errc() || ptr != line.data() + line.size())
            throw ParseError("malformed label in " + path + ":" + std::to_string(line_no));
        labels.push_back(value);
    }
    return labels;
}

void save_labels(const std::vector<int>& labels, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    for (int label : labels)
        out << label << '\n';
    if (!out.flush())
        throw IoError("write to '" + path + "' failed");
}

FeatureSet center_samples(const FeatureSet& fs) {
    if (fs.n() < 1)
        throw DimensionError("cannot center an empty feature set");
    if (fs.centered)
        return fs;
    FeatureSet out = fs;
    out.mean = fs.matrix.data.rowwise().mean();
    out.matrix.data = fs.matrix.data.colwise() - out.mean;
    out.centered = true;
    return out;
}

Eigen::Index numerical_rank(const FeatureMatrix& m, double tol) {
    require_finite(m.data, "rank input");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m.data);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    if (tol < 0.0) {
        tol = static_cast<double>(std::max(m.p(), m.n())) *
              std::numeric_limits<double>::epsilon() * sv(0);
    }
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    return rank;
}

namespace fs = std::filesystem;

LabeledDataset load_dataset(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in)
        throw IoError("cannot open manifest '" + manifest_path + "'");
    const fs::path base = fs::path(manifest_path).parent_path();
    auto resolve = [&](const std::string& rel) {
        fs::path p(rel);
        return (p.is_absolute() ? p : base / p).string();
    };

    LabeledDataset ds;
    std::string labels_path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key=value in " + manifest_path + ":" +
                             std::to_string(line_no));
        auto trim = [](std::string s) {
            const char* ws = " \t";
            s.erase(0, s.find_first_not_of(ws));
            auto last = s.find_last_not_of(ws);
            s.erase(last == std::string::npos ? 0 : last + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "view") {
            std::string path = resolve(value);
            MatrixFormat format = path.size() > 4 && path.substr(path.size() - 4) == ".csv"
                                      ? MatrixFormat::csv
                                      : MatrixFormat::fmat;
            // save_dataset prefixes files with "view_"; strip it so that a
            // save/load round trip preserves the original view names.
            std::string name = fs::path(value).stem().string();
            if (name.rfind("view_", 0) == 0) name.erase(0, 5);
            ds.views.emplace_back(load_matrix(path, format), std::move(name));
        } else if (key == "labels") {
            labels_path = resolve(value);
        } else if (key == "class_count") {
            ds.class_count = static_cast<int>(parse_double(value, manifest_path));
        } else {
            throw ParseError("unknown manifest key '" + key + "' in " + manifest_path);
        }
    }
    if (labels_path.empty())
        throw ParseError("manifest '" + manifest_path + "' has no labels entry");
    ds.labels = load_labels(labels_path);
    ds.validate();
    return ds;
}

void save_dataset(const LabeledDataset& ds, const std::string& dir,
                  const std::string& manifest_name) {
    ds.validate();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir + "': " + ec.message());

    std::ofstream manifest(fs::path(dir) / manifest_name, std::ios::trunc);
    if (!manifest)
        throw IoError("cannot write manifest in '" + dir + "'");
    manifest << "class_count=" << ds.class_count << '\n';
    manifest << "labels=labels.txt\n";
    save_labels(ds.labels, (fs::path(dir) / "labels.txt").string());
    for (const auto& view : ds.views) {
        std::string file = "view_" + view.name + ".fmat";
        save_matrix(view.matrix, (fs::path(dir) / file).string(), MatrixFormat::fmat);
        manifest << "view=" << file << '\n';
    }
    if (!manifest.flush())
        throw IoError("write of manifest in '" + dir + "' failed");
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::parse: return "ParseError";
        case ErrorCode::dimension: return "DimensionError";
        case ErrorCode::data: return "DataError";
        case ErrorCode::io: return "IoError";
        case ErrorCode::degenerate: return "DegenerateError";
        case ErrorCode::singular: return "SingularError";
        case ErrorCode::range: return "RangeError";
        case ErrorCode::label: return "LabelError";
        case ErrorCode::empty: return "EmptyError";
        case ErrorCode::unfitted: return "UnfittedError";
        case ErrorCode::config: return "ConfigError";
    }
    return "Error";
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::config:
        case ErrorCode::range:
            return 2;
        case ErrorCode::parse:
        case ErrorCode::dimension:
        case ErrorCode::data:
        case ErrorCode::io:
        case ErrorCode::label:
        case ErrorCode::empty:
            return 3;
        case ErrorCode::degenerate:
        case ErrorCode::singular:
        case ErrorCode::unfitted:
            return 4;
    }
    return 1;
}

} // namespace mvcca
