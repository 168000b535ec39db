#include "mvcca/noise.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mvcca/rng.hpp"

namespace mvcca {

ImagePatch make_patch(Eigen::MatrixXd pixels) {
    if (pixels.size() == 0)
        throw EmptyError("make_patch: empty pixel matrix");
    require_finite(pixels, "make_patch pixels");
    ImagePatch p;
    p.lo = pixels.minCoeff();
    p.hi = pixels.maxCoeff();
    p.pixels = std::move(pixels);
    return p;
}

ImagePatch inject_noise(const ImagePatch& img, double level, std::uint64_t rng_seed) {
    if (!(level >= 0.0 && level <= 1.0))
        throw RangeError("noise level must lie in [0, 1]");
    if (img.lo > img.hi)
        throw DataError("patch value range is inverted");
    if (img.pixels.size() == 0)
        throw EmptyError("inject_noise: empty patch");
    if (img.pixels.minCoeff() < img.lo || img.pixels.maxCoeff() > img.hi)
        throw DataError("patch pixels fall outside the declared value range");

    const Eigen::Index h = img.pixels.rows();
    const Eigen::Index w = img.pixels.cols();
    const Eigen::Index total = h * w;
    // The nudge absorbs representation error in level*total (0.15*100 is not
    // exactly 15) without changing the mathematical floor.
    Eigen::Index m = static_cast<Eigen::Index>(
        std::floor(level * static_cast<double>(total) + 1e-9));
    m = std::min(m, total);

    ImagePatch out = img;
    if (m == 0) return out;

    Rng rng(rng_seed);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index j =
            i + static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(total - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    std::sort(idx.begin(), idx.begin() + m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index flat = idx[static_cast<std::size_t>(i)];
        out.pixels(flat / w, flat % w) = rng.uniform(img.lo, img.hi);
    }
    return out;
}

void MultiViewSpec::validate() const {
    if (latent_dim < 1) throw ConfigError("latent_dim must be at least 1");
    if (view_dims.empty()) throw ConfigError("at least one view dimension is required");
    if (noise_sigmas.size() != view_dims.size())
        throw ConfigError("noise_sigmas must match view_dims in length");
    for (std::size_t i = 0; i < view_dims.size(); ++i) {
        if (view_dims[i] < latent_dim)
            throw ConfigError("view " + std::to_string(i) +
                              " dimension is below the latent dimension");
        if (!(noise_sigmas[i] > 0.0))
            throw ConfigError("noise sigma for view " + std::to_string(i) +
                              " must be positive");
    }
    if (!latent_scales.empty()) {
        if (static_cast<Eigen::Index>(latent_scales.size()) != latent_dim)
            throw ConfigError("latent_scales must match latent_dim in length");
        for (double s : latent_scales)
            if (!(s > 0.0)) throw ConfigError("latent scales must be positive");
    }
    if (n < 1) throw ConfigError("sample count must be at least 1");
}

namespace {

Eigen::MatrixXd fill_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = rng.normal();
    return m;
}

Eigen::MatrixXd orthonormal_loadings(std::uint64_t seed, Eigen::Index p, Eigen::Index k) {
    Rng rng(seed);
    const Eigen::MatrixXd g = fill_normal(rng, p, k);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ() * Eigen::MatrixXd::Identity(p, k);
}

} // namespace

MultiViewData gen_multiview(const MultiViewSpec& spec) {
    spec.validate();
    Eigen::VectorXd scales = Eigen::VectorXd::Ones(spec.latent_dim);
    for (std::size_t j = 0; j < spec.latent_scales.size(); ++j)
        scales(static_cast<Eigen::Index>(j)) = spec.latent_scales[j];

    MultiViewData out;
    Rng latent_rng(derive_seed(spec.sample_seed, "latent"));
    out.latents = fill_normal(latent_rng, spec.latent_dim, spec.n);
    const Eigen::MatrixXd scaled = scales.asDiagonal() * out.latents;

    out.views.reserve(spec.view_dims.size());
    for (std::size_t i = 0; i < spec.view_dims.size(); ++i) {
        const Eigen::Index p = spec.view_dims[i];
        const Eigen::MatrixXd loadings = orthonormal_loadings(
            derive_seed(spec.loading_seed, "loading-" + std::to_string(i)), p,
            spec.latent_dim);
        Rng noise_rng(derive_seed(spec.sample_seed, "noise-" + std::to_string(i)));
        Eigen::MatrixXd view =
            loadings * scaled + spec.noise_sigmas[i] * fill_normal(noise_rng, p, spec.n);
        out.views.emplace_back(FeatureMatrix(std::move(view)),
                               "view" + std::to_string(i));
    }
    return out;
}

Eigen::VectorXd population_gamma(const MultiViewSpec& spec, std::size_t view_a,
                                 std::size_t view_b) {
    if (view_a >= spec.view_dims.size() || view_b >= spec.view_dims.size())
        throw RangeError("population_gamma: view index out of range");
    if (view_a == view_b)
        throw RangeError("population_gamma: views must differ");
    const double sa2 = spec.noise_sigmas[view_a] * spec.noise_sigmas[view_a];
    const double sb2 = spec.noise_sigmas[view_b] * spec.noise_sigmas[view_b];
    Eigen::VectorXd gamma(spec.latent_dim);
    for (Eigen::Index j = 0; j < spec.latent_dim; ++j) {
        const double s2 = spec.latent_scales.empty()
                              ? 1.0
                              : spec.latent_scales[static_cast<std::size_t>(j)] *
                                    spec.latent_scales[static_cast<std::size_t>(j)];
        const double denom = std::sqrt((s2 + sa2) * (s2 + sb2));
        gamma(j) = denom > 0.0 ? s2 / denom : 0.0;
    }
    std::sort(gamma.data(), gamma.data() + gamma.size(), std::greater<double>());
    return gamma;
}

Extractor extractor_from_string(const std::string& s) {
    if (s == "raw-flatten") return Extractor::raw_flatten;
    if (s == "row-means") return Extractor::row_means;
    if (s == "column-means") return Extractor::column_means;
    if (s == "2x2-block-means") return Extractor::block_means_2x2;
    throw ConfigError("unknown extractor '" + s + "'");
}

const char* extractor_name(Extractor e) {
    switch (e) {
        case Extractor::raw_flatten: return "raw-flatten";
        case Extractor::row_means: return "row-means";
        case Extractor::column_means: return "column-means";
        case Extractor::block_means_2x2: return "2x2-block-means";
    }
    throw ConfigError("invalid extractor value");
}

Eigen::Index extractor_dim(Extractor e, Eigen::Index h, Eigen::Index w) {
    switch (e) {
        case Extractor::raw_flatten: return h * w;
        case Extractor::row_means: return h;
        case Extractor::column_means: return w;
        case Extractor::block_means_2x2: return ((h + 1) / 2) * ((w + 1) / 2);
    }
    throw ConfigError("invalid extractor value");
}

Eigen::VectorXd apply_extractor(Extractor e, const ImagePatch& patch) {
    const Eigen::Index h = patch.pixels.rows();
    const Eigen::Index w = patch.pixels.cols();
    switch (e) {
        case Extractor::raw_flatten: {
            Eigen::VectorXd out(h * w);
            for (Eigen::Index r = 0; r < h; ++r)
                for (Eigen::Index c = 0; c < w; ++c)
                    out(r * w + c) = patch.pixels(r, c);
            return out;
        }
        case Extractor::row_means:
            return patch.pixels.rowwise().mean();
        case Extractor::column_means:
            return patch.pixels.colwise().mean().transpose();
        case Extractor::block_means_2x2: {
            const Eigen::Index bh = (h + 1) / 2;
            const Eigen::Index bw = (w + 1) / 2;
            Eigen::VectorXd out(bh * bw);
            for (Eigen::Index bi = 0; bi < bh; ++bi) {
                for (Eigen::Index bj = 0; bj < bw; ++bj) {
                    const Eigen::Index r0 = 2 * bi;
                    const Eigen::Index c0 = 2 * bj;
                    const Eigen::Index rn = std::min<Eigen::Index>(2, h - r0);
                    const Eigen::Index cn = std::min<Eigen::Index>(2, w - c0);
                    out(bi * bw + bj) = patch.pixels.block(r0, c0, rn, cn).mean();
                }
            }
            return out;
        }
    }
    throw ConfigError("invalid extractor value");
}

void ClassTaskSpec::validate() const {
    if (class_count < 2) throw ConfigError("class_count must be at least 2");
    if (patch_h < 1 || patch_w < 1) throw ConfigError("patch shape must be positive");
    if (!(template_scale > 0.0)) throw ConfigError("template_scale must be positive");
    if (within_sigma < 0.0) throw ConfigError("within_sigma must be nonnegative");
    if (views.empty()) throw ConfigError("at least one view extractor is required");
    if (!view_noise_sigmas.empty()) {
        if (view_noise_sigmas.size() != views.size())
            throw ConfigError("view_noise_sigmas must match views in length");
        for (double s : view_noise_sigmas)
            if (s < 0.0) throw ConfigError("view noise sigmas must be nonnegative");
    }
    if (n_train < 1) throw ConfigError("n_train must be at least 1 per class");
    if (n_test < 1) throw ConfigError("n_test must be at least 1 per class");
}

std::vector<Eigen::MatrixXd> class_templates(const ClassTaskSpec& spec) {
    spec.validate();
    std::vector<Eigen::MatrixXd> templates;
    templates.reserve(static_cast<std::size_t>(spec.class_count));
    for (int c = 0; c < spec.class_count; ++c) {
        Rng rng(derive_seed(spec.seed, "template-" + std::to_string(c)));
        Eigen::MatrixXd t(spec.patch_h, spec.patch_w);
        for (Eigen::Index r = 0; r < spec.patch_h; ++r)
            for (Eigen::Index col = 0; col < spec.patch_w; ++col)
                t(r, col) = spec.template_scale * rng.normal();
        templates.push_back(std::move(t));
    }
    return templates;
}

namespace {

std::vector<ImagePatch> gen_patches(const ClassTaskSpec& spec,
                                    const std::vector<Eigen::MatrixXd>& templates,
                                    const std::string& split, std::vector<int>& labels) {
    std::vector<ImagePatch> patches;
    const Eigen::Index per_class = split == "train" ? spec.n_train : spec.n_test;
    patches.reserve(static_cast<std::size_t>(per_class) *
                    static_cast<std::size_t>(spec.class_count));
    for (int c = 0; c < spec.class_count; ++c) {
        Rng rng(derive_seed(spec.seed, split + "-patch-" + std::to_string(c)));
        for (Eigen::Index s = 0; s < per_class; ++s) {
            Eigen::MatrixXd pix = templates[static_cast<std::size_t>(c)];
            for (Eigen::Index r = 0; r < spec.patch_h; ++r)
                for (Eigen::Index col = 0; col < spec.patch_w; ++col)
                    pix(r, col) += spec.within_sigma * rng.normal();
            patches.push_back(make_patch(std::move(pix)));
            labels.push_back(c);
        }
    }
    return patches;
}

std::vector<Eigen::MatrixXd> gen_view_noise(const ClassTaskSpec& spec,
                                            const std::string& split,
                                            Eigen::Index sample_count) {
    std::vector<Eigen::MatrixXd> noise(spec.views.size());
    for (std::size_t v = 0; v < spec.views.size(); ++v) {
        const Eigen::Index dim = extractor_dim(spec.views[v], spec.patch_h, spec.patch_w);
        const double sigma = spec.view_noise_sigmas.empty() ? 0.0 : spec.view_noise_sigmas[v];
        if (sigma > 0.0) {
            Rng rng(derive_seed(spec.seed, split + "-viewnoise-" + std::to_string(v)));
            noise[v] = sigma * fill_normal(rng, dim, sample_count);
        } else {
            noise[v] = Eigen::MatrixXd::Zero(dim, sample_count);
        }
    }
    return noise;
}

std::vector<FeatureSet> views_from_patches(const ClassTaskSpec& spec,
                                           const std::vector<ImagePatch>& patches,
                                           const std::vector<Eigen::MatrixXd>& view_noise) {
    std::vector<FeatureSet> views;
    views.reserve(spec.views.size());
    for (std::size_t v = 0; v < spec.views.size(); ++v) {
        const Eigen::Index dim = extractor_dim(spec.views[v], spec.patch_h, spec.patch_w);
        Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(patches.size()));
        for (std::size_t s = 0; s < patches.size(); ++s)
            m.col(static_cast<Eigen::Index>(s)) =
                apply_extractor(spec.views[v], patches[s]) +
                view_noise[v].col(static_cast<Eigen::Index>(s));
        views.emplace_back(FeatureMatrix(std::move(m)), extractor_name(spec.views[v]));
    }
    return views;
}

} // namespace

std::vector<FeatureSet> extract_test_views(const ClassTaskSpec& spec,
                                           const std::vector<ImagePatch>& patches,
                                           const std::vector<Eigen::MatrixXd>& view_noise) {
    spec.validate();
    if (view_noise.size() != spec.views.size())
        throw DimensionError("extract_test_views: noise blocks do not match views");
    for (std::size_t v = 0; v < view_noise.size(); ++v) {
        if (view_noise[v].rows() != extractor_dim(spec.views[v], spec.patch_h, spec.patch_w) ||
            view_noise[v].cols() != static_cast<Eigen::Index>(patches.size()))
            throw DimensionError("extract_test_views: noise block " + std::to_string(v) +
                                 " has the wrong shape");
    }
    for (const ImagePatch& p : patches)
        if (p.pixels.rows() != spec.patch_h || p.pixels.cols() != spec.patch_w)
            throw DimensionError("extract_test_views: patch shape mismatch");
    return views_from_patches(spec, patches, view_noise);
}

ClassTask gen_classification(const ClassTaskSpec& spec) {
    spec.validate();
    const std::vector<Eigen::MatrixXd> templates = class_templates(spec);

    ClassTask task;
    std::vector<int> train_labels;
    std::vector<ImagePatch> train_patches = gen_patches(spec, templates, "train", train_labels);
    const std::vector<Eigen::MatrixXd> train_noise =
        gen_view_noise(spec, "train", static_cast<Eigen::Index>(train_patches.size()));
    task.train.views = views_from_patches(spec, train_patches, train_noise);
    task.train.labels = std::move(train_labels);
    task.train.class_count = spec.class_count;
    task.train.validate();

    std::vector<int> test_labels;
    task.test_patches = gen_patches(spec, templates, "test", test_labels);
    task.test_view_noise =
        gen_view_noise(spec, "test", static_cast<Eigen::Index>(task.test_patches.size()));
    task.test.views = views_from_patches(spec, task.test_patches, task.test_view_noise);
    task.test.labels = std::move(test_labels);
    task.test.class_count = spec.class_count;
    task.test.validate();
    return task;
}

namespace {

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename T, typename Fmt>
std::string join(const std::vector<T>& values, Fmt fmt) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += fmt(values[i]);
    }
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_f64(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("bad numeric value '" + s + "' in DATASPEC1");
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("bad integer value '" + s + "' in DATASPEC1");
    return v;
}

Eigen::Index parse_index(const std::string& s) {
    return static_cast<Eigen::Index>(parse_u64(s));
}

} // namespace

void save_dataspec(const DataSpec& spec, const std::string& path) {
    std::ostringstream out;
    out << "DATASPEC1\n";
    if (spec.kind == "classification") {
        const ClassTaskSpec& c = spec.classification;
        c.validate();
        out << "kind=classification\n";
        out << "class_count=" << c.class_count << '\n';
        out << "patch_h=" << c.patch_h << '\n';
        out << "patch_w=" << c.patch_w << '\n';
        out << "template_scale=" << format17(c.template_scale) << '\n';
        out << "within_sigma=" << format17(c.within_sigma) << '\n';
        out << "views=" << join(c.views, [](Extractor e) { return std::string(extractor_name(e)); }) << '\n';
        if (!c.view_noise_sigmas.empty())
            out << "view_noise_sigmas=" << join(c.view_noise_sigmas, format17) << '\n';
        out << "n_train=" << c.n_train << '\n';
        out << "n_test=" << c.n_test << '\n';
        out << "seed=" << c.seed << '\n';
    } else if (spec.kind == "multiview") {
        const MultiViewSpec& m = spec.multiview;
        m.validate();
        out << "kind=multiview\n";
        out << "latent_dim=" << m.latent_dim << '\n';
        out << "view_dims=" << join(m.view_dims, [](Eigen::Index d) { return std::to_string(d); }) << '\n';
        out << "noise_sigmas=" << join(m.noise_sigmas, format17) << '\n';
        if (!m.latent_scales.empty())
            out << "latent_scales=" << join(m.latent_scales, format17) << '\n';
        out << "loading_seed=" << m.loading_seed << '\n';
        out << "sample_seed=" << m.sample_seed << '\n';
        out << "n=" << m.n << '\n';
    } else {
        throw ConfigError("unknown dataspec kind '" + spec.kind + "'");
    }
    std::ofstream file(path, std::ios::trunc | std::ios::binary);
    if (!file)
        throw IoError("cannot open '" + path + "' for writing");
    file << out.str();
    if (!file.flush())
        throw IoError("write to '" + path + "' failed");
}

DataSpec load_dataspec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line != "DATASPEC1")
        throw ParseError("'" + path + "' does not start with DATASPEC1");

    DataSpec spec;
    bool saw_view_noise = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("DATASPEC1 line without '=': " + line);
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "kind") {
            spec.kind = val;
        } else if (key == "class_count") {
            spec.classification.class_count = static_cast<int>(parse_u64(val));
        } else if (key == "patch_h") {
            spec.classification.patch_h = parse_index(val);
        } else if (key == "patch_w") {
            spec.classification.patch_w = parse_index(val);
        } else if (key == "template_scale") {
            spec.classification.template_scale = parse_f64(val);
        } else if (key == "within_sigma") {
            spec.classification.within_sigma = parse_f64(val);
        } else if (key == "views") {
            spec.classification.views.clear();
            for (const std::string& name : split_list(val))
                spec.classification.views.push_back(extractor_from_string(name));
        } else if (key == "view_noise_sigmas") {
            saw_view_noise = true;
            spec.classification.view_noise_sigmas.clear();
            for (const std::string& s : split_list(val))
                spec.classification.view_noise_sigmas.push_back(parse_f64(s));
        } else if (key == "n_train") {
            spec.classification.n_train = parse_index(val);
        } else if (key == "n_test") {
            spec.classification.n_test = parse_index(val);
        } else if (key == "seed") {
            spec.classification.seed = parse_u64(val);
        } else if (key == "latent_dim") {
            spec.multiview.latent_dim = parse_index(val);
        } else if (key == "view_dims") {
            spec.multiview.view_dims.clear();
            for (const std::string& s : split_list(val))
                spec.multiview.view_dims.push_back(parse_index(s));
        } else if (key == "noise_sigmas") {
            spec.multiview.noise_sigmas.clear();
            for (const std::string& s : split_list(val))
                spec.multiview.noise_sigmas.push_back(parse_f64(s));
        } else if (key == "latent_scales") {
            spec.multiview.latent_scales.clear();
            for (const std::string& s : split_list(val))
                spec.multiview.latent_scales.push_back(parse_f64(s));
        } else if (key == "loading_seed") {
            spec.multiview.loading_seed = parse_u64(val);
        } else if (key == "sample_seed") {
            spec.multiview.sample_seed = parse_u64(val);
        } else if (key == "n") {
            spec.multiview.n = parse_index(val);
        } else {
            throw ParseError("unknown DATASPEC1 key '" + key + "'");
        }
    }
    (void)saw_view_noise;
    if (spec.kind == "classification") {
        spec.classification.validate();
    } else if (spec.kind == "multiview") {
        spec.multiview.validate();
    } else {
        throw ParseError("DATASPEC1 kind missing or unknown");
    }
    return spec;
}

} // namespace mvcca
