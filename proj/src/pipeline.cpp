#include "mvcca/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mvcca/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mvcca {

OutputFormat output_format_from_string(const std::string& s) {
    if (s == "text") return OutputFormat::text;
    if (s == "csv") return OutputFormat::csv;
    if (s == "json-lines") return OutputFormat::json_lines;
    throw ConfigError("unknown output format '" + s + "' (expected text, csv or json-lines)");
}

namespace {

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double cfg_f64(const std::string& key, const std::string& val) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || ptr != val.data() + val.size())
        throw ConfigError("bad numeric value for " + key + ": '" + val + "'");
    return v;
}

std::uint64_t cfg_u64(const std::string& key, const std::string& val) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || ptr != val.data() + val.size())
        throw ConfigError("bad integer value for " + key + ": '" + val + "'");
    return v;
}

Eigen::Index cfg_index(const std::string& key, const std::string& val) {
    return static_cast<Eigen::Index>(cfg_u64(key, val));
}

bool cfg_bool(const std::string& key, const std::string& val) {
    if (val == "true" || val == "1") return true;
    if (val == "false" || val == "0") return false;
    throw ConfigError("bad boolean value for " + key + ": '" + val + "'");
}

// Error subclasses carry the failing module and stage in their message.
template <typename F>
auto run_stage(const char* module, const char* stage, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(module) + "/" + stage + ": " + e.what());
    }
}

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out.flush())
        throw IoError("write to '" + path + "' failed");
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

} // namespace

void PipelineConfig::validate() const {
    if (source != "generator" && source != "manifest")
        throw ConfigError("dataset source must be generator or manifest");
    if (source == "manifest") {
        if (!dataspec_path.empty())
            throw ConfigError("dataspec conflicts with a manifest dataset source");
        if (train_manifest.empty() || test_manifest.empty())
            throw ConfigError("manifest source needs train_manifest and test_manifest");
    } else if (dataspec_path.empty()) {
        task.validate();
    }
    if (fusion != "cca" && fusion != "mcca" && fusion != "none")
        throw ConfigError("fusion must be cca, mcca or none");
    if (ridge_rel < 0.0)
        throw ConfigError("ridge_rel must be nonnegative");
    svm.validate();
    for (double level : levels)
        if (!(level >= 0.0 && level <= 1.0))
            throw ConfigError("noise levels must lie in [0, 1]");
    if (out_dir.empty())
        throw ConfigError("output directory must not be empty");
}

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = t.substr(1, t.size() - 2);
            if (section != "dataset" && section != "fusion" && section != "svm" &&
                section != "noise" && section != "run")
                throw ConfigError("unknown config section [" + section + "]");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (section.empty())
            throw ConfigError("key '" + key + "' appears before any section");

        if (section == "dataset") {
            if (key == "source") cfg.source = val;
            else if (key == "dataspec") cfg.dataspec_path = val;
            else if (key == "train_manifest") cfg.train_manifest = val;
            else if (key == "test_manifest") cfg.test_manifest = val;
            else if (key == "class_count") cfg.task.class_count = static_cast<int>(cfg_u64(key, val));
            else if (key == "patch_h") cfg.task.patch_h = cfg_index(key, val);
            else if (key == "patch_w") cfg.task.patch_w = cfg_index(key, val);
            else if (key == "template_scale") cfg.task.template_scale = cfg_f64(key, val);
            else if (key == "within_sigma") cfg.task.within_sigma = cfg_f64(key, val);
            else if (key == "views") {
                cfg.task.views.clear();
                for (const std::string& name : split_list(val))
                    cfg.task.views.push_back(extractor_from_string(name));
            } else if (key == "view_noise_sigmas") {
                cfg.task.view_noise_sigmas.clear();
                for (const std::string& s : split_list(val))
                    cfg.task.view_noise_sigmas.push_back(cfg_f64(key, s));
            } else if (key == "n_train") cfg.task.n_train = cfg_index(key, val);
            else if (key == "n_test") cfg.task.n_test = cfg_index(key, val);
            else throw ConfigError("unknown [dataset] key '" + key + "'");
        } else if (section == "fusion") {
            if (key == "fusion") cfg.fusion = val;
            else if (key == "fuse_mode") cfg.fuse_mode = fuse_mode_from_string(val);
            else if (key == "ridge_rel") cfg.ridge_rel = cfg_f64(key, val);
            else throw ConfigError("unknown [fusion] key '" + key + "'");
        } else if (section == "svm") {
            if (key == "c_penalty") cfg.svm.c_penalty = cfg_f64(key, val);
            else if (key == "loss") cfg.svm.loss = svm_loss_from_string(val);
            else if (key == "batch_size") cfg.svm.batch_size = cfg_index(key, val);
            else if (key == "momentum") cfg.svm.momentum = cfg_f64(key, val);
            else if (key == "weight_decay") cfg.svm.weight_decay = cfg_f64(key, val);
            else if (key == "lr_initial") cfg.svm.lr_initial = cfg_f64(key, val);
            else if (key == "lr_decay_factor") cfg.svm.lr_decay_factor = cfg_f64(key, val);
            else if (key == "max_lr_decays") cfg.svm.max_lr_decays = static_cast<int>(cfg_u64(key, val));
            else if (key == "patience_epochs") cfg.svm.patience_epochs = cfg_index(key, val);
            else if (key == "max_epochs") cfg.svm.max_epochs = cfg_index(key, val);
            else if (key == "standardize") cfg.svm.standardize = cfg_bool(key, val);
            else throw ConfigError("unknown [svm] key '" + key + "'");
        } else if (section == "noise") {
            if (key == "levels") {
                cfg.levels.clear();
                for (const std::string& s : split_list(val))
                    if (!s.empty()) cfg.levels.push_back(cfg_f64(key, s));
            } else throw ConfigError("unknown [noise] key '" + key + "'");
        } else {   // run
            if (key == "seed") cfg.seed = cfg_u64(key, val);
            else if (key == "out") cfg.out_dir = val;
            else throw ConfigError("unknown [run] key '" + key + "'");
        }
    }
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

/// Generator parameters with the dataset sub-seed resolved. A DATASPEC1 file
/// wins over inline keys and keeps its own recorded seed.
ClassTaskSpec effective_task(const PipelineConfig& cfg) {
    if (!cfg.dataspec_path.empty()) {
        DataSpec ds = load_dataspec(cfg.dataspec_path);
        if (ds.kind != "classification")
            throw ConfigError("pipeline dataspec must have kind=classification");
        return ds.classification;
    }
    ClassTaskSpec task = cfg.task;
    task.seed = derive_seed(cfg.seed, "dataset");
    return task;
}

json task_json(const ClassTaskSpec& t) {
    json j;
    j["class_count"] = t.class_count;
    j["patch_h"] = t.patch_h;
    j["patch_w"] = t.patch_w;
    j["template_scale"] = t.template_scale;
    j["within_sigma"] = t.within_sigma;
    std::vector<std::string> names;
    for (Extractor e : t.views) names.emplace_back(extractor_name(e));
    j["views"] = names;
    j["view_noise_sigmas"] = t.view_noise_sigmas;
    j["n_train"] = t.n_train;
    j["n_test"] = t.n_test;
    j["seed"] = t.seed;
    return j;
}

json config_json(const PipelineConfig& cfg) {
    json j;
    j["dataset"]["source"] = cfg.source;
    if (cfg.source == "generator") {
        if (!cfg.dataspec_path.empty()) j["dataset"]["dataspec"] = cfg.dataspec_path;
        j["dataset"]["task"] = task_json(effective_task(cfg));
    } else {
        j["dataset"]["train_manifest"] = cfg.train_manifest;
        j["dataset"]["test_manifest"] = cfg.test_manifest;
    }
    j["fusion"]["fusion"] = cfg.fusion;
    j["fusion"]["fuse_mode"] = fuse_mode_name(cfg.fuse_mode);
    j["fusion"]["ridge_rel"] = cfg.ridge_rel;
    j["svm"]["c_penalty"] = cfg.svm.c_penalty;
    j["svm"]["loss"] = svm_loss_name(cfg.svm.loss);
    j["svm"]["batch_size"] = cfg.svm.batch_size;
    j["svm"]["momentum"] = cfg.svm.momentum;
    j["svm"]["weight_decay"] = cfg.svm.weight_decay;
    j["svm"]["lr_initial"] = cfg.svm.lr_initial;
    j["svm"]["lr_decay_factor"] = cfg.svm.lr_decay_factor;
    j["svm"]["max_lr_decays"] = cfg.svm.max_lr_decays;
    j["svm"]["patience_epochs"] = cfg.svm.patience_epochs;
    j["svm"]["max_epochs"] = cfg.svm.max_epochs;
    j["svm"]["standardize"] = cfg.svm.standardize;
    j["noise"]["levels"] = cfg.levels;
    j["run"]["seed"] = cfg.seed;
    j["run"]["out"] = cfg.out_dir;
    return j;
}

struct LoadedData {
    LabeledDataset train;
    LabeledDataset test;
    bool has_patches = false;
    ClassTaskSpec task;                          // valid when has_patches
    std::vector<ImagePatch> test_patches;
    std::vector<Eigen::MatrixXd> test_view_noise;
};

LoadedData load_data(const PipelineConfig& cfg) {
    LoadedData data;
    if (cfg.source == "generator") {
        data.task = effective_task(cfg);
        ClassTask task = gen_classification(data.task);
        data.train = std::move(task.train);
        data.test = std::move(task.test);
        data.test_patches = std::move(task.test_patches);
        data.test_view_noise = std::move(task.test_view_noise);
        data.has_patches = true;
    } else {
        data.train = load_dataset(cfg.train_manifest);
        data.test = load_dataset(cfg.test_manifest);
        if (data.train.class_count != data.test.class_count)
            throw DataError("train and test manifests disagree on class_count");
        if (data.train.views.size() != data.test.views.size())
            throw DimensionError("train and test manifests disagree on view count");
        for (std::size_t v = 0; v < data.train.views.size(); ++v)
            if (data.train.views[v].p() != data.test.views[v].p())
                throw DimensionError("view " + std::to_string(v) +
                                     " feature dimensions differ between train and test");
    }
    data.train.validate();
    data.test.validate();
    return data;
}

/// One fitted fusion arm. `used` indexes the dataset views the arm consumes
/// (all of them for mcca/none, the top-2-rank pair for cca).
struct FusionArm {
    std::string kind;
    MccaPlan plan;
    bool uses_plan = false;
    std::vector<std::size_t> used;
    std::vector<std::string> view_names;
    Eigen::MatrixXd train_features;
};

Eigen::MatrixXd concat_views(const std::vector<FeatureSet>& views,
                             const std::vector<std::size_t>& used) {
    Eigen::Index rows = 0;
    for (std::size_t i : used) rows += views[i].p();
    Eigen::MatrixXd out(rows, views[used.front()].n());
    Eigen::Index at = 0;
    for (std::size_t i : used) {
        out.middleRows(at, views[i].p()) = views[i].matrix.data;
        at += views[i].p();
    }
    return out;
}

FusionArm fit_fusion(const PipelineConfig& cfg, const LabeledDataset& train) {
    FusionArm arm;
    arm.kind = cfg.fusion;
    if (cfg.fusion == "none") {
        if (train.views.empty())
            throw EmptyError("dataset has no views");
        arm.used.resize(train.views.size());
        std::iota(arm.used.begin(), arm.used.end(), std::size_t{0});
        arm.train_features = concat_views(train.views, arm.used);
    } else if (cfg.fusion == "mcca") {
        arm.used.resize(train.views.size());
        std::iota(arm.used.begin(), arm.used.end(), std::size_t{0});
        auto [plan, fused] = fit_mcca(train.views, cfg.fuse_mode, cfg.ridge_rel);
        arm.plan = std::move(plan);
        arm.uses_plan = true;
        arm.train_features = std::move(fused.data);
    } else {   // cca: the two highest-rank views, ties to the lower index
        if (train.views.size() < 2)
            throw DegenerateError("cca fusion needs at least 2 views");
        std::vector<std::size_t> order(train.views.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<Eigen::Index> ranks(train.views.size());
        for (std::size_t i = 0; i < train.views.size(); ++i)
            ranks[i] = numerical_rank(train.views[i].matrix);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
            if (ranks[l] != ranks[r]) return ranks[l] > ranks[r];
            return l < r;
        });
        arm.used = {std::min(order[0], order[1]), std::max(order[0], order[1])};
        std::vector<FeatureSet> pair = {train.views[arm.used[0]], train.views[arm.used[1]]};
        auto [plan, fused] = fit_mcca(pair, cfg.fuse_mode, cfg.ridge_rel);
        arm.plan = std::move(plan);
        arm.uses_plan = true;
        arm.train_features = std::move(fused.data);
    }
    for (std::size_t i : arm.used) arm.view_names.push_back(train.views[i].name);
    return arm;
}

Eigen::MatrixXd apply_fusion(const FusionArm& arm, const std::vector<FeatureSet>& views) {
    if (!arm.uses_plan) {
        for (std::size_t i : arm.used)
            if (i >= views.size())
                throw DimensionError("dataset has fewer views than the fitted arm");
        return concat_views(views, arm.used);
    }
    std::vector<FeatureMatrix> subset;
    subset.reserve(arm.used.size());
    for (std::size_t i : arm.used) {
        if (i >= views.size())
            throw DimensionError("dataset has fewer views than the fitted arm");
        subset.push_back(views[i].matrix);
    }
    return apply_mcca(arm.plan, subset).data;
}

json plan_json(const MccaPlan& plan) {
    json j;
    j["lambda"] = plan.lambda;
    j["fuse_mode"] = fuse_mode_name(plan.fuse_mode);
    j["ridge_rel"] = plan.ridge;
    json inputs = json::array();
    for (const std::string& id : plan.input_ids) {
        json row;
        row["id"] = id;
        row["rank"] = plan.input_ranks.at(id);
        inputs.push_back(row);
    }
    j["inputs"] = inputs;
    json stages = json::array();
    for (const MccaStage& s : plan.stages) {
        json row;
        row["left"] = s.left_id;
        row["right"] = s.right_id;
        row["output"] = s.output_id;
        row["output_rank"] = s.output_rank;
        row["shared_rank"] = s.transform.r;
        stages.push_back(row);
    }
    j["stages"] = stages;
    return j;
}

json class_metrics_json(const std::string& name, const ClassMetrics& m) {
    json j;
    j["class"] = name;
    j["single_accuracy"] = m.single_accuracy;
    j["error_single"] = m.error_single;
    j["total_accuracy"] = m.total_accuracy;
    j["error_total"] = m.error_total;
    j["sensitivity"] = m.sensitivity;
    j["specificity"] = m.specificity;
    j["precision"] = m.precision;
    j["fpr"] = m.fpr;
    j["degenerate"] = m.degenerate;
    return j;
}

json overall_json(const OverallMetrics& o) {
    json j;
    j["accuracy"] = o.accuracy;
    j["error"] = o.error;
    j["sensitivity"] = o.sensitivity;
    j["specificity"] = o.specificity;
    j["precision"] = o.precision;
    j["fpr"] = o.fpr;
    return j;
}

} // namespace

SynthResult cmd_synth(const PipelineConfig& cfg, OutputFormat fmt) {
    cfg.validate();
    if (cfg.source != "generator")
        throw ConfigError("synth requires a generator dataset source");
    run_stage("cli", "output-dir", [&] { ensure_dir(cfg.out_dir); });

    const ClassTaskSpec task = run_stage("noise_sim", "dataset", [&] { return effective_task(cfg); });
    ClassTask gen = run_stage("noise_sim", "dataset", [&] { return gen_classification(task); });

    SynthResult res;
    const fs::path out(cfg.out_dir);
    run_stage("matrixio", "export", [&] {
        save_dataset(gen.train, (out / "train").string());
        save_dataset(gen.test, (out / "test").string());
        DataSpec ds;
        ds.kind = "classification";
        ds.classification = task;
        save_dataspec(ds, (out / "dataspec.txt").string());
    });
    res.dataspec_path = (out / "dataspec.txt").string();
    res.train_manifest = (out / "train" / "manifest.txt").string();
    res.test_manifest = (out / "test" / "manifest.txt").string();
    res.train_samples = gen.train.n();
    res.test_samples = gen.test.n();

    std::ostringstream text;
    if (fmt == OutputFormat::text) {
        text << "dataset: classification classes=" << task.class_count
             << " views=" << task.views.size() << " train=" << res.train_samples
             << " test=" << res.test_samples << "\n";
        text << "wrote: dataspec.txt train/manifest.txt test/manifest.txt\n";
    } else if (fmt == OutputFormat::csv) {
        text << "key,value\n";
        text << "class_count," << task.class_count << "\n";
        text << "views," << task.views.size() << "\n";
        text << "train_samples," << res.train_samples << "\n";
        text << "test_samples," << res.test_samples << "\n";
        text << "dataspec," << res.dataspec_path << "\n";
        text << "train_manifest," << res.train_manifest << "\n";
        text << "test_manifest," << res.test_manifest << "\n";
    } else {
        json j;
        j["record"] = "synth";
        j["class_count"] = task.class_count;
        j["views"] = task.views.size();
        j["train_samples"] = res.train_samples;
        j["test_samples"] = res.test_samples;
        j["dataspec"] = res.dataspec_path;
        j["train_manifest"] = res.train_manifest;
        j["test_manifest"] = res.test_manifest;
        text << j.dump() << "\n";
    }
    res.rendered = text.str();
    return res;
}

namespace {

struct FittedPipeline {
    LoadedData data;
    FusionArm arm;
    SvmModel model;
    std::uint64_t svm_seed = 0;
};

FittedPipeline fit_pipeline(const PipelineConfig& cfg) {
    FittedPipeline fp;
    fp.data = run_stage("matrixio", "load-dataset", [&] { return load_data(cfg); });
    fp.arm = run_stage("fusion", "fit", [&] { return fit_fusion(cfg, fp.data.train); });
    SvmConfig svm_cfg = cfg.svm;
    fp.svm_seed = derive_seed(cfg.seed, "svm");
    svm_cfg.seed = fp.svm_seed;
    fp.model = run_stage("svm", "train", [&] {
        return train_multiclass(fp.arm.train_features, fp.data.train.labels,
                                fp.data.train.class_count, svm_cfg);
    });
    return fp;
}

double evaluate_arm(const FittedPipeline& fp, const std::vector<FeatureSet>& test_views,
                    const std::vector<int>& test_labels, std::vector<int>* out_pred) {
    const Eigen::MatrixXd feats =
        run_stage("fusion", "apply", [&] { return apply_fusion(fp.arm, test_views); });
    Prediction pred = run_stage("svm", "predict", [&] { return predict(fp.model, feats); });
    const double acc = accuracy(test_labels, pred.labels);
    if (out_pred) *out_pred = std::move(pred.labels);
    return acc;
}

} // namespace

PipelineResult cmd_pipeline(const PipelineConfig& cfg, OutputFormat fmt) {
    cfg.validate();
    run_stage("cli", "output-dir", [&] { ensure_dir(cfg.out_dir); });

    FittedPipeline fp = fit_pipeline(cfg);
    std::vector<int> predicted;
    const double acc = evaluate_arm(fp, fp.data.test.views, fp.data.test.labels, &predicted);

    const ConfusionMatrix cm = run_stage("eval_metrics", "confusion", [&] {
        return confusion_matrix(fp.data.test.labels, predicted, fp.data.test.class_count);
    });
    PipelineResult res;
    res.rep = run_stage("eval_metrics", "report", [&] { return report(cm); });
    res.accuracy = acc;
    res.fused_views = fp.arm.view_names;

    const fs::path out(cfg.out_dir);
    res.report_csv_path = (out / "report.csv").string();
    res.report_text_path = (out / "report.txt").string();
    res.summary_path = (out / "summary.json").string();
    res.model_path = (out / "model.svmm").string();
    run_stage("eval_metrics", "export", [&] {
        save_report_csv(res.rep, res.report_csv_path);
        save_report_text(res.rep, res.report_text_path);
    });
    run_stage("svm", "export", [&] { save_svm(fp.model, res.model_path); });
    if (fp.arm.uses_plan) {
        res.plan_path = (out / "plan.mcca").string();
        run_stage("mcca_fusion", "export", [&] { save_mcca(fp.arm.plan, res.plan_path); });
    }

    json summary;
    summary["command"] = "pipeline";
    summary["accuracy"] = res.accuracy;
    summary["overall"] = overall_json(res.rep.overall);
    json per_class = json::array();
    for (std::size_t i = 0; i < res.rep.per_class.size(); ++i)
        per_class.push_back(class_metrics_json(res.rep.class_names[i], res.rep.per_class[i]));
    summary["per_class"] = per_class;
    summary["fusion"]["arm"] = cfg.fusion;
    summary["fusion"]["fused_views"] = res.fused_views;
    if (fp.arm.uses_plan) summary["fusion"]["plan"] = plan_json(fp.arm.plan);
    summary["config"] = config_json(cfg);
    summary["seeds"]["root"] = cfg.seed;
    summary["seeds"]["svm"] = fp.svm_seed;
    if (cfg.source == "generator") summary["seeds"]["dataset"] = fp.data.task.seed;
    json outputs;
    outputs["report_csv"] = "report.csv";
    outputs["report_text"] = "report.txt";
    outputs["model"] = "model.svmm";
    if (fp.arm.uses_plan) outputs["plan"] = "plan.mcca";
    summary["outputs"] = outputs;
    run_stage("cli", "summary", [&] {
        write_text_file(summary.dump(2) + "\n", res.summary_path);
    });

    std::ostringstream text;
    if (fmt == OutputFormat::text) {
        text << "fusion: " << cfg.fusion;
        if (cfg.fusion != "none") text << " (" << fuse_mode_name(cfg.fuse_mode) << ")";
        text << ", views:";
        for (const std::string& v : res.fused_views) text << ' ' << v;
        text << "\n\n" << report_text(res.rep) << "\n";
        text << "accuracy: " << format17(res.accuracy) << "\n";
        text << "out: " << cfg.out_dir << " (report.csv report.txt summary.json"
             << (fp.arm.uses_plan ? " plan.mcca" : "") << " model.svmm)\n";
    } else if (fmt == OutputFormat::csv) {
        text << report_csv(res.rep);
    } else {
        json overall;
        overall["record"] = "overall";
        overall["accuracy"] = res.accuracy;
        overall["fusion"] = cfg.fusion;
        overall["metrics"] = overall_json(res.rep.overall);
        text << overall.dump() << "\n";
        for (std::size_t i = 0; i < res.rep.per_class.size(); ++i) {
            json row = class_metrics_json(res.rep.class_names[i], res.rep.per_class[i]);
            row["record"] = "class";
            text << row.dump() << "\n";
        }
    }
    res.rendered = text.str();
    return res;
}

NoiseSweepResult cmd_noise_sweep(const PipelineConfig& cfg, OutputFormat fmt) {
    cfg.validate();
    if (cfg.source != "generator")
        throw ConfigError("noise sweep requires a generator dataset: manifests carry "
                          "extracted features, not the raw patches the protocol corrupts");
    if (cfg.levels.empty())
        throw ConfigError("noise sweep needs at least one level");
    run_stage("cli", "output-dir", [&] { ensure_dir(cfg.out_dir); });

    FittedPipeline fp = fit_pipeline(cfg);

    NoiseSweepResult res;
    res.levels = cfg.levels;
    res.accuracies.reserve(cfg.levels.size());
    for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
        std::vector<ImagePatch> corrupted;
        corrupted.reserve(fp.data.test_patches.size());
        run_stage("noise_sim", "inject", [&] {
            for (std::size_t pi = 0; pi < fp.data.test_patches.size(); ++pi) {
                const std::uint64_t patch_seed = derive_seed(
                    cfg.seed, "noise-L" + std::to_string(li) + "-P" + std::to_string(pi));
                corrupted.push_back(
                    inject_noise(fp.data.test_patches[pi], cfg.levels[li], patch_seed));
            }
        });
        const std::vector<FeatureSet> views = run_stage("noise_sim", "re-extract", [&] {
            return extract_test_views(fp.data.task, corrupted, fp.data.test_view_noise);
        });
        res.accuracies.push_back(evaluate_arm(fp, views, fp.data.test.labels, nullptr));
    }

    const fs::path out(cfg.out_dir);
    res.csv_path = (out / "sweep.csv").string();
    res.plot_path = (out / "sweep_plot.dat").string();
    res.summary_path = (out / "sweep_summary.json").string();

    std::ostringstream csv;
    csv << "level,accuracy\n";
    for (std::size_t i = 0; i < res.levels.size(); ++i)
        csv << format17(res.levels[i]) << ',' << format17(res.accuracies[i]) << '\n';
    std::ostringstream plot;
    plot << "# level accuracy\n";
    for (std::size_t i = 0; i < res.levels.size(); ++i)
        plot << format17(res.levels[i]) << ' ' << format17(res.accuracies[i]) << '\n';
    json summary;
    summary["command"] = "noise-sweep";
    summary["levels"] = res.levels;
    summary["accuracies"] = res.accuracies;
    summary["fusion"]["arm"] = cfg.fusion;
    summary["config"] = config_json(cfg);
    summary["seeds"]["root"] = cfg.seed;
    summary["seeds"]["svm"] = fp.svm_seed;
    summary["seeds"]["dataset"] = fp.data.task.seed;
    run_stage("cli", "export", [&] {
        write_text_file(csv.str(), res.csv_path);
        write_text_file(plot.str(), res.plot_path);
        write_text_file(summary.dump(2) + "\n", res.summary_path);
    });

    std::ostringstream text;
    if (fmt == OutputFormat::text) {
        text << "level      accuracy\n";
        char buf[64];
        for (std::size_t i = 0; i < res.levels.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%-10.4g %.6g\n", res.levels[i], res.accuracies[i]);
            text << buf;
        }
        text << "out: " << cfg.out_dir << " (sweep.csv sweep_plot.dat sweep_summary.json)\n";
    } else if (fmt == OutputFormat::csv) {
        text << csv.str();
    } else {
        for (std::size_t i = 0; i < res.levels.size(); ++i) {
            json row;
            row["record"] = "level";
            row["level"] = res.levels[i];
            row["accuracy"] = res.accuracies[i];
            text << row.dump() << "\n";
        }
    }
    res.rendered = text.str();
    return res;
}

namespace {

std::string stack_label(const ConvStackSpec& s) {
    std::string label = std::to_string(s.filter_size) + "x" + std::to_string(s.filter_size) +
                        " x" + std::to_string(s.depth) + " @K=" + std::to_string(s.channels);
    if (s.stride != 1) label += " s=" + std::to_string(s.stride);
    return label;
}

} // namespace

NetspecResult cmd_netspec(const std::vector<ConvStackSpec>& stacks, OutputFormat fmt) {
    if (stacks.empty())
        throw ConfigError("netspec needs at least one stack");
    NetspecResult res;
    for (const ConvStackSpec& s : stacks) {
        NetspecRow row;
        row.spec = s;
        row.params = stack_params(s);
        row.symbolic = stack_params_symbolic(s);
        row.receptive_field = effective_receptive_field(std::vector<FilterLayer>(
            static_cast<std::size_t>(s.depth), FilterLayer{s.filter_size, s.stride}));
        res.rows.push_back(std::move(row));
    }
    if (res.rows.size() == 2) {
        res.has_ratio = true;
        res.ratio = params_ratio(res.rows[0].spec, res.rows[1].spec);
    }

    std::ostringstream text;
    if (fmt == OutputFormat::text) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-18s %12s %10s %10s %12s\n", "stack", "params",
                      "symbolic", "erf", "ratio_vs_0");
        text << buf;
        for (const NetspecRow& row : res.rows) {
            const double ratio = static_cast<double>(row.params) /
                                 static_cast<double>(res.rows.front().params);
            std::snprintf(buf, sizeof(buf), "%-18s %12llu %10s %10lld %12.6g\n",
                          stack_label(row.spec).c_str(),
                          static_cast<unsigned long long>(row.params), row.symbolic.c_str(),
                          static_cast<long long>(row.receptive_field), ratio);
            text << buf;
        }
        if (res.has_ratio) {
            std::snprintf(buf, sizeof(buf),
                          "second/first parameter ratio: %.10g (%+.4g%% parameters)\n",
                          res.ratio, (res.ratio - 1.0) * 100.0);
            text << buf;
        }
    } else if (fmt == OutputFormat::csv) {
        text << "filter_size,depth,channels,stride,params,symbolic,receptive_field,"
                "ratio_vs_first\n";
        for (const NetspecRow& row : res.rows) {
            const double ratio = static_cast<double>(row.params) /
                                 static_cast<double>(res.rows.front().params);
            text << row.spec.filter_size << ',' << row.spec.depth << ','
                 << row.spec.channels << ',' << row.spec.stride << ',' << row.params << ','
                 << row.symbolic << ',' << row.receptive_field << ',' << format17(ratio)
                 << '\n';
        }
    } else {
        for (const NetspecRow& row : res.rows) {
            json j;
            j["record"] = "stack";
            j["filter_size"] = row.spec.filter_size;
            j["depth"] = row.spec.depth;
            j["channels"] = row.spec.channels;
            j["stride"] = row.spec.stride;
            j["params"] = row.params;
            j["symbolic"] = row.symbolic;
            j["receptive_field"] = row.receptive_field;
            j["ratio_vs_first"] = static_cast<double>(row.params) /
                                  static_cast<double>(res.rows.front().params);
            text << j.dump() << "\n";
        }
        if (res.has_ratio) {
            json j;
            j["record"] = "ratio";
            j["ratio"] = res.ratio;
            text << j.dump() << "\n";
        }
    }
    res.rendered = text.str();
    return res;
}

NetspecResult cmd_netspec_preset(const std::string& name, OutputFormat fmt) {
    if (name == "3x3-vs-7x7") {
        // Same 7x7 receptive field two ways: three stacked 3x3 layers vs one
        // 7x7 layer, at 64 channels.
        ConvStackSpec small{3, 3, 64, 1};
        ConvStackSpec large{7, 1, 64, 1};
        return cmd_netspec({small, large}, fmt);
    }
    throw ConfigError("unknown netspec preset '" + name + "' (available: 3x3-vs-7x7)");
}

ConvStackSpec parse_stack_arg(const std::string& s) {
    ConvStackSpec spec;
    bool saw_k = false;
    for (const std::string& part : split_list(s)) {
        const std::size_t eq = part.find('=');
        if (eq == std::string::npos)
            throw ConfigError("stack spec part '" + part + "' is not key=value");
        const std::string key = trim(part.substr(0, eq));
        const std::string val = trim(part.substr(eq + 1));
        const std::int64_t num = static_cast<std::int64_t>(cfg_u64(key, val));
        if (key == "k") {
            spec.filter_size = num;
            saw_k = true;
        } else if (key == "d") {
            spec.depth = num;
        } else if (key == "K") {
            spec.channels = num;
        } else if (key == "stride") {
            spec.stride = num;
        } else {
            throw ConfigError("unknown stack spec key '" + key + "' (expected k, d, K, stride)");
        }
    }
    if (!saw_k)
        throw ConfigError("stack spec needs at least k=<filter size>");
    spec.validate();
    return spec;
}

namespace {

std::string preview_matrix(const Eigen::MatrixXd& m, Eigen::Index limit = 5) {
    std::ostringstream out;
    const Eigen::Index rows = std::min(m.rows(), limit);
    const Eigen::Index cols = std::min(m.cols(), limit);
    for (Eigen::Index i = 0; i < rows; ++i) {
        out << "  ";
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (j) out << ' ';
            out << format17(m(i, j));
        }
        if (cols < m.cols()) out << " ...";
        out << '\n';
    }
    if (rows < m.rows()) out << "  ...\n";
    return out.str();
}

} // namespace

std::string cmd_inspect(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    char magic[6] = {};
    in.read(magic, sizeof(magic));
    const std::streamsize got = in.gcount();
    in.clear();
    in.seekg(0);

    std::ostringstream out;
    auto is_magic = [&](const char* m) {
        return got == 6 && std::memcmp(magic, m, 6) == 0;
    };
    if (is_magic("FMAT1\0")) {
        const FeatureMatrix m = load_matrix(path, MatrixFormat::fmat);
        out << "fmat matrix: " << m.p() << " x " << m.n() << "\n" << preview_matrix(m.data);
        return out.str();
    }
    if (is_magic("CCAT1\0")) {
        const CcaTransform t = load_cca(path);
        out << "cca transform: p=" << t.p() << " q=" << t.q() << " rank=" << t.r
            << " ridge_rel=" << format17(t.ridge) << "\n";
        out << "gamma:";
        for (Eigen::Index i = 0; i < std::min<Eigen::Index>(t.r, 10); ++i)
            out << ' ' << format17(t.gamma(i));
        if (t.r > 10) out << " ...";
        out << "\n";
        return out.str();
    }
    if (is_magic("MCCA1\0")) {
        const MccaPlan plan = load_mcca(path);
        out << "mcca plan: lambda=" << plan.lambda << " fuse_mode="
            << fuse_mode_name(plan.fuse_mode) << " ridge_rel=" << format17(plan.ridge)
            << " fitted=" << (plan.fitted ? "yes" : "no") << "\n";
        out << "inputs:\n";
        for (const std::string& id : plan.input_ids)
            out << "  " << id << " (rank " << plan.input_ranks.at(id) << ")\n";
        out << "stages:\n";
        for (std::size_t i = 0; i < plan.stages.size(); ++i) {
            const MccaStage& s = plan.stages[i];
            out << "  " << (i + 1) << ": " << s.left_id << " + " << s.right_id << " -> "
                << s.output_id << " (rank " << s.output_rank << ")\n";
        }
        return out.str();
    }
    if (is_magic("SVMM1\0")) {
        const SvmModel model = load_svm(path);
        out << "svm model: classes=" << model.classes << " loss=" << svm_loss_name(model.loss)
            << " input_dim=" << model.input_dim()
            << " standardized=" << (model.feature_mean.size() ? "yes" : "no") << "\n";
        for (std::size_t h = 0; h < model.histories.size(); ++h) {
            out << "  head " << h << ": " << model.histories[h].size() << " epochs";
            if (!model.histories[h].empty())
                out << ", final objective "
                    << format17(model.histories[h].back().objective);
            out << "\n";
        }
        return out.str();
    }

    // Text artifacts: DATASPEC1 records, report CSVs, dataset manifests.
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (text.rfind("DATASPEC1", 0) == 0 || text.rfind("class,", 0) == 0 ||
        text.rfind("level,accuracy", 0) == 0 || text.find("view=") != std::string::npos ||
        text.rfind("epoch,objective,lr", 0) == 0) {
        return text;
    }
    throw ParseError("'" + path + "' is not a recognized artifact");
}

} // namespace mvcca
