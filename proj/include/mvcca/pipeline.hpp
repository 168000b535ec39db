#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvcca/cca.hpp"
#include "mvcca/errors.hpp"
#include "mvcca/mcca.hpp"
#include "mvcca/metrics.hpp"
#include "mvcca/netspec.hpp"
#include "mvcca/noise.hpp"
#include "mvcca/svm.hpp"

namespace mvcca {

enum class OutputFormat { text, csv, json_lines };

OutputFormat output_format_from_string(const std::string& s);

/// Run settings parsed from a sectioned key=value file. Sections: [dataset],
/// [fusion], [svm], [noise], [run]. All randomness derives from `seed` via
/// per-stage sub-seeds, so reruns are byte-identical.
struct PipelineConfig {
    // [dataset]
    std::string source = "generator";        // "generator" | "manifest"
    ClassTaskSpec task;                      // generator parameters
    std::string dataspec_path;               // optional DATASPEC1 file overriding `task`
    std::string train_manifest;              // manifest source paths
    std::string test_manifest;

    // [fusion]
    std::string fusion = "mcca";             // "cca" | "mcca" | "none"
    FuseMode fuse_mode = FuseMode::sum;
    double ridge_rel = 1e-4;

    // [svm]
    SvmConfig svm;

    // [noise]
    std::vector<double> levels = {0.01, 0.05, 0.10, 0.15};

    // [run]
    std::uint64_t seed = 42;
    std::string out_dir = "out";

    void validate() const;
};

PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);

/// Generates the configured dataset and writes train/test manifests plus the
/// DATASPEC1 record into out_dir.
struct SynthResult {
    std::string dataspec_path;
    std::string train_manifest;
    std::string test_manifest;
    Eigen::Index train_samples = 0;
    Eigen::Index test_samples = 0;
    std::string rendered;
};

SynthResult cmd_synth(const PipelineConfig& cfg, OutputFormat fmt = OutputFormat::text);

/// Fuse(train) -> train SVM -> apply plan to test -> predict -> report.
/// Writes report.csv, report.txt, summary.json, model.svmm and (for cca/mcca)
/// plan.mcca into out_dir.
struct PipelineResult {
    MetricsReport rep;
    double accuracy = 0.0;
    std::vector<std::string> fused_views;    // inputs the fusion arm consumed
    std::string report_csv_path;
    std::string report_text_path;
    std::string summary_path;
    std::string plan_path;                   // empty when fusion = none
    std::string model_path;
    std::string rendered;
};

PipelineResult cmd_pipeline(const PipelineConfig& cfg, OutputFormat fmt = OutputFormat::text);

/// Trains clean, then corrupts the raw test patches at each configured level
/// and re-evaluates. Requires a generator dataset (manifests carry no
/// patches). Writes sweep.csv and sweep_plot.dat into out_dir.
struct NoiseSweepResult {
    std::vector<double> levels;
    std::vector<double> accuracies;
    std::string csv_path;
    std::string plot_path;
    std::string summary_path;
    std::string rendered;
};

NoiseSweepResult cmd_noise_sweep(const PipelineConfig& cfg,
                                 OutputFormat fmt = OutputFormat::text);

/// Parameter/receptive-field table for a list of conv stacks. When exactly
/// two stacks are given the table also reports params(b)/params(a).
struct NetspecRow {
    ConvStackSpec spec;
    std::uint64_t params = 0;
    std::string symbolic;
    std::int64_t receptive_field = 0;
};

struct NetspecResult {
    std::vector<NetspecRow> rows;
    bool has_ratio = false;
    double ratio = 0.0;
    std::string rendered;
};

NetspecResult cmd_netspec(const std::vector<ConvStackSpec>& stacks,
                          OutputFormat fmt = OutputFormat::text);
NetspecResult cmd_netspec_preset(const std::string& name,
                                 OutputFormat fmt = OutputFormat::text);

/// Parses "k=3,d=3,K=64" (optional ",stride=1") into a stack spec.
ConvStackSpec parse_stack_arg(const std::string& s);

/// Dumps any serialized artifact (fmat, CCAT1, MCCA1, SVMM1, DATASPEC1,
/// report CSV, manifest) as human-readable text.
std::string cmd_inspect(const std::string& path);

} // namespace mvcca
