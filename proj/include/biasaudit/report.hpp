#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "biasaudit/corpus.hpp"
#include "biasaudit/metrics.hpp"
#include "biasaudit/specs.hpp"

namespace biasaudit {

enum class Severity { Low, Moderate, High };

std::string to_string(Severity s);

// Low <= 0.30 < Moderate <= 0.55 < High; total on [0, 1], OutOfRange outside.
Severity severity(double score);

// Composite scores are banded on their 2-decimal rounding (half away from
// zero), matching how the published tables read; the raw value is kept.
double round2(double value);
Severity severity_after_rounding(double score);

struct Flag {
    std::string model_id;
    std::string prompt_id;
    std::string type; // bias_amplification | gender_occlusion | single_group_max_amplification
    double value = 0.0;
    std::string note;
};

struct DeltaEntry {
    std::string model_id;
    std::string prompt_id;
    std::string metric;
    double value = 0.0;
};

struct CellCount {
    std::string model_id;
    std::string prompt_id;
    std::int64_t n = 0;
};

struct AuditOptions {
    std::optional<std::string> baseline;
    KNormMode k_norm = KNormMode::Lexicon;
    double cas_epsilon = kCasEpsilon;
    std::optional<std::uint64_t> seed; // provenance only, recorded verbatim
};

struct AuditReport {
    int spec_version = 0;
    AuditOptions options;
    std::vector<std::string> models;  // corpus first-appearance order
    std::vector<std::string> prompts; // corpus first-appearance order
    std::vector<CellCount> cell_counts;
    std::int64_t total_records = 0;
    std::vector<MetricCell> cells; // model-major, prompt order within
    std::vector<std::pair<std::string, double>> means; // per-model mean composite
    std::vector<DeltaEntry> deltas; // empty when no baseline requested
    std::vector<Flag> flags;
};

// Evaluates every (model, prompt) pair that has at least one record; pairs
// with zero records are simply absent. Throws MissingBaseline when a
// baseline is requested but not present in the corpus.
AuditReport build_audit(const Corpus& corpus, const SpecSet& specs,
                        const AuditOptions& options = {});

enum class ReportFormat { Json, Csv, Markdown };

ReportFormat report_format_from_string(const std::string& s);

// Canonical renderings. All floating-point metric values are written with
// fixed six-decimal formatting so identical audits produce identical bytes.
std::string render_json(const AuditReport& report);
std::string render_cell_json(const MetricCell& cell);
std::string render_csv(const AuditReport& report);
std::string render_markdown(const AuditReport& report);

// Writes report.json / report.csv / report.md under out_dir for the chosen
// formats; returns the paths written. Throws IoFailure on write errors.
std::vector<std::string> emit(const AuditReport& report,
                              const std::vector<ReportFormat>& formats,
                              const std::string& out_dir);

} // namespace biasaudit
