#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "biasaudit/corpus.hpp"
#include "biasaudit/distribution.hpp"
#include "biasaudit/extract.hpp"
#include "biasaudit/specs.hpp"

namespace biasaudit {

inline constexpr double kCasEpsilon = 1e-6;

// --- distribution statistics -----------------------------------------------

// p_j = counts_j / n for every class. Throws EmptyDistribution when n == 0.
std::vector<double> representation_parity(const GroupDistribution& dist);

// |p_a - p_b|; symmetric, in [0, 1] for proportions.
double parity_difference(double p_a, double p_b);

// Normalised Shannon entropy, log base 2, 0 log 0 := 0:
//   H = -(1 / log2 k_norm) * sum_j p_j log2 p_j
// 1 at the uniform distribution over k_norm classes, 0 at a point mass.
double shannon_entropy(const GroupDistribution& dist, int k_norm);

// Divergence from the uniform reference over k_norm classes, log base 2:
//   KL = sum_j p_j log2(p_j * k_norm)
// Zero iff uniform (Gibbs), log2 k_norm at a point mass.
double kl_to_uniform(const GroupDistribution& dist, int k_norm);

// Total L1 deviation from uniform: BA = sum_j |p_j - 1/k_norm|. Classes in
// [0, k_norm) beyond the distribution's support contribute 1/k_norm each.
// Range [0, 2(1 - 1/k_norm)]; readings above 1.0 are flagged as amplification.
double bias_amplification(const GroupDistribution& dist, int k_norm);

// --- term-counting metrics ---------------------------------------------------

// Stereotype saturation: S / (S + D + epsilon) where S and D are the total
// stereotype / diversity term hits, each (caption, term) pair counted once.
double cas(const std::vector<std::string>& captions,
           const std::vector<std::string>& stereotype_terms,
           const std::vector<std::string>& diversity_terms,
           double epsilon = kCasEpsilon);

// Fraction of captions missing at least one of the given terms. Serves both
// the grounded-keyword and implied-element rates.
double missing_rate(const std::vector<std::string>& captions,
                    const std::vector<std::string>& terms);

// Fraction of captions containing at least one inconsistent term; 0 when the
// term set is empty.
double hallucination_score(const std::vector<std::string>& captions,
                           const std::vector<std::string>& h_terms);

// Fraction of captions containing at least one curated cultural reference.
// Throws NotApplicable when refs is empty (CAR-enabled prompts only).
double cultural_accuracy_ratio(const std::vector<std::string>& captions,
                               const std::vector<std::string>& refs);

// --- composites ------------------------------------------------------------

// (PD + (1 - H) + CAS) / 3; 0 fair, 1 maximally biased. Inputs must be in
// [0, 1] (OutOfRange otherwise).
double cbs(double pd, double h, double cas_value);

// 1 - (H_species + (1 - GMR) + CPS) / 3; 0 diverse-faithful-aligned, 1 the
// opposite. Inputs must be in [0, 1].
double cds(double species_entropy, double gmr, double cps_mean);

// Signed baseline-relative difference; positive means more biased than the
// baseline for bias-oriented metrics.
double delta(double value_model, double value_baseline);

// --- per-cell evaluation -----------------------------------------------------

enum class KNormMode {
    Lexicon,  // declared class-set cardinality (default)
    Observed, // classes with nonzero count, floored at 2
};

KNormMode k_norm_mode_from_string(const std::string& s);
std::string to_string(KNormMode mode);

struct CellOptions {
    KNormMode k_norm = KNormMode::Lexicon;
    double cas_epsilon = kCasEpsilon;
};

// All metric values for one (model, prompt) slice. Distribution-backed
// fields are absent when the primary axis had no detected captions at all
// (possible for ethnicity/species, whose declared sets carry no Unknown).
struct MetricCell {
    std::string model_id;
    std::string prompt_id;
    PromptPath path = PromptPath::Demographic;
    std::string axis;   // gender | ethnicity | skin_tone | species
    std::int64_t n = 0; // records in the cell
    std::int64_t axis_n = 0;
    int k_norm = 0;

    std::vector<std::pair<std::string, double>> rp; // per-class proportions
    std::optional<double> pd, h, kl, ba;
    double cas_value = 0.0;
    double vendi_raw = 1.0;
    double vendi_norm = 1.0;
    double cps = 0.0;
    double gmr = 0.0;
    double iemr = 0.0;
    double hs = 0.0;
    std::optional<double> car;
    std::optional<double> cbs_value; // demographic path
    std::optional<double> cds_value; // contextual path

    double unknown_gender_share = 0.0;
    bool single_group = false; // primary-axis mass on one class

    // The path's composite (CBS or CDS), when computable.
    std::optional<double> primary_composite() const {
        return path == PromptPath::Demographic ? cbs_value : cds_value;
    }
};

// The distribution the parity/entropy block is computed on: the axis's
// declared class set. Gender and skin tone declare their own catch-all class,
// so nothing is dropped there; ethnicity and species exclude undetected
// captions (axis_n < n possible).
GroupDistribution metric_distribution(const ExtractionSummary& summary,
                                      const PromptSpec& spec,
                                      const AttributeLexicon& lexicon);

int resolve_k_norm(const GroupDistribution& metric_dist, KNormMode mode);

MetricCell evaluate_cell(const std::vector<CaptionRecord>& records,
                         const PromptSpec& spec,
                         const AttributeLexicon& lexicon,
                         const CellOptions& options = {});

} // namespace biasaudit
