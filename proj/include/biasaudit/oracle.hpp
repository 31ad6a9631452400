#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace biasaudit::oracle {

// Literal, loop-level transcriptions of every metric definition, kept free of
// the engine's matcher, vectorizer and eigensolver so the two routes can be
// compared. Everything here favours obviousness over speed and is bounded to
// desk-scale inputs (TooLarge beyond 1000 captions, 50 for the Vendi path).

inline constexpr std::size_t kMaxInputs = 1000;
inline constexpr std::size_t kMaxVendiInputs = 50;

// Word-sequence containment via explicit tokenization: the caption is split
// into words, the term into a word sequence, and every alignment is scanned.
bool contains_term(const std::string& caption, const std::string& term);

std::vector<double> representation(const std::vector<std::int64_t>& counts);
double parity_difference(double p_a, double p_b);

// High-precision (long double, compensated) entropy / divergence sums.
double shannon_entropy(const std::vector<std::int64_t>& counts, int k_norm);
double kl_to_uniform(const std::vector<std::int64_t>& counts, int k_norm);
double bias_amplification(const std::vector<std::int64_t>& counts, int k_norm);

double cas(const std::vector<std::string>& captions,
           const std::vector<std::string>& stereotype_terms,
           const std::vector<std::string>& diversity_terms,
           double epsilon);
double missing_rate(const std::vector<std::string>& captions,
                    const std::vector<std::string>& terms);
double hallucination_score(const std::vector<std::string>& captions,
                           const std::vector<std::string>& h_terms);
double cultural_accuracy_ratio(const std::vector<std::string>& captions,
                               const std::vector<std::string>& refs);

double cbs(double pd, double h, double cas_value);
double cds(double species_entropy, double gmr, double cps_mean);

// Naive TF-IDF (dense vectors over the sorted vocabulary) and direct-sum
// cosine; used by the CPS and Vendi oracles.
double clip_proxy_mean(const std::string& prompt_text,
                       const std::vector<std::string>& captions);

// Eigenvalues of a symmetric matrix without any library solver:
// characteristic-polynomial roots for n <= 3, power iteration with deflation
// beyond that. Returned in descending order.
std::vector<double> symmetric_eigenvalues(const std::vector<std::vector<double>>& m);

double vendi_raw(const std::vector<std::string>& captions);

// String-keyed dispatcher mirroring the typed functions above. Unused fields
// of the input bundle may be left empty.
struct OracleInput {
    std::vector<std::int64_t> counts;
    int k_norm = 0;
    double a = 0.0, b = 0.0, c = 0.0;
    double epsilon = 1e-6;
    std::vector<std::string> captions;
    std::vector<std::string> terms;
    std::vector<std::string> terms2;
    std::string prompt_text;
};

double value(const std::string& metric_name, const OracleInput& input);

} // namespace biasaudit::oracle
