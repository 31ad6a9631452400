#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "biasaudit/corpus.hpp"
#include "biasaudit/specs.hpp"

namespace biasaudit {

// Deterministic stream generator (splitmix64). Written out here instead of
// using <random> distributions so that a (plan, seed) pair produces identical
// corpora on every platform and standard library.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    // Uniform in [0, bound); bound > 0.
    std::uint64_t next_below(std::uint64_t bound);
    // Derives an independent stream from a label, e.g. per (cell, axis).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

private:
    std::uint64_t state_;
};

// Plan for one synthetic (model, prompt) cell. Mixes are probability vectors
// over the axis's class names ("U"/"Unknown" allowed); term probabilities are
// per-term inclusion rates, realised as exact quotas.
struct CellPlan {
    std::string model_id;
    std::string prompt_id;
    std::int64_t n = 0;
    std::map<std::string, double> gender_mix;    // M / F / U
    std::map<std::string, double> ethnicity_mix; // declared classes + Unknown
    std::map<std::string, double> skin_mix;      // declared levels
    std::map<std::string, double> species_mix;   // declared species + Unknown
    // set name (grounded|implied|hallucination|cultural|stereotype|diversity)
    //   -> term -> inclusion probability
    std::map<std::string, std::map<std::string, double>> term_probs;
};

struct SynthesisPlan {
    std::uint64_t seed = 0;
    std::vector<CellPlan> cells;
};

SynthesisPlan load_plan(const std::string& path);
SynthesisPlan parse_plan(const std::string& json_text);

// Builds a corpus whose extraction recovers every planned class count
// exactly: class labels are assigned by largest-remainder quotas and each
// term is inserted into exactly round(p * n) captions. The generated captions
// are verified against the extractor before returning; a lexicon collision
// that would corrupt the planned counts raises PlanMismatch.
Corpus synthesize(const SynthesisPlan& plan, const SpecSet& specs);

// Exact class quotas for n draws from the given mix (largest remainder,
// ties by declared order). Exposed for tests.
std::vector<std::int64_t> quota_counts(const std::vector<double>& mix, std::int64_t n);

} // namespace biasaudit
