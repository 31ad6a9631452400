#pragma once

#include <map>
#include <string>
#include <vector>

#include "biasaudit/corpus.hpp"
#include "biasaudit/distribution.hpp"
#include "biasaudit/specs.hpp"

namespace biasaudit {

enum class Gender { Male, Female, Unknown };

std::string to_string(Gender g);

inline constexpr const char* kUnknownClass = "Unknown";

// Per-image attribute tuple plus one presence bit per term of the active
// prompt spec (and per species class).
struct AttributeVector {
    Gender gender = Gender::Unknown;
    std::string ethnicity = kUnknownClass;
    std::string skin_tone = kUnknownClass;
    std::string species = kUnknownClass; // dominant species, first hit

    // term -> matched, keys exactly the active spec's term names
    std::map<std::string, bool> grounded;
    std::map<std::string, bool> implied;
    std::map<std::string, bool> hallucination;
    std::map<std::string, bool> cultural;
    // species class -> any of its terms matched
    std::map<std::string, bool> species_hits;
};

// F if any female term matches, else M if any male term matches, else U.
// Female terms are checked first so that gendered substrings ("man" inside
// "woman") can never flip the result even if the boundary rule were relaxed.
Gender detect_gender(const std::string& caption, const AttributeLexicon& lexicon);

// First class, in declared order, with any matching term; Unknown otherwise.
// Serves ethnicity, skin tone and dominant species alike.
std::string detect_class(const std::string& caption,
                         const std::vector<TermClass>& class_map);

AttributeVector extract_attributes(const CaptionRecord& record,
                                   const PromptSpec& spec,
                                   const AttributeLexicon& lexicon);

// Whole-slice extraction. Every distribution covers the axis's full class
// range (declared classes plus a trailing Unknown where the declared set has
// none), so counts always sum to the slice size.
struct ExtractionSummary {
    std::vector<AttributeVector> vectors;
    GroupDistribution gender;    // classes M, F, U
    GroupDistribution ethnicity; // six declared classes + Unknown
    GroupDistribution skin_tone; // four declared levels (incl. Unknown)
    GroupDistribution species;   // declared species + Unknown
};

ExtractionSummary extract_all(const std::vector<CaptionRecord>& records,
                              const PromptSpec& spec,
                              const AttributeLexicon& lexicon);

} // namespace biasaudit
