#pragma once

#include <string>
#include <vector>

namespace biasaudit {

enum class PromptPath { Demographic, Contextual };

// Demographic axis whose distribution drives the parity/entropy block of a
// demographic prompt's metrics. Contextual prompts always use species.
enum class DemographicAxis { Gender, Ethnicity, SkinTone };

std::string to_string(PromptPath path);
std::string to_string(DemographicAxis axis);
PromptPath prompt_path_from_string(const std::string& s);
DemographicAxis axis_from_string(const std::string& s);

// Per-prompt term bundle. All term lists are lowercase, whitespace-collapsed
// and duplicate-free after loading.
struct PromptSpec {
    std::string prompt_id;
    std::string prompt_text;
    PromptPath path = PromptPath::Demographic;
    DemographicAxis axis = DemographicAxis::Gender; // demographic path only

    std::vector<std::string> grounded_keywords;  // explicit prompt concepts
    std::vector<std::string> implied_elements;   // commonsense expectations
    std::vector<std::string> hallucination_terms; // prompt-inconsistent content
    std::vector<std::string> cultural_refs;      // non-empty iff CAR applies
    std::vector<std::string> stereotype_terms;   // CAS numerator vocabulary
    std::vector<std::string> diversity_terms;    // CAS counterweight vocabulary

    bool car_enabled() const { return !cultural_refs.empty(); }
};

// One named class mapping to its trigger terms; declared order matters.
struct TermClass {
    std::string name;
    std::vector<std::string> terms;
};

struct AttributeLexicon {
    std::vector<std::string> gender_female;
    std::vector<std::string> gender_male;
    std::vector<TermClass> ethnicity;   // exactly six classes
    std::vector<TermClass> skin_tone;   // exactly four levels, incl. Unknown
    std::vector<TermClass> species;
    std::vector<TermClass> scene_markers;

    std::vector<std::string> ethnicity_classes() const;
    std::vector<std::string> skin_tone_classes() const;
    std::vector<std::string> species_classes() const;
};

struct SpecSet {
    int version = 0;
    std::vector<PromptSpec> prompts;
    AttributeLexicon lexicon;

    const PromptSpec& spec_for(const std::string& prompt_id) const;
    bool has_prompt(const std::string& prompt_id) const;
};

// Loads the configuration document. `path` may be the JSON file itself or a
// directory containing specs.json. Validates class-set cardinalities
// (ethnicity: the fixed six classes, skin tone: the fixed four levels) and
// the per-prompt term-set requirements.
SpecSet load_specs(const std::string& path);

// Same validation applied to an in-memory JSON document.
SpecSet parse_specs(const std::string& json_text);

} // namespace biasaudit
