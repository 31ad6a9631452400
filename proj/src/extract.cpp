#include "biasaudit/extract.hpp"

#include <algorithm>

#include "biasaudit/errors.hpp"
#include "biasaudit/text.hpp"

namespace biasaudit {

std::string to_string(Gender g) {
    switch (g) {
        case Gender::Male: return "M";
        case Gender::Female: return "F";
        case Gender::Unknown: return "U";
    }
    return "U";
}

Gender detect_gender(const std::string& caption, const AttributeLexicon& lexicon) {
    for (const auto& term : lexicon.gender_female)
        if (match_term(caption, term)) return Gender::Female;
    for (const auto& term : lexicon.gender_male)
        if (match_term(caption, term)) return Gender::Male;
    return Gender::Unknown;
}

std::string detect_class(const std::string& caption,
                         const std::vector<TermClass>& class_map) {
    for (const auto& cls : class_map)
        for (const auto& term : cls.terms)
            if (match_term(caption, term)) return cls.name;
    return kUnknownClass;
}

namespace {

std::map<std::string, bool> term_bits(const std::string& caption,
                                      const std::vector<std::string>& terms) {
    std::map<std::string, bool> bits;
    for (const auto& term : terms) bits[term] = match_term(caption, term);
    return bits;
}

} // namespace

AttributeVector extract_attributes(const CaptionRecord& record, const PromptSpec& spec,
                                   const AttributeLexicon& lexicon) {
    if (record.prompt_id != spec.prompt_id)
        throw SpecMismatch("record prompt '" + record.prompt_id +
                           "' does not match spec '" + spec.prompt_id + "'");
    AttributeVector vec;
    const auto& caption = record.caption;
    vec.gender = detect_gender(caption, lexicon);
    vec.ethnicity = detect_class(caption, lexicon.ethnicity);
    vec.skin_tone = detect_class(caption, lexicon.skin_tone);
    vec.species = detect_class(caption, lexicon.species);
    vec.grounded = term_bits(caption, spec.grounded_keywords);
    vec.implied = term_bits(caption, spec.implied_elements);
    vec.hallucination = term_bits(caption, spec.hallucination_terms);
    vec.cultural = term_bits(caption, spec.cultural_refs);
    for (const auto& cls : lexicon.species) {
        bool hit = false;
        for (const auto& term : cls.terms)
            if (match_term(caption, term)) { hit = true; break; }
        vec.species_hits[cls.name] = hit;
    }
    return vec;
}

namespace {

// Class list with a trailing Unknown unless the declared set already has one.
std::vector<std::string> with_unknown(std::vector<std::string> names) {
    if (std::find(names.begin(), names.end(), kUnknownClass) == names.end())
        names.push_back(kUnknownClass);
    return names;
}

GroupDistribution tally(const std::vector<std::string>& classes,
                        const std::vector<std::string>& values) {
    std::vector<std::int64_t> counts(classes.size(), 0);
    for (const auto& v : values) {
        auto it = std::find(classes.begin(), classes.end(), v);
        if (it == classes.end())
            throw AuditError("value '" + v + "' outside declared class set");
        counts[static_cast<std::size_t>(it - classes.begin())]++;
    }
    return GroupDistribution(classes, std::move(counts));
}

} // namespace

ExtractionSummary extract_all(const std::vector<CaptionRecord>& records,
                              const PromptSpec& spec, const AttributeLexicon& lexicon) {
    if (records.empty()) throw EmptySlice();
    ExtractionSummary summary;
    summary.vectors.reserve(records.size());
    std::vector<std::string> genders, ethnicities, skins, species;
    for (const auto& rec : records) {
        auto vec = extract_attributes(rec, spec, lexicon);
        genders.push_back(to_string(vec.gender));
        ethnicities.push_back(vec.ethnicity);
        skins.push_back(vec.skin_tone);
        species.push_back(vec.species);
        summary.vectors.push_back(std::move(vec));
    }
    summary.gender = tally({"M", "F", "U"}, genders);
    summary.ethnicity = tally(with_unknown(lexicon.ethnicity_classes()), ethnicities);
    summary.skin_tone = tally(with_unknown(lexicon.skin_tone_classes()), skins);
    summary.species = tally(with_unknown(lexicon.species_classes()), species);
    return summary;
}

} // namespace biasaudit
