#include "biasaudit/specs.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "biasaudit/errors.hpp"
#include "biasaudit/text.hpp"

namespace biasaudit {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::set<std::string> kEthnicityClasses = {
    "White", "Black", "Asian", "Hispanic", "Middle Eastern", "South Asian"};
const std::set<std::string> kSkinToneClasses = {"Fair", "Medium", "Dark", "Unknown"};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Normalizes entries and enforces the term-list invariants.
std::vector<std::string> term_list(const ordered_json& arr, const std::string& where) {
    if (!arr.is_array()) throw InvalidSpec(where + " must be an array of strings");
    std::vector<std::string> terms;
    std::set<std::string> seen;
    for (const auto& item : arr) {
        if (!item.is_string()) throw InvalidSpec(where + " entries must be strings");
        std::string term = normalize_text(item.get<std::string>());
        if (term.empty()) throw InvalidSpec(where + " contains an empty term");
        if (!seen.insert(term).second)
            throw InvalidSpec(where + " contains duplicate term '" + term + "'");
        terms.push_back(std::move(term));
    }
    return terms;
}

// A term set that must be present and non-empty.
std::vector<std::string> required_terms(const ordered_json& obj, const char* key,
                                        const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw MissingTermSet(where + " is missing term set " + key);
    auto terms = term_list(*it, where + "." + key);
    if (terms.empty()) throw EmptyTermList(where + "." + key + " must not be empty");
    return terms;
}

std::vector<std::string> optional_terms(const ordered_json& obj, const char* key,
                                        const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) return {};
    return term_list(*it, where + "." + key);
}

std::vector<TermClass> class_map(const ordered_json& obj, const std::string& where,
                                 bool allow_empty_unknown) {
    if (!obj.is_object()) throw InvalidSpec(where + " must be an object");
    std::vector<TermClass> classes;
    for (const auto& [name, terms] : obj.items()) {
        TermClass tc;
        tc.name = name;
        tc.terms = term_list(terms, where + "." + name);
        if (tc.terms.empty() && !(allow_empty_unknown && name == "Unknown"))
            throw EmptyTermList(where + "." + name + " must not be empty");
        classes.push_back(std::move(tc));
    }
    return classes;
}

void check_class_set(const std::vector<TermClass>& classes,
                     const std::set<std::string>& expected, const std::string& where) {
    std::set<std::string> got;
    for (const auto& c : classes) {
        if (!expected.count(c.name))
            throw UnknownClassName(where + " declares unknown class '" + c.name + "'");
        if (!got.insert(c.name).second)
            throw UnknownClassName(where + " declares class '" + c.name + "' twice");
    }
    for (const auto& name : expected)
        if (!got.count(name))
            throw UnknownClassName(where + " must declare class '" + name + "' (" +
                                   std::to_string(expected.size()) + " classes required)");
}

PromptSpec parse_prompt(const ordered_json& obj) {
    if (!obj.is_object()) throw InvalidSpec("prompt entry must be an object");
    PromptSpec spec;
    if (!obj.contains("id") || !obj["id"].is_string())
        throw InvalidSpec("prompt entry missing string 'id'");
    spec.prompt_id = obj["id"].get<std::string>();
    const std::string where = "prompt '" + spec.prompt_id + "'";
    if (!obj.contains("text") || !obj["text"].is_string())
        throw InvalidSpec(where + " missing string 'text'");
    spec.prompt_text = normalize_text(obj["text"].get<std::string>());
    if (!obj.contains("path") || !obj["path"].is_string())
        throw InvalidSpec(where + " missing 'path' (demographic|contextual)");
    spec.path = prompt_path_from_string(obj["path"].get<std::string>());
    if (obj.contains("axis")) {
        if (!obj["axis"].is_string()) throw InvalidSpec(where + " 'axis' must be a string");
        spec.axis = axis_from_string(obj["axis"].get<std::string>());
    }

    spec.grounded_keywords = required_terms(obj, "grounded_keywords", where);
    spec.implied_elements = required_terms(obj, "implied_elements", where);
    spec.hallucination_terms = optional_terms(obj, "hallucination_terms", where);
    spec.cultural_refs = optional_terms(obj, "cultural_refs", where);
    if (spec.path == PromptPath::Demographic) {
        spec.stereotype_terms = required_terms(obj, "stereotype_terms", where);
        spec.diversity_terms = required_terms(obj, "diversity_terms", where);
    } else {
        spec.stereotype_terms = optional_terms(obj, "stereotype_terms", where);
        spec.diversity_terms = optional_terms(obj, "diversity_terms", where);
    }
    return spec;
}

} // namespace

std::string to_string(PromptPath path) {
    return path == PromptPath::Demographic ? "demographic" : "contextual";
}

std::string to_string(DemographicAxis axis) {
    switch (axis) {
        case DemographicAxis::Gender: return "gender";
        case DemographicAxis::Ethnicity: return "ethnicity";
        case DemographicAxis::SkinTone: return "skin_tone";
    }
    return "gender";
}

PromptPath prompt_path_from_string(const std::string& s) {
    if (s == "demographic") return PromptPath::Demographic;
    if (s == "contextual") return PromptPath::Contextual;
    throw InvalidSpec("unknown prompt path '" + s + "'");
}

DemographicAxis axis_from_string(const std::string& s) {
    if (s == "gender") return DemographicAxis::Gender;
    if (s == "ethnicity") return DemographicAxis::Ethnicity;
    if (s == "skin_tone") return DemographicAxis::SkinTone;
    throw InvalidSpec("unknown demographic axis '" + s + "'");
}

std::vector<std::string> AttributeLexicon::ethnicity_classes() const {
    std::vector<std::string> names;
    for (const auto& c : ethnicity) names.push_back(c.name);
    return names;
}

std::vector<std::string> AttributeLexicon::skin_tone_classes() const {
    std::vector<std::string> names;
    for (const auto& c : skin_tone) names.push_back(c.name);
    return names;
}

std::vector<std::string> AttributeLexicon::species_classes() const {
    std::vector<std::string> names;
    for (const auto& c : species) names.push_back(c.name);
    return names;
}

const PromptSpec& SpecSet::spec_for(const std::string& prompt_id) const {
    for (const auto& p : prompts)
        if (p.prompt_id == prompt_id) return p;
    throw UnknownPrompt(prompt_id);
}

bool SpecSet::has_prompt(const std::string& prompt_id) const {
    return std::any_of(prompts.begin(), prompts.end(),
                       [&](const PromptSpec& p) { return p.prompt_id == prompt_id; });
}

SpecSet parse_specs(const std::string& json_text) {
    ordered_json doc = ordered_json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw InvalidSpec("configuration is not a JSON object");
    if (!doc.contains("version") || !doc["version"].is_number_integer())
        throw InvalidSpec("configuration missing integer 'version'");
    SpecSet specs;
    specs.version = doc["version"].get<int>();
    if (specs.version != 1)
        throw InvalidSpec("unsupported schema version " + std::to_string(specs.version));

    if (!doc.contains("prompts") || !doc["prompts"].is_array())
        throw InvalidSpec("configuration missing 'prompts' array");
    std::set<std::string> prompt_ids;
    for (const auto& entry : doc["prompts"]) {
        PromptSpec spec = parse_prompt(entry);
        if (!prompt_ids.insert(spec.prompt_id).second)
            throw InvalidSpec("duplicate prompt id '" + spec.prompt_id + "'");
        specs.prompts.push_back(std::move(spec));
    }
    if (specs.prompts.empty()) throw InvalidSpec("configuration declares no prompts");

    if (!doc.contains("lexicon") || !doc["lexicon"].is_object())
        throw InvalidSpec("configuration missing 'lexicon' object");
    const auto& lex = doc["lexicon"];
    auto& out = specs.lexicon;
    out.gender_female = required_terms(lex, "gender_female", "lexicon");
    out.gender_male = required_terms(lex, "gender_male", "lexicon");
    if (!lex.contains("ethnicity")) throw MissingTermSet("lexicon is missing 'ethnicity'");
    out.ethnicity = class_map(lex["ethnicity"], "lexicon.ethnicity", false);
    check_class_set(out.ethnicity, kEthnicityClasses, "lexicon.ethnicity");
    if (!lex.contains("skin_tone")) throw MissingTermSet("lexicon is missing 'skin_tone'");
    out.skin_tone = class_map(lex["skin_tone"], "lexicon.skin_tone", true);
    check_class_set(out.skin_tone, kSkinToneClasses, "lexicon.skin_tone");
    if (!lex.contains("species")) throw MissingTermSet("lexicon is missing 'species'");
    out.species = class_map(lex["species"], "lexicon.species", false);
    if (out.species.empty()) throw EmptyTermList("lexicon.species must declare classes");
    for (const auto& c : out.species)
        if (c.name == "Unknown")
            throw UnknownClassName("lexicon.species may not declare 'Unknown'");
    if (lex.contains("scene_markers"))
        out.scene_markers = class_map(lex["scene_markers"], "lexicon.scene_markers", false);
    return specs;
}

SpecSet load_specs(const std::string& path) {
    namespace fs = std::filesystem;
    std::string file = path;
    std::error_code ec;
    if (fs::is_directory(path, ec)) file = (fs::path(path) / "specs.json").string();
    return parse_specs(read_file(file));
}

} // namespace biasaudit
