#include "biasaudit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "biasaudit/errors.hpp"
#include "biasaudit/extract.hpp"
#include "biasaudit/text.hpp"

namespace biasaudit {

namespace {

using ordered_json = nlohmann::ordered_json;

// Filler vocabulary used to stitch captions together. Checked against the
// active term sets before generation so a filler can never trip a matcher.
const std::vector<std::string> kFillers = {"entry", "shows", "a", "person",
                                           "scene", "featuring", "and"};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::uint64_t DetRng::next() {
    // splitmix64
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t DetRng::next_below(std::uint64_t bound) {
    // rejection sampling keeps the draw unbiased and fully deterministic
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % bound;
}

std::uint64_t DetRng::derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    DetRng rng(seed ^ (a * 0xD6E8FEB86659FD93ULL) ^ (b * 0xCA5A826395121157ULL));
    rng.next();
    return rng.next();
}

std::vector<std::int64_t> quota_counts(const std::vector<double>& mix, std::int64_t n) {
    std::vector<std::int64_t> counts(mix.size(), 0);
    std::vector<std::pair<double, std::size_t>> fractional;
    std::int64_t assigned = 0;
    for (std::size_t j = 0; j < mix.size(); ++j) {
        const double exact = mix[j] * static_cast<double>(n);
        counts[j] = static_cast<std::int64_t>(std::floor(exact + 1e-9));
        assigned += counts[j];
        fractional.emplace_back(exact - std::floor(exact + 1e-9), j);
    }
    std::stable_sort(fractional.begin(), fractional.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::int64_t r = 0; r < n - assigned; ++r)
        counts[fractional[static_cast<std::size_t>(r) % fractional.size()].second]++;
    return counts;
}

namespace {

std::map<std::string, double> parse_mix(const ordered_json& obj, const std::string& where) {
    std::map<std::string, double> mix;
    if (!obj.is_object()) throw PlanMismatch(where + " must be an object");
    for (const auto& [name, value] : obj.items()) {
        if (!value.is_number()) throw PlanMismatch(where + "." + name + " must be a number");
        mix[name] = value.get<double>();
    }
    return mix;
}

std::vector<std::string> axis_classes_for(const std::string& axis,
                                          const AttributeLexicon& lexicon) {
    auto with_unknown = [](std::vector<std::string> names) {
        if (std::find(names.begin(), names.end(), kUnknownClass) == names.end())
            names.push_back(kUnknownClass);
        return names;
    };
    if (axis == "gender") return {"M", "F", "U"};
    if (axis == "ethnicity") return with_unknown(lexicon.ethnicity_classes());
    if (axis == "skin") return with_unknown(lexicon.skin_tone_classes());
    return with_unknown(lexicon.species_classes());
}

// Aligns a named mix to the axis class order; missing classes get probability
// zero, an empty mix puts all mass on the trailing unknown class.
std::vector<double> aligned_mix(const std::map<std::string, double>& mix,
                                const std::vector<std::string>& classes,
                                const std::string& where) {
    std::vector<double> p(classes.size(), 0.0);
    if (mix.empty()) {
        p.back() = 1.0;
        return p;
    }
    double sum = 0.0;
    for (const auto& [name, prob] : mix) {
        auto it = std::find(classes.begin(), classes.end(), name);
        if (it == classes.end())
            throw PlanMismatch(where + " names unknown class '" + name + "'");
        if (prob < 0.0) throw PlanMismatch(where + "." + name + " is negative");
        p[static_cast<std::size_t>(it - classes.begin())] = prob;
        sum += prob;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw PlanMismatch(where + " probabilities sum to " + std::to_string(sum));
    return p;
}

// Fisher-Yates with the deterministic generator.
std::vector<std::size_t> permutation(std::size_t n, DetRng& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

// class index per record, exact quota counts, shuffled deterministically
std::vector<std::size_t> assign_classes(const std::vector<double>& mix, std::int64_t n,
                                        DetRng& rng) {
    const auto counts = quota_counts(mix, n);
    std::vector<std::size_t> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < counts.size(); ++j)
        labels.insert(labels.end(), static_cast<std::size_t>(counts[j]), j);
    const auto order = permutation(static_cast<std::size_t>(n), rng);
    std::vector<std::size_t> assigned(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < assigned.size(); ++i) assigned[order[i]] = labels[i];
    return assigned;
}

const std::vector<std::string>& term_set_for(const PromptSpec& spec,
                                             const std::string& name) {
    if (name == "grounded") return spec.grounded_keywords;
    if (name == "implied") return spec.implied_elements;
    if (name == "hallucination") return spec.hallucination_terms;
    if (name == "cultural") return spec.cultural_refs;
    if (name == "stereotype") return spec.stereotype_terms;
    if (name == "diversity") return spec.diversity_terms;
    throw PlanMismatch("unknown term set '" + name + "'");
}

void check_fillers(const SpecSet& specs) {
    std::set<std::string> term_words;
    auto absorb = [&](const std::vector<std::string>& terms) {
        for (const auto& t : terms)
            for (const auto& w : split_words(t)) term_words.insert(w);
    };
    absorb(specs.lexicon.gender_female);
    absorb(specs.lexicon.gender_male);
    for (const auto& c : specs.lexicon.ethnicity) absorb(c.terms);
    for (const auto& c : specs.lexicon.skin_tone) absorb(c.terms);
    for (const auto& c : specs.lexicon.species) absorb(c.terms);
    for (const auto& c : specs.lexicon.scene_markers) absorb(c.terms);
    for (const auto& p : specs.prompts) {
        absorb(p.grounded_keywords);
        absorb(p.implied_elements);
        absorb(p.hallucination_terms);
        absorb(p.cultural_refs);
        absorb(p.stereotype_terms);
        absorb(p.diversity_terms);
    }
    for (const auto& filler : kFillers)
        if (term_words.count(filler))
            throw PlanMismatch("filler word '" + filler +
                               "' collides with the configured term sets");
}

} // namespace

SynthesisPlan parse_plan(const std::string& json_text) {
    ordered_json doc = ordered_json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw PlanMismatch("plan is not a JSON object");
    SynthesisPlan plan;
    if (!doc.contains("seed") || !doc["seed"].is_number_integer())
        throw PlanMismatch("plan missing integer 'seed'");
    plan.seed = doc["seed"].get<std::uint64_t>();
    if (!doc.contains("cells") || !doc["cells"].is_array() || doc["cells"].empty())
        throw PlanMismatch("plan missing non-empty 'cells' array");
    for (const auto& entry : doc["cells"]) {
        CellPlan cp;
        if (!entry.contains("model") || !entry["model"].is_string())
            throw PlanMismatch("cell missing string 'model'");
        cp.model_id = entry["model"].get<std::string>();
        if (!entry.contains("prompt") || !entry["prompt"].is_string())
            throw PlanMismatch("cell missing string 'prompt'");
        cp.prompt_id = entry["prompt"].get<std::string>();
        if (!entry.contains("n") || !entry["n"].is_number_integer())
            throw PlanMismatch("cell missing integer 'n'");
        cp.n = entry["n"].get<std::int64_t>();
        if (cp.n < 1) throw PlanMismatch("cell n must be >= 1");
        if (entry.contains("gender_mix")) cp.gender_mix = parse_mix(entry["gender_mix"], "gender_mix");
        if (entry.contains("ethnicity_mix"))
            cp.ethnicity_mix = parse_mix(entry["ethnicity_mix"], "ethnicity_mix");
        if (entry.contains("skin_mix")) cp.skin_mix = parse_mix(entry["skin_mix"], "skin_mix");
        if (entry.contains("species_mix"))
            cp.species_mix = parse_mix(entry["species_mix"], "species_mix");
        if (entry.contains("term_probs")) {
            if (!entry["term_probs"].is_object())
                throw PlanMismatch("term_probs must be an object");
            for (const auto& [set_name, probs] : entry["term_probs"].items())
                cp.term_probs[set_name] = parse_mix(probs, "term_probs." + set_name);
        }
        plan.cells.push_back(std::move(cp));
    }
    return plan;
}

SynthesisPlan load_plan(const std::string& path) { return parse_plan(read_file(path)); }

Corpus synthesize(const SynthesisPlan& plan, const SpecSet& specs) {
    check_fillers(specs);
    const auto& lexicon = specs.lexicon;
    std::vector<CaptionRecord> records;

    for (std::size_t cell_index = 0; cell_index < plan.cells.size(); ++cell_index) {
        const auto& cp = plan.cells[cell_index];
        const auto& spec = specs.spec_for(cp.prompt_id);
        const auto n = static_cast<std::size_t>(cp.n);

        struct Axis {
            std::string name;
            std::vector<std::string> classes;
            std::vector<std::size_t> assigned;
        };
        const std::vector<std::pair<std::string, const std::map<std::string, double>*>>
            axis_specs = {{"gender", &cp.gender_mix},
                          {"ethnicity", &cp.ethnicity_mix},
                          {"skin", &cp.skin_mix},
                          {"species", &cp.species_mix}};
        std::vector<Axis> axes;
        for (std::size_t a = 0; a < axis_specs.size(); ++a) {
            Axis axis;
            axis.name = axis_specs[a].first;
            axis.classes = axis_classes_for(axis.name, lexicon);
            const auto mix = aligned_mix(*axis_specs[a].second, axis.classes,
                                         "cell " + std::to_string(cell_index) + " " + axis.name);
            DetRng rng(DetRng::derive(plan.seed, cell_index + 1, a + 1));
            axis.assigned = assign_classes(mix, cp.n, rng);
            axes.push_back(std::move(axis));
        }

        // per-term exact insertion quotas
        struct Insertion {
            std::string term;
            std::vector<bool> included;
        };
        std::vector<Insertion> insertions;
        std::uint64_t stream_index = 100;
        const std::vector<std::string> set_order = {"grounded",      "implied",
                                                    "hallucination", "cultural",
                                                    "stereotype",    "diversity"};
        for (const auto& set_name : set_order) {
            auto it = cp.term_probs.find(set_name);
            if (it == cp.term_probs.end()) continue;
            const auto& set_terms = term_set_for(spec, set_name);
            for (const auto& [term, prob] : it->second) {
                if (std::find(set_terms.begin(), set_terms.end(), term) == set_terms.end())
                    throw PlanMismatch("term '" + term + "' is not in spec set '" +
                                       set_name + "' of prompt '" + cp.prompt_id + "'");
                if (prob < 0.0 || prob > 1.0)
                    throw PlanMismatch("inclusion probability for '" + term +
                                       "' outside [0, 1]");
                const auto quota = static_cast<std::size_t>(
                    std::floor(prob * static_cast<double>(cp.n) + 0.5));
                DetRng rng(DetRng::derive(plan.seed, cell_index + 1, stream_index++));
                const auto order = permutation(n, rng);
                Insertion ins;
                ins.term = term;
                ins.included.assign(n, false);
                for (std::size_t i = 0; i < quota; ++i) ins.included[order[i]] = true;
                insertions.push_back(std::move(ins));
            }
        }
        for (const auto& [set_name, probs] : cp.term_probs)
            if (std::find(set_order.begin(), set_order.end(), set_name) == set_order.end())
                throw PlanMismatch("unknown term set '" + set_name + "'");

        // class term choices draw from one more derived stream
        DetRng term_rng(DetRng::derive(plan.seed, cell_index + 1, 99));
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::string> parts = {"entry", std::to_string(1000 + i), "shows", "a"};
            bool any_attr = false;
            for (const auto& axis : axes) {
                const auto& cls = axis.classes[axis.assigned[i]];
                const std::vector<std::string>* terms = nullptr;
                if (axis.name == "gender") {
                    if (cls == "F") terms = &lexicon.gender_female;
                    else if (cls == "M") terms = &lexicon.gender_male;
                } else if (cls != kUnknownClass) {
                    const auto& map = axis.name == "ethnicity" ? lexicon.ethnicity
                                      : axis.name == "skin"    ? lexicon.skin_tone
                                                               : lexicon.species;
                    for (const auto& tc : map)
                        if (tc.name == cls) { terms = &tc.terms; break; }
                }
                if (terms && !terms->empty()) {
                    parts.push_back((*terms)[term_rng.next_below(terms->size())]);
                    any_attr = true;
                }
            }
            if (!any_attr) parts.push_back("scene");
            else parts.push_back("person");
            bool first_marker = true;
            for (const auto& ins : insertions) {
                if (!ins.included[i]) continue;
                parts.push_back(first_marker ? "featuring" : "and");
                parts.push_back(ins.term);
                first_marker = false;
            }
            CaptionRecord rec;
            rec.model_id = cp.model_id;
            rec.prompt_id = cp.prompt_id;
            char num[32];
            std::snprintf(num, sizeof(num), "%04zu", i + 1);
            rec.image_id = cp.model_id + "-" + cp.prompt_id + "-" + num;
            std::string caption;
            for (std::size_t p = 0; p < parts.size(); ++p) {
                if (p) caption += ' ';
                caption += parts[p];
            }
            rec.caption = caption;
            records.push_back(std::move(rec));
        }

        // the whole point of the harness: extraction must recover the plan
        const std::size_t base = records.size() - n;
        for (std::size_t i = 0; i < n; ++i) {
            const auto vec = extract_attributes(records[base + i], spec, lexicon);
            const std::string got[4] = {to_string(vec.gender), vec.ethnicity,
                                        vec.skin_tone, vec.species};
            for (std::size_t a = 0; a < axes.size(); ++a) {
                const auto& want = axes[a].classes[axes[a].assigned[i]];
                const auto& actual = axes[a].name == "gender" ? got[0]
                                     : axes[a].name == "ethnicity" ? got[1]
                                     : axes[a].name == "skin" ? got[2]
                                                              : got[3];
                if (actual != want)
                    throw PlanMismatch("extraction drift for " + records[base + i].image_id +
                                       " on axis " + axes[a].name + ": planned '" + want +
                                       "', extracted '" + actual +
                                       "' (lexicon collision in generated caption)");
            }
        }
    }
    return Corpus(std::move(records));
}

} // namespace biasaudit
