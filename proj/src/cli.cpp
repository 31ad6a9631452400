#include "biasaudit/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "biasaudit/corpus.hpp"
#include "biasaudit/errors.hpp"
#include "biasaudit/extract.hpp"
#include "biasaudit/metrics.hpp"
#include "biasaudit/report.hpp"
#include "biasaudit/specs.hpp"
#include "biasaudit/synth.hpp"

namespace biasaudit {

namespace {

using ordered_json = nlohmann::ordered_json;

struct AuditArgs {
    std::string corpus_path;
    std::string specs_path;
    std::string baseline;
    std::string out_dir;
    std::vector<std::string> formats = {"json", "csv", "markdown"};
    std::string k_norm = "lexicon";
    std::string format; // corpus format override
    std::int64_t seed = -1;
};

Corpus load_corpus_arg(const std::string& path, const std::string& format_override) {
    if (format_override.empty()) return load_corpus(path);
    return load_corpus(path, format_override == "csv" ? CorpusFormat::Csv
                                                      : CorpusFormat::JsonLines);
}

int do_audit(const AuditArgs& args, std::ostream& out) {
    const SpecSet specs = load_specs(args.specs_path);
    const Corpus corpus = load_corpus_arg(args.corpus_path, args.format);
    AuditOptions options;
    if (!args.baseline.empty()) options.baseline = args.baseline;
    options.k_norm = k_norm_mode_from_string(args.k_norm);
    if (args.seed >= 0) options.seed = static_cast<std::uint64_t>(args.seed);
    const AuditReport report = build_audit(corpus, specs, options);
    std::vector<ReportFormat> formats;
    for (const auto& f : args.formats) formats.push_back(report_format_from_string(f));
    for (const auto& path : emit(report, formats, args.out_dir))
        out << "wrote " << path << "\n";
    return 0;
}

int do_extract(const std::string& corpus_path, const std::string& specs_path,
               const std::string& format_override, const std::string& out_path,
               std::ostream& out) {
    const SpecSet specs = load_specs(specs_path);
    const Corpus corpus = load_corpus_arg(corpus_path, format_override);
    std::ofstream file;
    std::ostream* sink = &out;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::binary);
        if (!file) throw IoFailure("cannot open file for writing: " + out_path);
        sink = &file;
    }
    auto bits = [](const std::map<std::string, bool>& m) {
        ordered_json obj;
        for (const auto& [k, v] : m) obj[k] = v;
        return obj;
    };
    for (const auto& rec : corpus.records()) {
        const auto& spec = specs.spec_for(rec.prompt_id);
        const AttributeVector vec = extract_attributes(rec, spec, specs.lexicon);
        ordered_json obj;
        obj["image_id"] = rec.image_id;
        obj["model"] = rec.model_id;
        obj["prompt"] = rec.prompt_id;
        obj["gender"] = to_string(vec.gender);
        obj["ethnicity"] = vec.ethnicity;
        obj["skin_tone"] = vec.skin_tone;
        obj["species"] = vec.species;
        ordered_json markers;
        markers["grounded"] = bits(vec.grounded);
        markers["implied"] = bits(vec.implied);
        markers["hallucination"] = bits(vec.hallucination);
        markers["cultural"] = bits(vec.cultural);
        markers["species_hits"] = bits(vec.species_hits);
        obj["markers"] = std::move(markers);
        (*sink) << obj.dump() << "\n";
    }
    return 0;
}

int do_metrics(const std::string& corpus_path, const std::string& specs_path,
               const std::string& format_override, const std::string& model,
               const std::string& prompt, const std::string& k_norm,
               std::ostream& out) {
    const SpecSet specs = load_specs(specs_path);
    const Corpus corpus = load_corpus_arg(corpus_path, format_override);
    const auto records = slice(corpus, model, prompt);
    if (records.empty())
        throw AuditError("no records for (" + model + ", " + prompt + ")");
    CellOptions options;
    options.k_norm = k_norm_mode_from_string(k_norm);
    const MetricCell cell =
        evaluate_cell(records, specs.spec_for(prompt), specs.lexicon, options);
    out << render_cell_json(cell) << "\n";
    return 0;
}

void collect_differences(const ordered_json& a, const ordered_json& b,
                         const std::string& path, std::vector<std::string>& diffs) {
    if (a.type() != b.type()) {
        diffs.push_back(path + ": type differs");
        return;
    }
    if (a.is_object()) {
        for (const auto& [key, value] : a.items()) {
            if (!b.contains(key)) diffs.push_back(path + "/" + key + ": missing on right");
            else collect_differences(value, b[key], path + "/" + key, diffs);
        }
        for (const auto& [key, value] : b.items())
            if (!a.contains(key)) diffs.push_back(path + "/" + key + ": missing on left");
        return;
    }
    if (a.is_array()) {
        const std::size_t common = std::min(a.size(), b.size());
        for (std::size_t i = 0; i < common; ++i)
            collect_differences(a[i], b[i], path + "/" + std::to_string(i), diffs);
        if (a.size() != b.size())
            diffs.push_back(path + ": array length " + std::to_string(a.size()) +
                            " != " + std::to_string(b.size()));
        return;
    }
    if (a != b) diffs.push_back(path + ": " + a.dump() + " != " + b.dump());
}

int do_compare(const std::string& left, const std::string& right, std::ostream& out) {
    auto read_json = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoFailure("cannot open file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        ordered_json doc = ordered_json::parse(ss.str(), nullptr, false);
        if (doc.is_discarded()) throw AuditError("not valid JSON: " + path);
        return doc;
    };
    const ordered_json a = read_json(left);
    const ordered_json b = read_json(right);
    std::vector<std::string> diffs;
    collect_differences(a, b, "", diffs);
    for (const auto& d : diffs) out << d << "\n";
    return diffs.empty() ? 0 : 1;
}

int do_synth(const std::string& plan_path, const std::string& specs_path,
             const std::string& out_path, std::ostream& out) {
    const SpecSet specs = load_specs(specs_path);
    const SynthesisPlan plan = load_plan(plan_path);
    const Corpus corpus = synthesize(plan, specs);
    save_jsonl(corpus, out_path);
    out << "wrote " << out_path << " (" << corpus.size() << " records)\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"caption-corpus bias auditing"};
    app.require_subcommand(1);

    AuditArgs audit_args;
    auto* audit_cmd = app.add_subcommand("audit", "run the full audit and emit reports");
    audit_cmd->add_option("--corpus", audit_args.corpus_path, "caption corpus file")
        ->required();
    audit_cmd->add_option("--specs", audit_args.specs_path, "prompt/lexicon config")
        ->required();
    audit_cmd->add_option("--baseline", audit_args.baseline, "baseline model id");
    audit_cmd->add_option("--out", audit_args.out_dir, "output directory")->required();
    audit_cmd->add_option("--formats", audit_args.formats,
                          "report formats (json csv markdown)");
    audit_cmd->add_option("--k-norm", audit_args.k_norm,
                          "entropy normalisation: lexicon|observed");
    audit_cmd->add_option("--format", audit_args.format,
                          "corpus format override: jsonlines|csv");
    audit_cmd->add_option("--seed", audit_args.seed,
                          "provenance seed recorded in the report");

    std::string x_corpus, x_specs, x_format, x_out;
    auto* extract_cmd =
        app.add_subcommand("extract", "emit one attribute vector per record");
    extract_cmd->add_option("--corpus", x_corpus, "caption corpus file")->required();
    extract_cmd->add_option("--specs", x_specs, "prompt/lexicon config")->required();
    extract_cmd->add_option("--format", x_format, "corpus format override");
    extract_cmd->add_option("--out", x_out, "output file (default stdout)");

    std::string m_corpus, m_specs, m_format, m_model, m_prompt, m_knorm = "lexicon";
    auto* metrics_cmd =
        app.add_subcommand("metrics", "evaluate a single (model, prompt) cell");
    metrics_cmd->add_option("--corpus", m_corpus, "caption corpus file")->required();
    metrics_cmd->add_option("--specs", m_specs, "prompt/lexicon config")->required();
    metrics_cmd->add_option("--format", m_format, "corpus format override");
    metrics_cmd->add_option("--model", m_model, "model id")->required();
    metrics_cmd->add_option("--prompt", m_prompt, "prompt id")->required();
    metrics_cmd->add_option("--k-norm", m_knorm, "lexicon|observed");

    std::string c_left, c_right;
    auto* compare_cmd = app.add_subcommand("compare", "diff two report JSON files");
    compare_cmd->add_option("left", c_left, "first report")->required();
    compare_cmd->add_option("right", c_right, "second report")->required();

    std::string s_plan, s_specs, s_out;
    auto* synth_cmd =
        app.add_subcommand("synth", "generate a synthetic corpus from a plan");
    synth_cmd->group(""); // internal; used by the test harness and CI
    synth_cmd->add_option("--plan", s_plan, "synthesis plan JSON")->required();
    synth_cmd->add_option("--specs", s_specs, "prompt/lexicon config")->required();
    synth_cmd->add_option("--out", s_out, "output corpus path")->required();

    std::vector<const char*> argv;
    argv.push_back("biasaudit");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.get_name() << ": " << e.what() << "\n";
        return 1;
    }

    try {
        if (*audit_cmd) return do_audit(audit_args, out);
        if (*extract_cmd) return do_extract(x_corpus, x_specs, x_format, x_out, out);
        if (*metrics_cmd)
            return do_metrics(m_corpus, m_specs, m_format, m_model, m_prompt, m_knorm, out);
        if (*compare_cmd) return do_compare(c_left, c_right, out);
        if (*synth_cmd) return do_synth(s_plan, s_specs, s_out, out);
    } catch (const IoFailure& e) {
        err << "io error: " << e.what() << "\n";
        return 2;
    } catch (const AuditError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "no subcommand given\n";
    return 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, out, err);
}

} // namespace biasaudit
