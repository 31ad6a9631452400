#include "biasaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "biasaudit/errors.hpp"

namespace biasaudit {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kScoreSlack = 1e-9;

std::string fixed6(double value) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    std::string s(buf);
    if (s == "-0.000000") s = "0.000000";
    return s;
}

std::string fixed2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

// nlohmann's dump() prints doubles in shortest-roundtrip form; the report
// contract wants fixed six-decimal floats, so serialisation is done here.
void write_json(const ordered_json& node, std::string& out) {
    switch (node.type()) {
        case ordered_json::value_t::null: out += "null"; break;
        case ordered_json::value_t::boolean:
            out += node.get<bool>() ? "true" : "false";
            break;
        case ordered_json::value_t::number_integer:
            out += std::to_string(node.get<std::int64_t>());
            break;
        case ordered_json::value_t::number_unsigned:
            out += std::to_string(node.get<std::uint64_t>());
            break;
        case ordered_json::value_t::number_float:
            out += fixed6(node.get<double>());
            break;
        case ordered_json::value_t::string:
            out += ordered_json(node.get<std::string>()).dump();
            break;
        case ordered_json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& item : node) {
                if (!first) out += ',';
                first = false;
                write_json(item, out);
            }
            out += ']';
            break;
        }
        case ordered_json::value_t::object: {
            out += '{';
            bool first = true;
            for (const auto& [key, value] : node.items()) {
                if (!first) out += ',';
                first = false;
                out += ordered_json(key).dump();
                out += ':';
                write_json(value, out);
            }
            out += '}';
            break;
        }
        default: out += "null";
    }
}

// (metric name, value) pairs in canonical order, absent metrics skipped.
std::vector<std::pair<std::string, double>> scalar_metrics(const MetricCell& cell) {
    std::vector<std::pair<std::string, double>> m;
    auto push_opt = [&](const char* name, const std::optional<double>& v) {
        if (v) m.emplace_back(name, *v);
    };
    push_opt("pd", cell.pd);
    push_opt("h", cell.h);
    push_opt("kl", cell.kl);
    push_opt("ba", cell.ba);
    m.emplace_back("cas", cell.cas_value);
    m.emplace_back("vendi_raw", cell.vendi_raw);
    m.emplace_back("vendi", cell.vendi_norm);
    m.emplace_back("cps", cell.cps);
    m.emplace_back("gmr", cell.gmr);
    m.emplace_back("iemr", cell.iemr);
    m.emplace_back("hs", cell.hs);
    push_opt("car", cell.car);
    push_opt("cbs", cell.cbs_value);
    push_opt("cds", cell.cds_value);
    return m;
}

const MetricCell* find_cell(const AuditReport& report, const std::string& model,
                            const std::string& prompt) {
    for (const auto& cell : report.cells)
        if (cell.model_id == model && cell.prompt_id == prompt) return &cell;
    return nullptr;
}

ordered_json cell_to_json(const MetricCell& cell) {
    ordered_json c;
    c["model"] = cell.model_id;
    c["prompt"] = cell.prompt_id;
    c["path"] = to_string(cell.path);
    c["axis"] = cell.axis;
    c["n"] = cell.n;
    c["axis_n"] = cell.axis_n;
    c["k_norm"] = cell.k_norm;
    ordered_json rp;
    for (const auto& [name, p] : cell.rp) rp[name] = p;
    c["rp"] = std::move(rp);
    ordered_json metrics;
    for (const auto& [name, value] : scalar_metrics(cell)) metrics[name] = value;
    c["metrics"] = std::move(metrics);
    if (auto composite = cell.primary_composite()) {
        ordered_json comp;
        comp["metric"] = cell.path == PromptPath::Demographic ? "cbs" : "cds";
        comp["value"] = *composite;
        comp["band"] = to_string(severity_after_rounding(*composite));
        c["composite"] = std::move(comp);
    } else {
        c["composite"] = nullptr;
    }
    c["unknown_gender_share"] = cell.unknown_gender_share;
    return c;
}

} // namespace

std::string to_string(Severity s) {
    switch (s) {
        case Severity::Low: return "Low";
        case Severity::Moderate: return "Moderate";
        case Severity::High: return "High";
    }
    return "Low";
}

Severity severity(double score) {
    if (score < -kScoreSlack || score > 1.0 + kScoreSlack)
        throw OutOfRange("severity expects a score in [0, 1]");
    score = std::clamp(score, 0.0, 1.0);
    if (score <= 0.30) return Severity::Low;
    if (score <= 0.55) return Severity::Moderate;
    return Severity::High;
}

double round2(double value) {
    return std::floor(value * 100.0 + 0.5) / 100.0;
}

Severity severity_after_rounding(double score) { return severity(round2(score)); }

AuditReport build_audit(const Corpus& corpus, const SpecSet& specs,
                        const AuditOptions& options) {
    if (options.baseline && !corpus.has_model(*options.baseline))
        throw MissingBaseline(*options.baseline);

    AuditReport report;
    report.spec_version = specs.version;
    report.options = options;
    report.models = corpus.models();
    report.prompts = corpus.prompts();
    report.total_records = static_cast<std::int64_t>(corpus.size());

    CellOptions cell_options;
    cell_options.k_norm = options.k_norm;
    cell_options.cas_epsilon = options.cas_epsilon;

    for (const auto& model : report.models) {
        for (const auto& prompt : report.prompts) {
            auto records = slice(corpus, model, prompt);
            if (records.empty()) continue; // absent cell, not a zero cell
            report.cell_counts.push_back(
                {model, prompt, static_cast<std::int64_t>(records.size())});
            const auto& spec = specs.spec_for(prompt);
            report.cells.push_back(
                evaluate_cell(records, spec, specs.lexicon, cell_options));
        }
    }

    // per-model mean of the primary composite
    for (const auto& model : report.models) {
        double sum = 0.0;
        int count = 0;
        for (const auto& cell : report.cells) {
            if (cell.model_id != model) continue;
            if (auto composite = cell.primary_composite()) {
                sum += *composite;
                ++count;
            }
        }
        if (count > 0) report.means.emplace_back(model, sum / count);
    }

    if (options.baseline) {
        for (const auto& cell : report.cells) {
            const MetricCell* base = find_cell(report, *options.baseline, cell.prompt_id);
            if (!base) continue;
            const auto cell_metrics = scalar_metrics(cell);
            const auto base_metrics = scalar_metrics(*base);
            for (const auto& [name, value] : cell_metrics) {
                for (const auto& [base_name, base_value] : base_metrics) {
                    if (base_name == name) {
                        report.deltas.push_back(
                            {cell.model_id, cell.prompt_id, name, delta(value, base_value)});
                        break;
                    }
                }
            }
        }
    }

    for (const auto& cell : report.cells) {
        if (cell.ba && *cell.ba > 1.0)
            report.flags.push_back({cell.model_id, cell.prompt_id, "bias_amplification",
                                    *cell.ba,
                                    "L1 deviation above 1.0 reads as amplification"});
        if (cell.single_group && cell.ba)
            report.flags.push_back(
                {cell.model_id, cell.prompt_id, "single_group_max_amplification",
                 *cell.ba,
                 "all detected subjects share one class, so the L1-from-uniform "
                 "formula sits at its maximum 2(1-1/k); conventions that score "
                 "amplification against a training distribution may report 0 for "
                 "such a cell"});
        if (cell.path == PromptPath::Demographic && cell.unknown_gender_share >= 0.30)
            report.flags.push_back(
                {cell.model_id, cell.prompt_id, "gender_occlusion",
                 cell.unknown_gender_share,
                 "gender was unreadable for a large share of captions; parity "
                 "scores may be suppressed by occlusion rather than balance"});
    }
    return report;
}

ReportFormat report_format_from_string(const std::string& s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    if (s == "markdown" || s == "md") return ReportFormat::Markdown;
    throw AuditError("unknown report format '" + s + "' (json|csv|markdown)");
}

std::string render_json(const AuditReport& report) {
    ordered_json doc;
    doc["version"] = 1;

    ordered_json digest;
    digest["records"] = report.total_records;
    digest["models"] = report.models;
    digest["prompts"] = report.prompts;
    ordered_json cell_counts = ordered_json::array();
    for (const auto& cc : report.cell_counts)
        cell_counts.push_back({{"model", cc.model_id}, {"prompt", cc.prompt_id}, {"n", cc.n}});
    digest["cells"] = std::move(cell_counts);
    doc["corpus_digest"] = std::move(digest);

    ordered_json opts;
    opts["spec_version"] = report.spec_version;
    opts["baseline"] = report.options.baseline ? ordered_json(*report.options.baseline)
                                               : ordered_json(nullptr);
    opts["k_norm"] = to_string(report.options.k_norm);
    opts["cas_epsilon"] = report.options.cas_epsilon;
    opts["seed"] = report.options.seed ? ordered_json(*report.options.seed)
                                       : ordered_json(nullptr);
    doc["options"] = std::move(opts);

    ordered_json cells = ordered_json::array();
    for (const auto& cell : report.cells) cells.push_back(cell_to_json(cell));
    doc["cells"] = std::move(cells);

    ordered_json means = ordered_json::array();
    for (const auto& [model, mean] : report.means)
        means.push_back({{"model", model}, {"mean", mean}});
    doc["means"] = std::move(means);

    ordered_json deltas = ordered_json::array();
    for (const auto& d : report.deltas)
        deltas.push_back({{"model", d.model_id},
                          {"prompt", d.prompt_id},
                          {"metric", d.metric},
                          {"delta", d.value}});
    doc["deltas"] = std::move(deltas);

    ordered_json flags = ordered_json::array();
    for (const auto& f : report.flags)
        flags.push_back({{"model", f.model_id},
                         {"prompt", f.prompt_id},
                         {"type", f.type},
                         {"value", f.value},
                         {"note", f.note}});
    doc["flags"] = std::move(flags);

    std::string out;
    write_json(doc, out);
    out += '\n';
    return out;
}

std::string render_cell_json(const MetricCell& cell) {
    std::string out;
    write_json(cell_to_json(cell), out);
    return out;
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string render_csv(const AuditReport& report) {
    std::string out = "model,prompt,metric,value,band\n";
    for (const auto& cell : report.cells) {
        auto row = [&](const std::string& metric, double value, const std::string& band) {
            out += csv_escape(cell.model_id);
            out += ',';
            out += csv_escape(cell.prompt_id);
            out += ',';
            out += csv_escape(metric);
            out += ',';
            out += fixed6(value);
            out += ',';
            out += band;
            out += '\n';
        };
        for (const auto& [name, p] : cell.rp) row("rp:" + name, p, "");
        for (const auto& [name, value] : scalar_metrics(cell)) {
            const bool composite = (name == "cbs" || name == "cds");
            row(name, value,
                composite ? to_string(severity_after_rounding(value)) : std::string());
        }
    }
    return out;
}

std::string render_markdown(const AuditReport& report) {
    std::ostringstream md;
    md << "# Caption bias audit\n\n";
    md << "Records: " << report.total_records << "; models: " << report.models.size()
       << "; prompts: " << report.prompts.size() << ".\n\n";

    md << "## Composite scores\n\n";
    md << "| Model |";
    for (const auto& prompt : report.prompts) md << ' ' << prompt << " |";
    md << " Mean |\n";
    md << "| --- |";
    for (std::size_t i = 0; i < report.prompts.size(); ++i) md << " --- |";
    md << " --- |\n";

    for (const auto& model : report.models) {
        md << "| " << model << " |";
        for (const auto& prompt : report.prompts) {
            const MetricCell* cell = find_cell(report, model, prompt);
            auto composite = cell ? cell->primary_composite() : std::nullopt;
            if (composite)
                md << ' ' << fixed2(*composite) << " ("
                   << to_string(severity_after_rounding(*composite)) << ") |";
            else
                md << " - |";
        }
        bool has_mean = false;
        for (const auto& [m, mean] : report.means) {
            if (m == model) {
                md << ' ' << fixed2(mean) << " |";
                has_mean = true;
                break;
            }
        }
        if (!has_mean) md << " - |";
        md << '\n';
    }

    // every model attaining the per-column minimum (2-decimal comparison)
    md << "| *Best* |";
    for (const auto& prompt : report.prompts) {
        double best = 2.0;
        std::vector<std::string> winners;
        for (const auto& model : report.models) {
            const MetricCell* cell = find_cell(report, model, prompt);
            auto composite = cell ? cell->primary_composite() : std::nullopt;
            if (!composite) continue;
            const double v = round2(*composite);
            if (v < best - 1e-12) {
                best = v;
                winners = {model};
            } else if (std::abs(v - best) <= 1e-12) {
                winners.push_back(model);
            }
        }
        md << ' ';
        for (std::size_t i = 0; i < winners.size(); ++i)
            md << (i ? ", " : "") << winners[i];
        if (winners.empty()) md << '-';
        md << " |";
    }
    {
        double best = 2.0;
        std::vector<std::string> winners;
        for (const auto& [model, mean] : report.means) {
            const double v = round2(mean);
            if (v < best - 1e-12) {
                best = v;
                winners = {model};
            } else if (std::abs(v - best) <= 1e-12) {
                winners.push_back(model);
            }
        }
        md << ' ';
        for (std::size_t i = 0; i < winners.size(); ++i)
            md << (i ? ", " : "") << winners[i];
        if (winners.empty()) md << '-';
        md << " |\n";
    }

    if (!report.flags.empty()) {
        md << "\n## Flags\n\n";
        for (const auto& f : report.flags)
            md << "- `" << f.model_id << "/" << f.prompt_id << "` " << f.type << " ("
               << fixed2(f.value) << "): " << f.note << "\n";
    }
    return md.str();
}

std::vector<std::string> emit(const AuditReport& report,
                              const std::vector<ReportFormat>& formats,
                              const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoFailure("cannot create output directory: " + out_dir);

    std::vector<std::string> written;
    auto write = [&](const std::string& name, const std::string& content) {
        const std::string path = (fs::path(out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoFailure("cannot open file for writing: " + path);
        out << content;
        if (!out) throw IoFailure("write error: " + path);
        written.push_back(path);
    };
    for (const auto format : formats) {
        switch (format) {
            case ReportFormat::Json: write("report.json", render_json(report)); break;
            case ReportFormat::Csv: write("report.csv", render_csv(report)); break;
            case ReportFormat::Markdown: write("report.md", render_markdown(report)); break;
        }
    }
    return written;
}

} // namespace biasaudit
