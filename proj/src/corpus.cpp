#include "biasaudit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "biasaudit/errors.hpp"
#include "biasaudit/text.hpp"

namespace biasaudit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoFailure("read error: " + path);
    return ss.str();
}

std::string require_string_field(const ordered_json& obj, const char* key,
                                 std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end()) throw MalformedRecord(line_no, std::string("missing field ") + key);
    if (!it->is_string()) throw MalformedRecord(line_no, std::string("field ") + key + " must be a string");
    return it->get<std::string>();
}

CaptionRecord record_from_fields(std::string image_id, std::string model,
                                 std::string prompt, std::string caption,
                                 std::map<std::string, std::string> extras,
                                 std::size_t line_no) {
    CaptionRecord rec;
    rec.image_id = std::move(image_id);
    rec.model_id = std::move(model);
    rec.prompt_id = std::move(prompt);
    rec.caption = normalize_text(caption);
    rec.extras = std::move(extras);
    if (rec.image_id.empty()) throw MalformedRecord(line_no, "image_id empty");
    if (rec.model_id.empty()) throw MalformedRecord(line_no, "model empty");
    if (rec.prompt_id.empty()) throw MalformedRecord(line_no, "prompt empty");
    if (rec.caption.empty()) throw MalformedRecord(line_no, "caption empty after trimming");
    return rec;
}

std::vector<CaptionRecord> parse_jsonl(const std::string& text) {
    std::vector<CaptionRecord> records;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        ++line_no;
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = line.find_first_not_of(" \t") == std::string::npos;
        if (blank) {
            if (pos > text.size()) break;
            continue;
        }
        ordered_json obj = ordered_json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object())
            throw MalformedRecord(line_no, "not a JSON object");
        std::map<std::string, std::string> extras;
        for (const auto& [key, val] : obj.items()) {
            if (key == "image_id" || key == "model" || key == "prompt" || key == "caption")
                continue;
            extras[key] = val.dump();
        }
        records.push_back(record_from_fields(
            require_string_field(obj, "image_id", line_no),
            require_string_field(obj, "model", line_no),
            require_string_field(obj, "prompt", line_no),
            require_string_field(obj, "caption", line_no), std::move(extras),
            line_no));
    }
    return records;
}

// RFC-4180 style: comma delimiter, double-quote escaping, quoted fields may
// span lines. Returns one row per record plus the 1-based line each started.
struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line_no = 0;
};

std::vector<CsvRow> parse_csv(const std::string& text) {
    std::vector<CsvRow> rows;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        CsvRow row;
        row.line_no = line;
        std::string field;
        bool in_quotes = false;
        bool row_done = false;
        while (i < n && !row_done) {
            char c = text[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    field.push_back(c);
                    ++i;
                }
            } else {
                switch (c) {
                    case '"':
                        in_quotes = true;
                        ++i;
                        break;
                    case ',':
                        row.fields.push_back(std::move(field));
                        field.clear();
                        ++i;
                        break;
                    case '\r':
                        ++i;
                        break;
                    case '\n':
                        ++line;
                        ++i;
                        row_done = true;
                        break;
                    default:
                        field.push_back(c);
                        ++i;
                }
            }
        }
        if (in_quotes) throw MalformedRecord(row.line_no, "unterminated quoted field");
        row.fields.push_back(std::move(field));
        // skip rows that were nothing but an empty line
        if (!(row.fields.size() == 1 && row.fields[0].empty())) rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<CaptionRecord> parse_csv_records(const std::string& text) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw EmptyCorpus();
    const auto& header = rows.front().fields;
    auto column = [&](const char* name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw MalformedRecord(1, std::string("missing column ") + name);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_id = column("image_id");
    const std::size_t c_model = column("model");
    const std::size_t c_prompt = column("prompt");
    const std::size_t c_caption = column("caption");

    std::vector<CaptionRecord> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != header.size())
            throw MalformedRecord(row.line_no, "field count differs from header");
        std::map<std::string, std::string> extras;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == c_id || c == c_model || c == c_prompt || c == c_caption) continue;
            extras[header[c]] = ordered_json(row.fields[c]).dump();
        }
        records.push_back(record_from_fields(row.fields[c_id], row.fields[c_model],
                                             row.fields[c_prompt], row.fields[c_caption],
                                             std::move(extras), row.line_no));
    }
    return records;
}

} // namespace

Corpus::Corpus(std::vector<CaptionRecord> records) : records_(std::move(records)) {
    if (records_.empty()) throw EmptyCorpus();
    std::unordered_set<std::string> seen_ids;
    std::unordered_set<std::string> seen_models;
    std::unordered_set<std::string> seen_prompts;
    for (auto& rec : records_) {
        rec.caption = normalize_text(rec.caption);
        if (rec.caption.empty())
            throw AuditError("caption empty after trimming for image " + rec.image_id);
        if (!seen_ids.insert(rec.image_id).second) throw DuplicateImageId(rec.image_id);
        if (seen_models.insert(rec.model_id).second) models_.push_back(rec.model_id);
        if (seen_prompts.insert(rec.prompt_id).second) prompts_.push_back(rec.prompt_id);
    }
}

bool Corpus::has_model(const std::string& id) const {
    return std::find(models_.begin(), models_.end(), id) != models_.end();
}

bool Corpus::has_prompt(const std::string& id) const {
    return std::find(prompts_.begin(), prompts_.end(), id) != prompts_.end();
}

Corpus load_corpus(const std::string& path, CorpusFormat format) {
    const std::string text = read_file(path);
    auto records = (format == CorpusFormat::JsonLines) ? parse_jsonl(text)
                                                       : parse_csv_records(text);
    if (records.empty()) throw EmptyCorpus();
    return Corpus(std::move(records));
}

Corpus load_corpus(const std::string& path) {
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    return load_corpus(path, csv ? CorpusFormat::Csv : CorpusFormat::JsonLines);
}

void save_jsonl(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open file for writing: " + path);
    for (const auto& rec : corpus.records()) {
        ordered_json obj;
        obj["image_id"] = rec.image_id;
        obj["model"] = rec.model_id;
        obj["prompt"] = rec.prompt_id;
        obj["caption"] = rec.caption;
        for (const auto& [key, raw] : rec.extras)
            obj[key] = ordered_json::parse(raw);
        out << obj.dump() << '\n';
    }
    if (!out) throw IoFailure("write error: " + path);
}

std::vector<CaptionRecord> slice(const Corpus& corpus, const std::string& model_id,
                                 const std::string& prompt_id) {
    if (!corpus.has_model(model_id)) throw UnknownModel(model_id);
    if (!corpus.has_prompt(prompt_id)) throw UnknownPrompt(prompt_id);
    std::vector<CaptionRecord> out;
    for (const auto& rec : corpus.records())
        if (rec.model_id == model_id && rec.prompt_id == prompt_id) out.push_back(rec);
    return out;
}

} // namespace biasaudit
