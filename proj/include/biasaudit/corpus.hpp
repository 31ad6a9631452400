#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace biasaudit {

// One captioned image. The caption is stored normalized (see text.hpp);
// extra input fields are preserved verbatim for round-tripping but take no
// part in any computation.
struct CaptionRecord {
    std::string image_id;
    std::string model_id;
    std::string prompt_id;
    std::string caption; // normalized at load
    std::map<std::string, std::string> extras;

    bool operator==(const CaptionRecord&) const = default;
};

enum class CorpusFormat { JsonLines, Csv };

class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<CaptionRecord> records);

    const std::vector<CaptionRecord>& records() const { return records_; }
    // First-appearance order; used everywhere output ordering matters.
    const std::vector<std::string>& models() const { return models_; }
    const std::vector<std::string>& prompts() const { return prompts_; }

    bool has_model(const std::string& id) const;
    bool has_prompt(const std::string& id) const;

    std::size_t size() const { return records_.size(); }

    std::optional<std::string> baseline_model;

    bool operator==(const Corpus& other) const {
        return records_ == other.records_;
    }

private:
    std::vector<CaptionRecord> records_;
    std::vector<std::string> models_;
    std::vector<std::string> prompts_;
};

Corpus load_corpus(const std::string& path, CorpusFormat format);

// Format inferred from the file extension (.csv -> Csv, else JsonLines).
Corpus load_corpus(const std::string& path);

// One JSON object per line, keys in schema order, extras appended.
void save_jsonl(const Corpus& corpus, const std::string& path);

// All records matching (model_id, prompt_id), in corpus order. Throws
// UnknownModel / UnknownPrompt when the id is not registered.
std::vector<CaptionRecord> slice(const Corpus& corpus,
                                 const std::string& model_id,
                                 const std::string& prompt_id);

} // namespace biasaudit
