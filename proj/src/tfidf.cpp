#include "biasaudit/tfidf.hpp"

#include <cmath>

#include "biasaudit/errors.hpp"
#include "biasaudit/text.hpp"

namespace biasaudit {

std::vector<TermVector> tfidf_vectorize(const std::vector<std::string>& texts) {
    if (texts.empty()) throw EmptyInput("tfidf_vectorize needs at least one text");
    const double n_docs = static_cast<double>(texts.size());

    std::vector<TermVector> tf(texts.size());
    std::map<std::string, double> df;
    for (std::size_t d = 0; d < texts.size(); ++d) {
        for (const auto& tok : alnum_tokens(texts[d])) tf[d][tok] += 1.0;
        for (const auto& [tok, cnt] : tf[d]) df[tok] += 1.0;
    }

    std::vector<TermVector> vectors(texts.size());
    for (std::size_t d = 0; d < texts.size(); ++d) {
        double norm_sq = 0.0;
        for (const auto& [tok, cnt] : tf[d]) {
            const double idf = std::log((1.0 + n_docs) / (1.0 + df[tok])) + 1.0;
            const double w = cnt * idf;
            vectors[d][tok] = w;
            norm_sq += w * w;
        }
        if (norm_sq > 0.0) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (auto& [tok, w] : vectors[d]) w *= inv;
        }
    }
    return vectors;
}

double cosine(const TermVector& u, const TermVector& v) {
    // vectors are unit length (or empty); the dot product is the cosine
    double dot = 0.0;
    auto iu = u.begin();
    auto iv = v.begin();
    while (iu != u.end() && iv != v.end()) {
        if (iu->first < iv->first) ++iu;
        else if (iv->first < iu->first) ++iv;
        else { dot += iu->second * iv->second; ++iu; ++iv; }
    }
    return dot;
}

double clip_proxy_mean(const std::string& prompt_text,
                       const std::vector<std::string>& captions) {
    if (captions.empty()) throw EmptyInput("clip_proxy_mean needs captions");
    std::vector<std::string> all;
    all.reserve(captions.size() + 1);
    all.push_back(prompt_text);
    all.insert(all.end(), captions.begin(), captions.end());
    const auto vectors = tfidf_vectorize(all);
    double sum = 0.0;
    for (std::size_t i = 1; i < vectors.size(); ++i) sum += cosine(vectors[0], vectors[i]);
    return sum / static_cast<double>(captions.size());
}

} // namespace biasaudit
