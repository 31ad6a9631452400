#pragma once

#include <map>
#include <string>
#include <vector>

namespace biasaudit {

// Sparse L2-normalised term-weight vector. Empty documents stay empty
// (norm 0) and have cosine 0 against everything by convention.
using TermVector = std::map<std::string, double>;

// weight(t, doc) = tf(t, doc) * (ln((1 + N) / (1 + df(t))) + 1), then each
// vector is L2-normalised. Tokens are lowercase maximal alphanumeric runs.
std::vector<TermVector> tfidf_vectorize(const std::vector<std::string>& texts);

double cosine(const TermVector& u, const TermVector& v);

// Mean prompt-to-caption cosine with the vectorizer fitted on
// {prompt} + captions. Non-negative weights make the result land in [0, 1].
double clip_proxy_mean(const std::string& prompt_text,
                       const std::vector<std::string>& captions);

} // namespace biasaudit
