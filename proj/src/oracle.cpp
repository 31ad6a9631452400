#include "biasaudit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "biasaudit/errors.hpp"

namespace biasaudit::oracle {

namespace {

void check_size(std::size_t n, std::size_t limit) {
    if (n > limit)
        throw TooLarge("oracle input of " + std::to_string(n) +
                       " exceeds the desk-scale limit " + std::to_string(limit));
}

bool word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '\'' || c >= 0x80;
}

std::vector<std::string> words_of(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
        if (word_char(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        } else if (!cur.empty()) {
            words.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(cur);
    return words;
}

std::vector<std::string> term_words(const std::string& term) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : term) {
        if (ch == ' ') {
            if (!cur.empty()) words.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) words.push_back(cur);
    return words;
}

std::vector<long double> props_of(const std::vector<std::int64_t>& counts) {
    long double n = 0;
    for (auto c : counts) n += static_cast<long double>(c);
    if (n <= 0) throw EmptyDistribution();
    std::vector<long double> p;
    p.reserve(counts.size());
    for (auto c : counts) p.push_back(static_cast<long double>(c) / n);
    return p;
}

} // namespace

bool contains_term(const std::string& caption, const std::string& term) {
    const auto cw = words_of(caption);
    const auto tw = term_words(term);
    if (tw.empty() || tw.size() > cw.size()) return false;
    for (std::size_t i = 0; i + tw.size() <= cw.size(); ++i) {
        bool all = true;
        for (std::size_t j = 0; j < tw.size(); ++j)
            if (cw[i + j] != tw[j]) { all = false; break; }
        if (all) return true;
    }
    return false;
}

std::vector<double> representation(const std::vector<std::int64_t>& counts) {
    const auto p = props_of(counts);
    std::vector<double> out;
    for (auto v : p) out.push_back(static_cast<double>(v));
    return out;
}

double parity_difference(double p_a, double p_b) {
    return p_a >= p_b ? p_a - p_b : p_b - p_a;
}

double shannon_entropy(const std::vector<std::int64_t>& counts, int k_norm) {
    if (k_norm < 2) throw InvalidCardinality(k_norm);
    long double h = 0.0L;
    for (auto p : props_of(counts))
        if (p > 0.0L) h -= p * std::log2(p);
    return static_cast<double>(h / std::log2(static_cast<long double>(k_norm)));
}

double kl_to_uniform(const std::vector<std::int64_t>& counts, int k_norm) {
    if (k_norm < 2) throw InvalidCardinality(k_norm);
    long double kl = 0.0L;
    for (auto p : props_of(counts))
        if (p > 0.0L) kl += p * std::log2(p * static_cast<long double>(k_norm));
    return static_cast<double>(kl);
}

double bias_amplification(const std::vector<std::int64_t>& counts, int k_norm) {
    if (k_norm < 2) throw InvalidCardinality(k_norm);
    const long double u = 1.0L / static_cast<long double>(k_norm);
    long double ba = 0.0L;
    const auto p = props_of(counts);
    for (auto v : p) ba += v >= u ? v - u : u - v;
    for (std::size_t j = p.size(); j < static_cast<std::size_t>(k_norm); ++j) ba += u;
    return static_cast<double>(ba);
}

double cas(const std::vector<std::string>& captions,
           const std::vector<std::string>& stereotype_terms,
           const std::vector<std::string>& diversity_terms, double epsilon) {
    check_size(captions.size(), kMaxInputs);
    long double s = 0, d = 0;
    for (const auto& c : captions) {
        for (const auto& w : stereotype_terms)
            if (contains_term(c, w)) s += 1;
        for (const auto& w : diversity_terms)
            if (contains_term(c, w)) d += 1;
    }
    return static_cast<double>(s / (s + d + static_cast<long double>(epsilon)));
}

double missing_rate(const std::vector<std::string>& captions,
                    const std::vector<std::string>& terms) {
    check_size(captions.size(), kMaxInputs);
    if (captions.empty()) throw EmptyInput("oracle missing_rate needs captions");
    if (terms.empty()) throw EmptyTermSet("oracle missing_rate needs terms");
    std::int64_t missing = 0;
    for (const auto& c : captions) {
        bool lacks_one = false;
        for (const auto& t : terms)
            if (!contains_term(c, t)) { lacks_one = true; break; }
        if (lacks_one) ++missing;
    }
    return static_cast<double>(missing) / static_cast<double>(captions.size());
}

double hallucination_score(const std::vector<std::string>& captions,
                           const std::vector<std::string>& h_terms) {
    check_size(captions.size(), kMaxInputs);
    if (captions.empty()) throw EmptyInput("oracle hallucination_score needs captions");
    if (h_terms.empty()) return 0.0;
    std::int64_t hit = 0;
    for (const auto& c : captions) {
        for (const auto& t : h_terms)
            if (contains_term(c, t)) { ++hit; break; }
    }
    return static_cast<double>(hit) / static_cast<double>(captions.size());
}

double cultural_accuracy_ratio(const std::vector<std::string>& captions,
                               const std::vector<std::string>& refs) {
    if (refs.empty()) throw NotApplicable("oracle CAR needs references");
    check_size(captions.size(), kMaxInputs);
    if (captions.empty()) throw EmptyInput("oracle CAR needs captions");
    std::int64_t hit = 0;
    for (const auto& c : captions) {
        for (const auto& t : refs)
            if (contains_term(c, t)) { ++hit; break; }
    }
    return static_cast<double>(hit) / static_cast<double>(captions.size());
}

double cbs(double pd, double h, double cas_value) {
    return (pd + (1.0 - h) + cas_value) / 3.0;
}

double cds(double species_entropy, double gmr, double cps_mean) {
    return 1.0 - (species_entropy + (1.0 - gmr) + cps_mean) / 3.0;
}

namespace {

// Dense TF-IDF over the sorted vocabulary; deliberately plain loops.
std::vector<std::vector<double>> dense_tfidf(const std::vector<std::string>& texts) {
    std::set<std::string> vocab_set;
    std::vector<std::map<std::string, double>> tf(texts.size());
    for (std::size_t d = 0; d < texts.size(); ++d) {
        std::string cur;
        auto flush = [&] {
            if (!cur.empty()) tf[d][cur] += 1.0;
            cur.clear();
        };
        for (char ch : texts[d]) {
            auto c = static_cast<unsigned char>(ch);
            if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c + 32);
            const bool alnum = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
            if (alnum) cur.push_back(static_cast<char>(c));
            else flush();
        }
        flush();
        for (const auto& [tok, cnt] : tf[d]) vocab_set.insert(tok);
    }
    const std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());
    std::vector<double> df(vocab.size(), 0.0);
    for (std::size_t t = 0; t < vocab.size(); ++t)
        for (std::size_t d = 0; d < texts.size(); ++d)
            if (tf[d].count(vocab[t])) df[t] += 1.0;

    const double n_docs = static_cast<double>(texts.size());
    std::vector<std::vector<double>> vectors(texts.size(),
                                             std::vector<double>(vocab.size(), 0.0));
    for (std::size_t d = 0; d < texts.size(); ++d) {
        double norm_sq = 0.0;
        for (std::size_t t = 0; t < vocab.size(); ++t) {
            auto it = tf[d].find(vocab[t]);
            if (it == tf[d].end()) continue;
            const double w = it->second * (std::log((1.0 + n_docs) / (1.0 + df[t])) + 1.0);
            vectors[d][t] = w;
            norm_sq += w * w;
        }
        if (norm_sq > 0.0) {
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (auto& w : vectors[d]) w *= inv;
        }
    }
    return vectors;
}

double dense_cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double dot = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
    return dot;
}

std::vector<double> eigen_2x2(double a, double b, double d) {
    const double mean = (a + d) / 2.0;
    const double disc = std::sqrt((a - d) * (a - d) / 4.0 + b * b);
    return {mean + disc, mean - disc};
}

// Trigonometric solution of the characteristic cubic for symmetric 3x3.
std::vector<double> eigen_3x3(const std::vector<std::vector<double>>& m) {
    const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    if (p1 == 0.0) {
        std::vector<double> eig = {m[0][0], m[1][1], m[2][2]};
        std::sort(eig.begin(), eig.end(), std::greater<>());
        return eig;
    }
    const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) +
                      (m[2][2] - q) * (m[2][2] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    double b[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            b[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
    const double det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                         b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                         b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    const double r = std::clamp(det_b / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double eig1 = q + 2.0 * p * std::cos(phi);
    const double eig3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    const double eig2 = 3.0 * q - eig1 - eig3;
    std::vector<double> eig = {eig1, eig2, eig3};
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

} // namespace

double clip_proxy_mean(const std::string& prompt_text,
                       const std::vector<std::string>& captions) {
    check_size(captions.size(), kMaxInputs);
    if (captions.empty()) throw EmptyInput("oracle clip_proxy_mean needs captions");
    std::vector<std::string> all;
    all.push_back(prompt_text);
    all.insert(all.end(), captions.begin(), captions.end());
    const auto vectors = dense_tfidf(all);
    double sum = 0.0;
    for (std::size_t i = 1; i < vectors.size(); ++i)
        sum += dense_cosine(vectors[0], vectors[i]);
    return sum / static_cast<double>(captions.size());
}

std::vector<double> symmetric_eigenvalues(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    check_size(n, kMaxVendiInputs);
    if (n == 0) throw EmptyInput("empty matrix");
    for (const auto& row : m)
        if (row.size() != n) throw AuditError("matrix must be square");
    if (n == 1) return {m[0][0]};
    if (n == 2) return eigen_2x2(m[0][0], m[0][1], m[1][1]);
    if (n == 3) return eigen_3x3(m);

    // power iteration with deflation and re-orthogonalisation
    auto work = m;
    std::vector<std::vector<double>> found_vecs;
    std::vector<double> eig;
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = 1.0 + 0.001 * static_cast<double>((i * 2654435761ULL + k) % 97);
        double lambda = 0.0;
        bool vanished = false;
        for (int iter = 0; iter < 20000; ++iter) {
            // project out previously found directions
            for (const auto& u : found_vecs) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += v[i] * u[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= dot * u[i];
            }
            double norm = 0.0;
            for (double x : v) norm += x * x;
            norm = std::sqrt(norm);
            if (norm < 1e-200) { vanished = true; break; }
            for (auto& x : v) x /= norm;

            std::vector<double> w(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) w[i] += work[i][j] * v[j];
            double next = 0.0;
            for (std::size_t i = 0; i < n; ++i) next += v[i] * w[i];
            double wnorm = 0.0;
            for (double x : w) wnorm += x * x;
            wnorm = std::sqrt(wnorm);
            if (wnorm < 1e-200) { lambda = 0.0; break; }
            for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wnorm;
            if (std::abs(next - lambda) <= 1e-14 * std::max(1.0, std::abs(next)) &&
                iter > 2) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        if (vanished) {
            eig.push_back(0.0);
            continue;
        }
        // final orthogonal cleanup so deflation stays stable
        for (const auto& u : found_vecs) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += v[i] * u[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= dot * u[i];
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 1e-200)
            for (auto& x : v) x /= norm;
        eig.push_back(lambda);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) work[i][j] -= lambda * v[i] * v[j];
        found_vecs.push_back(v);
    }
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

double vendi_raw(const std::vector<std::string>& captions) {
    check_size(captions.size(), kMaxVendiInputs);
    if (captions.empty()) throw EmptyInput("oracle vendi needs captions");
    const auto vectors = dense_tfidf(captions);
    const std::size_t n = captions.size();
    std::vector<std::vector<double>> kernel(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double s = (i == j) ? 1.0 : dense_cosine(vectors[i], vectors[j]);
            kernel[i][j] = s / static_cast<double>(n);
        }
    }
    auto lambda = symmetric_eigenvalues(kernel);
    double sum = 0.0;
    for (auto& l : lambda) {
        if (l < 0.0) l = 0.0;
        sum += l;
    }
    if (sum <= 0.0) throw AuditError("oracle kernel spectrum vanished");
    double entropy = 0.0;
    for (auto l : lambda) {
        const double p = l / sum;
        if (p > 0.0) entropy -= p * std::log(p);
    }
    return std::exp(entropy);
}

double value(const std::string& metric_name, const OracleInput& in) {
    if (metric_name == "RP") {
        const auto p = representation(in.counts);
        if (in.k_norm < 0 || static_cast<std::size_t>(in.k_norm) >= p.size())
            throw AuditError("RP oracle needs a class index in k_norm");
        return p[static_cast<std::size_t>(in.k_norm)];
    }
    if (metric_name == "PD") return parity_difference(in.a, in.b);
    if (metric_name == "H") return shannon_entropy(in.counts, in.k_norm);
    if (metric_name == "KL") return kl_to_uniform(in.counts, in.k_norm);
    if (metric_name == "BA") return bias_amplification(in.counts, in.k_norm);
    if (metric_name == "CAS") return cas(in.captions, in.terms, in.terms2, in.epsilon);
    if (metric_name == "GMR" || metric_name == "IEMR")
        return missing_rate(in.captions, in.terms);
    if (metric_name == "HS") return hallucination_score(in.captions, in.terms);
    if (metric_name == "CAR") return cultural_accuracy_ratio(in.captions, in.terms);
    if (metric_name == "CBS") return cbs(in.a, in.b, in.c);
    if (metric_name == "CDS") return cds(in.a, in.b, in.c);
    if (metric_name == "CPS") return clip_proxy_mean(in.prompt_text, in.captions);
    if (metric_name == "VS") return vendi_raw(in.captions);
    throw AuditError("unknown oracle metric '" + metric_name + "'");
}

} // namespace biasaudit::oracle
