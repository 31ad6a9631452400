#include "biasaudit/text.hpp"

#include <array>
#include <cstdint>

namespace biasaudit {

namespace {

// --- minimal UTF-8 codec -------------------------------------------------

// Decodes one codepoint starting at s[i]; advances i. Invalid sequences are
// surfaced as the single byte value with the high bit kept, which round-trips
// through encode_utf8 below unchanged.
uint32_t decode_utf8(std::string_view s, std::size_t& i, bool& valid) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    valid = true;
    if (b0 < 0x80) { ++i; return b0; }
    int len = 0;
    uint32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
    else { valid = false; ++i; return b0; }
    if (i + len > s.size()) { valid = false; ++i; return b0; }
    for (int k = 1; k < len; ++k) {
        const auto bk = static_cast<unsigned char>(s[i + k]);
        if ((bk & 0xC0) != 0x80) { valid = false; ++i; return b0; }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += len;
    return cp;
}

void encode_utf8(uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// --- Latin lowercasing ----------------------------------------------------

uint32_t to_lower_cp(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    // Latin-1 Supplement: U+00C0..U+00DE map to +32, except U+00D7 (x).
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
    // Latin Extended-A: mostly upper/lower pairs at even/odd codepoints.
    if (cp >= 0x0100 && cp <= 0x0177 && (cp % 2) == 0) return cp + 1;
    if (cp >= 0x0179 && cp <= 0x017E && (cp % 2) == 1) return cp + 1;
    if (cp == 0x0178) return 0x00FF; // Y-diaeresis
    return cp;
}

// --- canonical composition (Latin subset) ----------------------------------

// base letter + combining mark -> precomposed lowercase codepoint.
struct Composition { char base; uint16_t mark; uint16_t composed; };

// Covers the combining diacritics that produce precomposed Latin-1
// Supplement / Latin Extended-A letters for lowercase bases.
constexpr std::array<Composition, 58> kCompositions{{
    {'a', 0x0300, 0x00E0}, {'a', 0x0301, 0x00E1}, {'a', 0x0302, 0x00E2},
    {'a', 0x0303, 0x00E3}, {'a', 0x0308, 0x00E4}, {'a', 0x030A, 0x00E5},
    {'a', 0x0304, 0x0101}, {'a', 0x0306, 0x0103}, {'a', 0x0328, 0x0105},
    {'c', 0x0327, 0x00E7}, {'c', 0x0301, 0x0107}, {'c', 0x0302, 0x0109},
    {'c', 0x0307, 0x010B}, {'c', 0x030C, 0x010D},
    {'d', 0x030C, 0x010F},
    {'e', 0x0300, 0x00E8}, {'e', 0x0301, 0x00E9}, {'e', 0x0302, 0x00EA},
    {'e', 0x0308, 0x00EB}, {'e', 0x0304, 0x0113}, {'e', 0x0306, 0x0115},
    {'e', 0x0307, 0x0117}, {'e', 0x0328, 0x0119}, {'e', 0x030C, 0x011B},
    {'g', 0x0302, 0x011D}, {'g', 0x0306, 0x011F}, {'g', 0x0307, 0x0121},
    {'g', 0x0327, 0x0123},
    {'h', 0x0302, 0x0125},
    {'i', 0x0300, 0x00EC}, {'i', 0x0301, 0x00ED}, {'i', 0x0302, 0x00EE},
    {'i', 0x0308, 0x00EF}, {'i', 0x0303, 0x0129}, {'i', 0x0304, 0x012B},
    {'j', 0x0302, 0x0135},
    {'k', 0x0327, 0x0137},
    {'l', 0x0301, 0x013A}, {'l', 0x0327, 0x013C}, {'l', 0x030C, 0x013E},
    {'n', 0x0303, 0x00F1}, {'n', 0x0301, 0x0144}, {'n', 0x0327, 0x0146},
    {'n', 0x030C, 0x0148},
    {'o', 0x0300, 0x00F2}, {'o', 0x0301, 0x00F3}, {'o', 0x0302, 0x00F4},
    {'o', 0x0303, 0x00F5}, {'o', 0x0308, 0x00F6}, {'o', 0x0304, 0x014D},
    {'o', 0x030B, 0x0151},
    {'r', 0x030C, 0x0159},
    {'s', 0x0301, 0x015B}, {'s', 0x030C, 0x0161},
    {'u', 0x0300, 0x00F9}, {'u', 0x0301, 0x00FA}, {'u', 0x0308, 0x00FC},
    {'z', 0x030C, 0x017E},
}};

bool compose(uint32_t base, uint32_t mark, uint32_t& out) {
    for (const auto& c : kCompositions) {
        if (static_cast<uint32_t>(c.base) == base && c.mark == mark) {
            out = c.composed;
            return true;
        }
    }
    return false;
}

bool is_space_cp(uint32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
           cp == '\v' || cp == 0x00A0; // no-break space
}

} // namespace

std::string normalize_text(std::string_view raw) {
    // decode + lowercase
    std::vector<uint32_t> cps;
    cps.reserve(raw.size());
    std::size_t i = 0;
    while (i < raw.size()) {
        bool valid = false;
        const uint32_t cp = decode_utf8(raw, i, valid);
        cps.push_back(valid ? to_lower_cp(cp) : cp);
    }
    // canonical composition pass
    std::vector<uint32_t> composed;
    composed.reserve(cps.size());
    for (uint32_t cp : cps) {
        uint32_t merged = 0;
        if (!composed.empty() && compose(composed.back(), cp, merged)) {
            composed.back() = merged;
        } else {
            composed.push_back(cp);
        }
    }
    // whitespace collapse + trim
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (uint32_t cp : composed) {
        if (is_space_cp(cp)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp > 0x10FFFF) {
            // raw invalid byte carried through decode; emit verbatim
            out.push_back(static_cast<char>(cp & 0xFF));
        } else {
            encode_utf8(cp, out);
        }
    }
    return out;
}

bool is_word_char(unsigned char c) {
    if (c >= 0x80) return true;
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '-' || c == '\'';
}

bool match_term(std::string_view caption, std::string_view term) {
    if (term.empty() || term.size() > caption.size()) return false;
    std::size_t pos = caption.find(term);
    while (pos != std::string_view::npos) {
        const bool left_ok =
            pos == 0 || !is_word_char(static_cast<unsigned char>(caption[pos - 1]));
        const std::size_t end = pos + term.size();
        const bool right_ok =
            end == caption.size() || !is_word_char(static_cast<unsigned char>(caption[end]));
        if (left_ok && right_ok) return true;
        pos = caption.find(term, pos + 1);
    }
    return false;
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::string cur;
    for (char ch : text) {
        if (is_word_char(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        } else if (!cur.empty()) {
            words.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

std::vector<std::string> alnum_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto is_alnum = [](unsigned char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c + 32);
        if (is_alnum(c)) {
            cur.push_back(static_cast<char>(c));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

} // namespace biasaudit
