#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace biasaudit {

// Caption text is canonicalised exactly once, at load time. After that every
// downstream operation (term matching, token counting) works on plain bytes,
// so results cannot drift between platforms or locales.
//
// normalize_text applies, in order:
//   1. Unicode lowercasing for ASCII, Latin-1 Supplement and Latin Extended-A;
//   2. canonical composition of Latin base letters followed by combining
//      diacritical marks (e.g. "e" + U+0301 -> U+00E9), so composed and
//      decomposed spellings of the same word match the same lexicon entry;
//   3. whitespace collapse: runs of whitespace become a single space, leading
//      and trailing whitespace is dropped.
// Codepoints outside those ranges pass through unchanged, which keeps the
// function deterministic on arbitrary UTF-8 input. Invalid UTF-8 bytes are
// copied verbatim.
std::string normalize_text(std::string_view raw);

// Word characters for boundary purposes: [a-z0-9'-] plus any non-ASCII byte.
// Hyphen and apostrophe bind words together ("fair-skinned" is one word), so
// "fair" does not match inside it.
bool is_word_char(unsigned char c);

// True iff `term` occurs in `caption` delimited on both sides by a non-word
// character or the string edge. Multi-word terms (single-space separated)
// match contiguous word sequences; caption whitespace is expected to be
// collapsed already. Both inputs must be lowercase. Total function.
bool match_term(std::string_view caption, std::string_view term);

// Splits text into words at non-word characters (word chars as above).
std::vector<std::string> split_words(std::string_view text);

// Lowercase maximal alphanumeric runs; the token model of the TF-IDF
// vectorizer. Note hyphen/apostrophe are separators here, unlike
// split_words: "fair-skinned" vectorizes as {"fair", "skinned"}.
std::vector<std::string> alnum_tokens(std::string_view text);

} // namespace biasaudit
