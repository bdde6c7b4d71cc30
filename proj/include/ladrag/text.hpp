#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ladrag {

// Lowercase, split on non-alphanumerics, drop empty tokens. Shared by BM25
// and the hashing embedder so lexical and dense views agree on terms.
std::vector<std::string> tokenize(std::string_view text);

std::string truncate_text(std::string_view text, std::size_t max_chars);

std::string base64_encode(std::string_view data);

}  // namespace ladrag
