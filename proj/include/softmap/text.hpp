#pragma once

#include <cctype>
#include <cstdio>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace softmap {

// Formats a double with 9 significant digits, the precision used by every
// plain-text sidecar file.
inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace detail {

inline bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_alpha(char c) { return is_upper(c) || is_lower(c); }
inline bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }

// Splits one identifier run at camel humps, acronym tails, and
// digit-to-letter boundaries. "parseHTTPRequest" -> parse, HTTP, Request;
// "v2" stays whole.
inline void split_identifier(std::string_view run, std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 1; i < run.size(); ++i) {
    const char prev = run[i - 1];
    const char cur = run[i];
    bool boundary = false;
    if (is_upper(cur) && (is_lower(prev) || is_digit(prev))) {
      boundary = true;  // camel hump: eE -> e|E
    } else if (is_upper(prev) && is_upper(cur) && i + 1 < run.size() &&
               is_lower(run[i + 1])) {
      boundary = true;  // acronym tail: HTTPRe -> HTTP|Re
    } else if (is_digit(prev) && is_alpha(cur)) {
      boundary = true;  // digits bind left: v2Board -> v2|Board
    }
    if (boundary) {
      out.emplace_back(run.substr(start, i - start));
      start = i;
    }
  }
  out.emplace_back(run.substr(start));
}

}  // namespace detail

struct TokenizeOptions {
  std::size_t min_length = 2;
  const std::unordered_set<std::string>* stopwords = nullptr;
};

// Java and C-family keywords plus common English function words.
inline const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> words = {
      // java / c-family keywords
      "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char",
      "class", "const", "continue", "default", "do", "double", "else", "enum",
      "extends", "final", "finally", "float", "for", "goto", "if", "implements",
      "import", "instanceof", "int", "interface", "long", "native", "new",
      "package", "private", "protected", "public", "return", "short", "static",
      "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
      "transient", "try", "void", "volatile", "while", "auto", "bool",
      "constexpr", "delete", "explicit", "extern", "false", "friend", "inline",
      "mutable", "namespace", "nullptr", "operator", "register", "signed",
      "sizeof", "struct", "template", "typedef", "typename", "union",
      "unsigned", "using", "virtual", "true", "null", "var", "let", "function",
      "def", "string",
      // english function words
      "an", "and", "are", "as", "at", "be", "by", "from", "get", "has", "have",
      "in", "is", "it", "its", "not", "of", "on", "or", "set", "that", "the",
      "to", "was", "were", "will", "with"};
  return words;
}

// Extracts identifier-like runs, splits them, lowercases, and filters.
// Occurrence order and multiplicity are preserved.
inline std::vector<std::string> tokenize(std::string_view text,
                                         const TokenizeOptions& opts = {}) {
  const std::unordered_set<std::string>& stop =
      opts.stopwords ? *opts.stopwords : default_stopwords();
  std::vector<std::string> out;
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!detail::is_alpha(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && detail::is_alnum(text[j])) ++j;
    parts.clear();
    detail::split_identifier(text.substr(i, j - i), parts);
    for (std::string& p : parts) {
      if (p.size() < opts.min_length) continue;
      for (char& c : p) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (stop.count(p)) continue;
      out.push_back(std::move(p));
    }
    i = j;
  }
  return out;
}

// Removes //, /* */ and # comments and the contents of "..." / '...'
// literals. Lexical only; good enough for vocabulary control.
inline std::string strip_comments_and_strings(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      i += 2;
      while (i + 1 < text.size() && !(text[i] == '*' && text[i + 1] == '/')) ++i;
      i = std::min(text.size(), i + 2);
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '"' || c == '\'') {
      const char quote = c;
      ++i;
      while (i < text.size() && text[i] != quote && text[i] != '\n') {
        if (text[i] == '\\') ++i;
        ++i;
      }
      if (i < text.size()) ++i;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

}  // namespace softmap
