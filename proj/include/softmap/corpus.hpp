#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "softmap/matrix.hpp"
#include "softmap/text.hpp"

namespace softmap {

enum class FileKind { source, markup, config, property, other };

inline const char* to_string(FileKind k) {
  switch (k) {
    case FileKind::source: return "source";
    case FileKind::markup: return "markup";
    case FileKind::config: return "config";
    case FileKind::property: return "property";
    default: return "other";
  }
}

inline FileKind parse_file_kind(std::string_view s) {
  if (s == "source") return FileKind::source;
  if (s == "markup") return FileKind::markup;
  if (s == "config") return FileKind::config;
  if (s == "property") return FileKind::property;
  return FileKind::other;
}

struct Document {
  std::string id;            // relative path, unique within a corpus
  std::string display_name;  // short label (file stem)
  std::string text;
  double kloc = 0.0;         // physical lines / 1000
  FileKind kind = FileKind::other;
  std::string snapshot;
};

struct ManifestEntry {
  std::string path;
  std::uint64_t byte_length = 0;
  std::string digest;  // fnv-1a 64 of the raw bytes, hex
  bool skipped = false;
};

struct Corpus {
  std::vector<Document> documents;  // sorted by id
  std::string snapshot;
  std::vector<ManifestEntry> ingestion_manifest;

  const Document* find(std::string_view id) const {
    auto it = std::lower_bound(documents.begin(), documents.end(), id,
                               [](const Document& d, std::string_view key) { return d.id < key; });
    if (it != documents.end() && it->id == id) return &*it;
    return nullptr;
  }
};

struct TermDocumentMatrix {
  std::vector<std::string> terms;  // sorted, unique
  Matrix entries;                  // n docs x m terms, >= 0
  std::string weighting;           // "raw" | "tf-idf"
};

class IngestionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class EmptyVocabularyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Glob match with *, ? and ** (the latter crosses '/').
inline bool glob_match(std::string_view pat, std::string_view str) {
  if (pat.empty()) return str.empty();
  if (pat.substr(0, 2) == "**") {
    std::string_view rest = pat.substr(2);
    if (!rest.empty() && rest.front() == '/') {
      // "**/x" also matches "x" at depth zero
      if (glob_match(rest.substr(1), str)) return true;
    }
    for (std::size_t i = 0; i <= str.size(); ++i)
      if (glob_match(rest, str.substr(i))) return true;
    return false;
  }
  const char p = pat.front();
  if (p == '*') {
    for (std::size_t i = 0; i <= str.size(); ++i) {
      if (i > 0 && str[i - 1] == '/') break;  // single star stops at '/'
      if (glob_match(pat.substr(1), str.substr(i))) return true;
    }
    return false;
  }
  if (str.empty()) return false;
  if (p == '?') return str[0] != '/' && glob_match(pat.substr(1), str.substr(1));
  return p == str[0] && glob_match(pat.substr(1), str.substr(1));
}

inline std::size_t count_lines(std::string_view text) {
  if (text.empty()) return 0;
  std::size_t n = 0;
  for (char c : text) n += (c == '\n');
  if (text.back() != '\n') ++n;
  return n;
}

// Replaces invalid UTF-8 bytes with U+FFFD, keeping valid sequences as-is.
inline std::string decode_utf8_lossy(std::string_view bytes) {
  static const char replacement[] = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    const unsigned char b = bytes[i];
    std::size_t len = 0;
    if (b < 0x80) len = 1;
    else if ((b & 0xE0) == 0xC0) len = 2;
    else if ((b & 0xF0) == 0xE0) len = 3;
    else if ((b & 0xF8) == 0xF0) len = 4;
    bool ok = len > 0 && i + len <= bytes.size();
    for (std::size_t k = 1; ok && k < len; ++k)
      ok = (static_cast<unsigned char>(bytes[i + k]) & 0xC0) == 0x80;
    if (ok) {
      out.append(bytes.substr(i, len));
      i += len;
    } else {
      out.append(replacement);
      ++i;
    }
  }
  return out;
}

}  // namespace detail

// Extension -> FileKind map; override entries as needed before ingesting.
inline std::map<std::string, FileKind> default_kind_map() {
  return {
      {".java", FileKind::source},  {".c", FileKind::source},
      {".cc", FileKind::source},    {".cpp", FileKind::source},
      {".h", FileKind::source},     {".hpp", FileKind::source},
      {".cs", FileKind::source},    {".py", FileKind::source},
      {".js", FileKind::source},    {".ts", FileKind::source},
      {".smalltalk", FileKind::source},
      {".st", FileKind::source},
      {".html", FileKind::markup},  {".htm", FileKind::markup},
      {".xml", FileKind::markup},   {".jsp", FileKind::markup},
      {".md", FileKind::markup},    {".css", FileKind::markup},
      {".json", FileKind::config},  {".yaml", FileKind::config},
      {".yml", FileKind::config},   {".ini", FileKind::config},
      {".toml", FileKind::config},  {".cfg", FileKind::config},
      {".conf", FileKind::config},
      {".properties", FileKind::property},
  };
}

struct IngestOptions {
  std::vector<std::string> include_globs = {"**"};
  std::vector<std::string> exclude_globs;
  std::map<std::string, FileKind> kind_map = default_kind_map();
  std::vector<std::string>* warnings = nullptr;
};

// Walks a source tree and builds a Corpus, one Document per matched file.
// Documents come out sorted by id; the manifest fingerprints the input.
inline Corpus ingest(const std::filesystem::path& root, const std::string& snapshot,
                     const IngestOptions& opts = {}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw IngestionError("unreadable ingestion root: " + root.string());

  Corpus corpus;
  corpus.snapshot = snapshot;

  std::vector<std::string> rel_paths;
  for (fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec), end;
       it != end; it.increment(ec)) {
    if (ec) throw IngestionError("directory walk failed under " + root.string());
    if (!it->is_regular_file(ec)) continue;
    std::string rel = fs::relative(it->path(), root).generic_string();
    bool included = false;
    for (const auto& g : opts.include_globs)
      if (detail::glob_match(g, rel)) { included = true; break; }
    for (const auto& g : opts.exclude_globs)
      if (detail::glob_match(g, rel)) { included = false; break; }
    if (included) rel_paths.push_back(std::move(rel));
  }
  std::sort(rel_paths.begin(), rel_paths.end());

  for (const std::string& rel : rel_paths) {
    const fs::path full = root / fs::path(rel);
    std::ifstream in(full, std::ios::binary);
    if (!in) {
      corpus.ingestion_manifest.push_back({rel, 0, "", true});
      if (opts.warnings) opts.warnings->push_back("skipped unreadable file: " + rel);
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();

    Document doc;
    doc.id = rel;
    doc.display_name = fs::path(rel).stem().string();
    doc.text = detail::decode_utf8_lossy(bytes);
    doc.kloc = static_cast<double>(detail::count_lines(doc.text)) / 1000.0;
    doc.snapshot = snapshot;
    std::string ext = fs::path(rel).extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto kind_it = opts.kind_map.find(ext);
    doc.kind = kind_it != opts.kind_map.end() ? kind_it->second : FileKind::other;

    corpus.ingestion_manifest.push_back(
        {rel, bytes.size(), detail::fnv1a_hex(bytes), false});
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

struct MatrixOptions {
  std::string weighting = "tf-idf";  // "raw" | "tf-idf"
  std::size_t min_doc_freq = 2;
  bool include_comments_and_strings = true;
  TokenizeOptions tokenize;
};

// Builds the weighted term-document matrix over the corpus vocabulary.
// Terms with document frequency below min_doc_freq, or zero idf under
// tf-idf, are pruned.
inline TermDocumentMatrix build_matrix(const Corpus& corpus, const MatrixOptions& opts = {}) {
  if (corpus.documents.empty()) throw EmptyVocabularyError("empty corpus");
  const std::size_t n = corpus.documents.size();

  std::vector<std::map<std::string, std::size_t>> counts(n);
  std::map<std::string, std::size_t> doc_freq;
  std::size_t total_terms = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& raw = corpus.documents[i].text;
    std::string cleaned;
    std::string_view view = raw;
    if (!opts.include_comments_and_strings) {
      cleaned = strip_comments_and_strings(raw);
      view = cleaned;
    }
    for (std::string& tok : tokenize(view, opts.tokenize)) ++counts[i][std::move(tok)];
    for (const auto& [term, c] : counts[i]) {
      ++doc_freq[term];
      total_terms += c;
    }
  }
  if (total_terms == 0) throw EmptyVocabularyError("corpus has empty vocabulary");

  const bool tfidf = opts.weighting == "tf-idf";
  TermDocumentMatrix out;
  out.weighting = opts.weighting;
  for (const auto& [term, df] : doc_freq) {
    if (df < opts.min_doc_freq) continue;
    if (tfidf && df == n) continue;  // idf = 0
    out.terms.push_back(term);
  }
  if (out.terms.empty())
    throw EmptyVocabularyError("all terms pruned; vocabulary empty");

  out.entries = Matrix(n, out.terms.size());
  for (std::size_t j = 0; j < out.terms.size(); ++j) {
    const double idf = tfidf ? std::log(static_cast<double>(n) / doc_freq[out.terms[j]]) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto it = counts[i].find(out.terms[j]);
      if (it == counts[i].end()) continue;
      const double tf = static_cast<double>(it->second);
      out.entries(i, j) = tfidf ? std::log(1.0 + tf) * idf : tf;
    }
  }
  return out;
}

// Recomputes one document's weighted row against an existing matrix's term
// list. Unseen terms are dropped. Used when folding later snapshots into an
// earlier space.
inline std::vector<double> weighted_term_vector(const TermDocumentMatrix& tdm,
                                                const std::vector<double>& idf_per_term,
                                                std::string_view text,
                                                const MatrixOptions& opts = {}) {
  std::string cleaned;
  std::string_view view = text;
  if (!opts.include_comments_and_strings) {
    cleaned = strip_comments_and_strings(text);
    view = cleaned;
  }
  std::map<std::string, std::size_t> counts;
  for (std::string& tok : tokenize(view, opts.tokenize)) ++counts[std::move(tok)];
  std::vector<double> q(tdm.terms.size(), 0.0);
  const bool tfidf = tdm.weighting == "tf-idf";
  for (std::size_t j = 0; j < tdm.terms.size(); ++j) {
    auto it = counts.find(tdm.terms[j]);
    if (it == counts.end()) continue;
    const double tf = static_cast<double>(it->second);
    q[j] = tfidf ? std::log(1.0 + tf) * idf_per_term[j] : tf;
  }
  return q;
}

// --- plain-text sidecar formats ---------------------------------------------

inline std::string serialize(const TermDocumentMatrix& tdm) {
  std::ostringstream out;
  out << tdm.entries.rows() << ' ' << tdm.terms.size() << ' ' << tdm.weighting << '\n';
  for (const auto& t : tdm.terms) out << t << '\n';
  for (std::size_t i = 0; i < tdm.entries.rows(); ++i)
    for (std::size_t j = 0; j < tdm.entries.cols(); ++j)
      if (tdm.entries(i, j) != 0.0)
        out << i << ' ' << j << ' ' << fmt9(tdm.entries(i, j)) << '\n';
  return out.str();
}

inline std::string serialize(const Corpus& corpus) {
  std::ostringstream out;
  out << "corpus " << corpus.snapshot << ' ' << corpus.documents.size() << '\n';
  for (const auto& d : corpus.documents)
    out << d.id << ' ' << to_string(d.kind) << ' ' << fmt9(d.kloc) << '\n';
  out << "manifest " << corpus.ingestion_manifest.size() << '\n';
  for (const auto& m : corpus.ingestion_manifest)
    out << m.path << ' ' << m.byte_length << ' ' << (m.skipped ? "skipped" : m.digest) << '\n';
  return out.str();
}

}  // namespace softmap
