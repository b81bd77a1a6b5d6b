// Shared test fixtures: the planted-cluster corpus and temp-dir helpers.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "softmap/rng.hpp"

namespace fixtures {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    path_ = fs::temp_directory_path() / ("softmap_test_" + name);
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

struct PlantedCorpus {
  std::vector<std::string> filenames;  // relative, sorted order matches ingest
  std::vector<int> cluster_of;         // parallel to sorted filenames
};

// 30 documents in 3 vocabulary clusters: 10 shared terms plus 20
// cluster-exclusive terms each. Documents draw most of their words from
// their own cluster's vocabulary.
inline PlantedCorpus write_planted_corpus(const fs::path& root, std::uint64_t seed = 42,
                                          std::size_t docs_per_cluster = 10,
                                          std::size_t extra_docs = 0) {
  softmap::SplitMix64 rng(seed);
  const std::vector<std::string> shared = {
      "shared00", "shared01", "shared02", "shared03", "shared04",
      "shared05", "shared06", "shared07", "shared08", "shared09"};
  std::vector<std::vector<std::string>> cluster_terms(3);
  const char* names[3] = {"alpha", "beta", "gamma"};
  for (int c = 0; c < 3; ++c)
    for (int t = 0; t < 20; ++t)
      cluster_terms[c].push_back(std::string(names[c]) + "term" +
                                 (t < 10 ? "0" : "") + std::to_string(t));

  PlantedCorpus out;
  std::vector<std::pair<std::string, int>> files;
  for (int c = 0; c < 3; ++c) {
    for (std::size_t d = 0; d < docs_per_cluster; ++d) {
      std::string body;
      for (int w = 0; w < 80; ++w) {
        const bool from_shared = rng.uniform() < 0.15;
        const auto& pool = from_shared ? shared : cluster_terms[c];
        body += pool[static_cast<std::size_t>(rng.uniform() * pool.size())];
        body += (w % 8 == 7) ? '\n' : ' ';
      }
      body += '\n';
      const std::string name = std::string(names[c]) + "_doc" + (d < 10 ? "0" : "") +
                               std::to_string(d) + ".java";
      write_file(root / name, body);
      files.emplace_back(name, c);
    }
  }
  // optional extra documents with entirely fresh vocabulary
  for (std::size_t d = 0; d < extra_docs; ++d) {
    std::string body;
    for (int w = 0; w < 60; ++w) {
      body += "novel" + std::to_string(d) + "word" + std::to_string(w % 12);
      body += (w % 8 == 7) ? '\n' : ' ';
    }
    body += '\n';
    const std::string name = "novel_doc" + std::to_string(d) + ".java";
    write_file(root / name, body);
    files.emplace_back(name, -1);
  }
  std::sort(files.begin(), files.end());
  for (auto& [name, cluster] : files) {
    out.filenames.push_back(name);
    out.cluster_of.push_back(cluster);
  }
  return out;
}

}  // namespace fixtures
