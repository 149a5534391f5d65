// Copyright 2026 The gopret Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gopret/corpus.hpp"

namespace gopret::test {

inline std::filesystem::path source_dir() {
  if (const char* dir = std::getenv("GOPRET_SOURCE_DIR")) return dir;
  return std::filesystem::current_path();
}

inline std::filesystem::path fixtures_dir() { return source_dir() / "fixtures"; }

// Fresh scratch directory under the build tree, wiped up front.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("gopret-test-" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

inline std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_all(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << data;
}

// Deterministic word soup: `count` tokens drawn from a tiny vocabulary.
inline std::string random_words(std::mt19937& rng, size_t count) {
  static const std::vector<std::string> vocab = {
      "alpha", "bridge", "census", "delta", "ember",   "fjord", "granite",
      "harbor", "ion",   "jade",   "krill", "lantern", "moss",  "nectar"};
  std::uniform_int_distribution<size_t> pick(0, vocab.size() - 1);
  std::string out;
  for (size_t i = 0; i < count; ++i) {
    if (i) out.push_back(' ');
    out += vocab[pick(rng)];
  }
  return out;
}

// n passages spread over documents of `doc_len` passages each, no keywords.
inline std::vector<Passage> plain_passages(int n, int doc_len = 1, int tokens = 10) {
  std::vector<Passage> passages;
  for (int i = 0; i < n; ++i) {
    Passage p;
    p.id = i;
    p.doc_id = "doc" + std::to_string(i / doc_len);
    p.seq_index = i % doc_len;
    p.text = "passage " + std::to_string(i);
    p.token_count = tokens;
    passages.push_back(std::move(p));
  }
  return passages;
}

}  // namespace gopret::test
