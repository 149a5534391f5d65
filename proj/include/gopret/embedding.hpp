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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gopret/corpus.hpp"

namespace gopret {

struct EmbeddingVector {
  std::vector<double> values;
  bool normalized = false;

  size_t dim() const { return values.size(); }

  // Scales to unit Euclidean norm. Throws Error{InvalidInput} on the zero
  // vector.
  void normalize();
};

// 1 - cosine similarity, in [0, 2]. Symmetric and invariant to positive
// scaling. Throws Error{InvalidInput} on dimension mismatch or zero vectors.
double semantic_distance(const EmbeddingVector& a, const EmbeddingVector& b);

// Per-node raw distances to one query. Entry i belongs to passage i.
struct DistanceField {
  std::vector<double> h0;
  std::string query_text;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  // Vectors are normalized on receipt. Throws TransportError on transient
  // failures, Error{MissingEmbedding} for unknown keys (file-backed).
  virtual std::vector<EmbeddingVector> embed_batch(
      const std::vector<std::string>& texts) = 0;

  EmbeddingVector embed(const std::string& text);
};

// Serves precomputed vectors keyed by content hash of the text. Makes the
// full pipeline bit-reproducible across runs. File records are
// {text, vector} or {hash, vector}, one per line.
class FileBackedProvider final : public EmbeddingProvider {
 public:
  explicit FileBackedProvider(const std::filesystem::path& path);

  std::vector<EmbeddingVector> embed_batch(
      const std::vector<std::string>& texts) override;

 private:
  std::map<std::string, std::vector<double>> vectors_;  // by content hash
};

struct HttpProviderOptions {
  std::string endpoint;           // e.g. http://localhost:8080/embed
  std::string auth_env_var;       // name of the env var holding the token
  size_t batch_size = 32;
  int timeout_seconds = 30;
  int max_retries = 2;
};

// Minimal request {"texts": [...]} -> response {"vectors": [[...]]} with
// JSON bodies. Token values are read from the named env var and never
// logged.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(HttpProviderOptions options);

  std::vector<EmbeddingVector> embed_batch(
      const std::vector<std::string>& texts) override;

 private:
  HttpProviderOptions options_;
};

// Immutable per-passage vector store. All vectors share one dimension and
// are stored normalized.
class EmbeddingIndex {
 public:
  EmbeddingIndex() = default;
  EmbeddingIndex(size_t dim, std::vector<std::vector<double>> vectors,
                 std::vector<std::string> hashes);

  size_t dim() const { return dim_; }
  size_t size() const { return vectors_.size(); }
  const std::vector<double>& vector_of(int passage_id) const;
  const std::string& hash_of(int passage_id) const;
  bool covers(int passage_id) const;

  void save(const std::filesystem::path& path) const;
  static EmbeddingIndex load(const std::filesystem::path& path);

 private:
  size_t dim_ = 0;
  std::vector<std::vector<double>> vectors_;
  std::vector<std::string> hashes_;  // content hash of the passage text
};

// Embeds every passage, reusing any entry already present at index_path
// whose content hash still matches (re-chunking safety). Writes the
// refreshed index back to index_path and returns it.
EmbeddingIndex cache_embeddings(const std::vector<Passage>& passages,
                                EmbeddingProvider& provider,
                                const std::filesystem::path& index_path);

// Entry i = semantic_distance(embed(query), vector of passage i). Only the
// node set of g matters, never its edges. Throws Error{MissingEmbedding}
// listing uncovered node ids.
DistanceField distance_field(const std::string& query,
                             EmbeddingProvider& provider,
                             const EmbeddingIndex& index,
                             const GraphOfPassages& g);

}  // namespace gopret
