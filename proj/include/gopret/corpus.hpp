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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gopret/tokenizer.hpp"

namespace gopret {

struct Document {
  std::string id;
  std::string title;
  std::string body;
  std::string source_uri;  // optional, may be empty
};

// One chunk of a document. Passage ids are dense 0..n-1 over the corpus;
// seq_index is the 0-based position within the owning document.
struct Passage {
  int id = -1;
  std::string doc_id;
  int seq_index = 0;
  std::string text;
  int token_count = 0;
  std::set<std::string> keywords;  // canonical keyword ids
};

// Canonical keyword with the surface forms it was observed under.
struct Keyword {
  std::string canonical_id;
  std::set<std::string> surface_forms;
};

using KeywordTable = std::map<std::string, Keyword>;

// Edge label bits. A merged edge may carry both.
enum EdgeLabel : uint8_t {
  kEdgeStructural = 1u << 0,
  kEdgeKeyword = 1u << 1,
};

// Undirected labeled adjacency over passage ids. Immutable once built;
// safe to share across threads for reads.
class GraphOfPassages {
 public:
  GraphOfPassages() = default;

  size_t node_count() const { return nodes_.size(); }
  size_t edge_count() const { return edge_labels_.size(); }

  const Passage& passage(int id) const { return nodes_.at(static_cast<size_t>(id)); }
  const std::vector<Passage>& passages() const { return nodes_; }

  // Sorted ascending, never contains `id` itself.
  std::span<const int> neighbors(int id) const;

  // 0 when the edge does not exist, else an EdgeLabel bitmask.
  uint8_t edge_labels(int u, int v) const;

  // Visits each edge once with u < v, ascending (u, v).
  template <typename Fn>
  void for_each_edge(Fn&& fn) const {
    for (const auto& [key, labels] : edge_labels_) {
      fn(key.first, key.second, labels);
    }
  }

  // Connects seq-adjacent passages of the same document (structural) and
  // passages with intersecting keyword sets (keyword). Parallel edges are
  // merged with a union of labels; no self-loops. Throws Error{InvalidInput}
  // if passage ids are not dense 0..n-1.
  static GraphOfPassages build(std::vector<Passage> passages);

 private:
  friend GraphOfPassages load_graph(const std::filesystem::path& path);

  std::vector<Passage> nodes_;
  std::vector<std::vector<int>> adjacency_;
  std::map<std::pair<int, int>, uint8_t> edge_labels_;  // key u < v
};

// Greedy left-to-right packing: each passage takes the longest prefix of
// remaining tokens not exceeding max_tokens, never splitting inside a
// token. Passage text preserves the original bytes from the start of its
// first token to the end of its last token, so concatenating chunks
// reproduces the body modulo boundary whitespace. Empty body yields an
// empty list. Returned ids are 0-based within the document; callers
// renumber when assembling a corpus.
std::vector<Passage> chunk_document(const Document& doc, int max_tokens,
                                    const Tokenizer& tokenizer = default_tokenizer());

// Lowercases (ASCII), strips trailing punctuation, and maps interior
// spaces to underscores. Returns empty when nothing survives.
std::string canonicalize_keyword(std::string_view surface);

// Reduces a wiki-style link to its terminal path segment, then
// canonicalizes it. Underscores in the segment are preserved.
std::string canonicalize_link(std::string_view link);

class KeywordExtractor {
 public:
  virtual ~KeywordExtractor() = default;

  // Returns canonical keyword ids for the passage text. `doc_title` gives
  // the owning document's title so title mentions can be linked.
  virtual std::set<std::string> extract(std::string_view text,
                                        std::string_view doc_title) const = 0;
};

// Rule-based extractor: capitalized multi-word spans plus mentions of the
// document title. Pure and reproducible; lets the whole pipeline run with
// zero network dependencies.
class DeterministicExtractor final : public KeywordExtractor {
 public:
  std::set<std::string> extract(std::string_view text,
                                std::string_view doc_title) const override;
};

// Parses an LLM reply of the form [['entity', 'link'], ...] into canonical
// keyword ids (links win over surface forms). Tolerant of the quoting
// mess real replies contain; returns nullopt when no list can be found.
std::optional<std::set<std::string>> parse_keyword_reply(std::string_view reply);

// D = 2|E| / (|V| (|V|-1)). Throws Error{InvalidInput} when node_count < 2.
double graph_density(const GraphOfPassages& g);

// Versioned line-delimited records: a header {version, node_count}, one
// record per node, then one record per edge with u < v. load_graph
// revalidates every graph invariant and names the offending line on error.
void save_graph(const GraphOfPassages& g, const std::filesystem::path& path);
GraphOfPassages load_graph(const std::filesystem::path& path);

// Corpus input: a directory of .txt files (id/title from the filename
// stem) and/or .jsonl files with records {id, title, body[, source_uri]}.
std::vector<Document> load_corpus_dir(const std::filesystem::path& dir);

}  // namespace gopret
