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

#include "gopret/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "gopret/error.hpp"
#include "gopret/hash.hpp"
#include "gopret/jsonl.hpp"

namespace gopret {

namespace {

constexpr int kGraphFileVersion = 1;

bool ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_trailing_punct(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '"': case '\'': case ')': case ']': case '}':
      return true;
    default:
      return false;
  }
}

bool ends_clause(std::string_view token) {
  for (auto it = token.rbegin(); it != token.rend(); ++it) {
    char c = *it;
    if (c == '"' || c == '\'' || c == ')' || c == ']') continue;
    return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':';
  }
  return false;
}

}  // namespace

std::vector<Passage> chunk_document(const Document& doc, int max_tokens,
                                    const Tokenizer& tokenizer) {
  if (max_tokens < 1) {
    throw Error(ErrorCode::InvalidInput, "max_tokens must be >= 1");
  }
  std::vector<Passage> passages;
  const auto spans = tokenizer.tokenize(doc.body);
  size_t pos = 0;
  while (pos < spans.size()) {
    const size_t take = std::min<size_t>(max_tokens, spans.size() - pos);
    Passage p;
    p.id = static_cast<int>(passages.size());
    p.doc_id = doc.id;
    p.seq_index = static_cast<int>(passages.size());
    p.text = doc.body.substr(spans[pos].begin, spans[pos + take - 1].end - spans[pos].begin);
    p.token_count = static_cast<int>(take);
    passages.push_back(std::move(p));
    pos += take;
  }
  return passages;
}

std::string canonicalize_keyword(std::string_view surface) {
  size_t begin = 0, end = surface.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(surface[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(surface[end - 1]))) --end;
  while (end > begin && is_trailing_punct(surface[end - 1])) --end;
  std::string out;
  out.reserve(end - begin);
  for (size_t i = begin; i < end; ++i) {
    char c = surface[i];
    out.push_back(c == ' ' ? '_' : ascii_lower(c));
  }
  return out;
}

std::string canonicalize_link(std::string_view link) {
  size_t end = link.size();
  // Fragment and query parts are not part of the page name.
  if (auto h = link.find('#'); h != std::string_view::npos) end = h;
  if (auto q = link.substr(0, end).find('?'); q != std::string_view::npos) end = q;
  std::string_view trimmed = link.substr(0, end);
  while (!trimmed.empty() && trimmed.back() == '/') trimmed.remove_suffix(1);
  const size_t slash = trimmed.rfind('/');
  std::string_view segment =
      slash == std::string_view::npos ? trimmed : trimmed.substr(slash + 1);
  return canonicalize_keyword(segment);
}

std::set<std::string> DeterministicExtractor::extract(
    std::string_view text, std::string_view doc_title) const {
  std::set<std::string> ids;
  const auto spans = default_tokenizer().tokenize(text);

  // Maximal runs of >= 2 capitalized tokens; a sentence-final token closes
  // its run.
  std::vector<std::string_view> run;
  auto flush = [&]() {
    if (run.size() >= 2) {
      std::string span;
      for (size_t i = 0; i < run.size(); ++i) {
        if (i) span.push_back(' ');
        span.append(run[i]);
      }
      if (auto id = canonicalize_keyword(span); !id.empty()) ids.insert(id);
    }
    run.clear();
  };
  for (const auto& s : spans) {
    std::string_view token = text.substr(s.begin, s.end - s.begin);
    if (!token.empty() && ascii_upper(token.front())) {
      run.push_back(token);
      if (ends_sentence(token)) flush();
    } else {
      flush();
    }
  }
  flush();

  if (!doc_title.empty()) {
    std::string haystack(text), needle(doc_title);
    std::transform(haystack.begin(), haystack.end(), haystack.begin(), ascii_lower);
    std::transform(needle.begin(), needle.end(), needle.begin(), ascii_lower);
    if (haystack.find(needle) != std::string::npos) {
      if (auto id = canonicalize_keyword(doc_title); !id.empty()) ids.insert(id);
    }
  }
  return ids;
}

std::optional<std::set<std::string>> parse_keyword_reply(std::string_view reply) {
  const size_t outer = reply.find('[');
  if (outer == std::string_view::npos) return std::nullopt;

  auto strip_quotes = [](std::string_view s) -> std::string_view {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
      s = s.substr(1, s.size() - 2);
    } else {
      if (!s.empty() && (s.front() == '\'' || s.front() == '"')) s.remove_prefix(1);
      if (!s.empty() && (s.back() == '\'' || s.back() == '"')) s.remove_suffix(1);
    }
    return s;
  };

  // The separator between entity and link is a comma flanked by quotes;
  // commas and apostrophes inside either string stay untouched.
  auto split_pair = [&](std::string_view inner)
      -> std::optional<std::pair<std::string_view, std::string_view>> {
    for (size_t i = 0; i < inner.size(); ++i) {
      if (inner[i] != ',') continue;
      size_t before = i;
      while (before > 0 && std::isspace(static_cast<unsigned char>(inner[before - 1]))) --before;
      size_t after = i + 1;
      while (after < inner.size() && std::isspace(static_cast<unsigned char>(inner[after]))) ++after;
      if (before > 0 && (inner[before - 1] == '\'' || inner[before - 1] == '"') &&
          after < inner.size() && (inner[after] == '\'' || inner[after] == '"')) {
        return std::make_pair(inner.substr(0, i), inner.substr(i + 1));
      }
    }
    return std::nullopt;
  };

  std::set<std::string> ids;
  size_t pos = outer + 1;
  bool saw_pair = false;
  while (true) {
    const size_t open = reply.find('[', pos);
    if (open == std::string_view::npos) break;
    const size_t close = reply.find(']', open + 1);
    if (close == std::string_view::npos) return std::nullopt;  // truncated pair
    saw_pair = true;
    std::string_view inner = reply.substr(open + 1, close - open - 1);
    std::string id;
    if (auto parts = split_pair(inner)) {
      std::string_view link = strip_quotes(parts->second);
      id = link.empty() ? canonicalize_keyword(strip_quotes(parts->first))
                        : canonicalize_link(link);
    } else {
      id = canonicalize_keyword(strip_quotes(inner));
    }
    if (!id.empty()) ids.insert(id);
    pos = close + 1;
  }
  if (!saw_pair) {
    // Accept a bare empty list; anything else without pairs is malformed.
    const size_t close = reply.find(']', outer + 1);
    if (close == std::string_view::npos) return std::nullopt;
    std::string_view between = reply.substr(outer + 1, close - outer - 1);
    if (between.find_first_not_of(" \t\r\n") != std::string_view::npos) return std::nullopt;
  }
  return ids;
}

std::span<const int> GraphOfPassages::neighbors(int id) const {
  const auto& list = adjacency_.at(static_cast<size_t>(id));
  return {list.data(), list.size()};
}

uint8_t GraphOfPassages::edge_labels(int u, int v) const {
  if (u > v) std::swap(u, v);
  auto it = edge_labels_.find({u, v});
  return it == edge_labels_.end() ? 0 : it->second;
}

GraphOfPassages GraphOfPassages::build(std::vector<Passage> passages) {
  const size_t n = passages.size();
  std::vector<char> seen(n, 0);
  for (const auto& p : passages) {
    if (p.id < 0 || static_cast<size_t>(p.id) >= n || seen[static_cast<size_t>(p.id)]) {
      throw Error(ErrorCode::InvalidInput,
                  "passage ids must be dense 0..n-1 without duplicates (id " +
                      std::to_string(p.id) + ")");
    }
    seen[static_cast<size_t>(p.id)] = 1;
  }
  std::sort(passages.begin(), passages.end(),
            [](const Passage& a, const Passage& b) { return a.id < b.id; });

  GraphOfPassages g;
  g.nodes_ = std::move(passages);
  g.adjacency_.assign(n, {});

  auto add_edge = [&](int u, int v, uint8_t label) {
    if (u == v) return;  // no self-loops
    if (u > v) std::swap(u, v);
    g.edge_labels_[{u, v}] |= label;
  };

  // Structural: seq-adjacent passages of the same document.
  std::unordered_map<std::string, std::vector<int>> by_doc;
  for (const auto& p : g.nodes_) by_doc[p.doc_id].push_back(p.id);
  for (auto& [doc, ids] : by_doc) {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      return g.nodes_[a].seq_index < g.nodes_[b].seq_index;
    });
    for (size_t i = 0; i < ids.size(); ++i) {
      const int expect = static_cast<int>(i);
      if (g.nodes_[ids[i]].seq_index != expect) {
        throw Error(ErrorCode::InvalidInput,
                    "document " + doc + " has non-contiguous seq_index");
      }
      if (i + 1 < ids.size()) add_edge(ids[i], ids[i + 1], kEdgeStructural);
    }
  }

  // Keyword: passages sharing any canonical keyword form a clique.
  std::map<std::string, std::vector<int>> by_keyword;
  for (const auto& p : g.nodes_) {
    for (const auto& k : p.keywords) by_keyword[k].push_back(p.id);
  }
  for (const auto& [kw, ids] : by_keyword) {
    for (size_t i = 0; i < ids.size(); ++i) {
      for (size_t j = i + 1; j < ids.size(); ++j) {
        add_edge(ids[i], ids[j], kEdgeKeyword);
      }
    }
  }

  for (const auto& [key, labels] : g.edge_labels_) {
    g.adjacency_[key.first].push_back(key.second);
    g.adjacency_[key.second].push_back(key.first);
  }
  for (auto& list : g.adjacency_) std::sort(list.begin(), list.end());
  return g;
}

double graph_density(const GraphOfPassages& g) {
  const double v = static_cast<double>(g.node_count());
  if (g.node_count() < 2) {
    throw Error(ErrorCode::InvalidInput, "density needs at least 2 nodes");
  }
  return 2.0 * static_cast<double>(g.edge_count()) / (v * (v - 1.0));
}

void save_graph(const GraphOfPassages& g, const std::filesystem::path& path) {
  std::vector<nlohmann::json> records;
  records.reserve(1 + g.node_count() + g.edge_count());

  std::string fingerprint;
  for (const auto& p : g.passages()) {
    fingerprint += p.doc_id;
    fingerprint.push_back('\x1f');
    fingerprint += std::to_string(p.token_count);
    fingerprint.push_back('\x1e');
  }
  records.push_back({{"version", kGraphFileVersion},
                     {"node_count", g.node_count()},
                     {"edge_count", g.edge_count()},
                     {"source_checksum", content_hash(fingerprint)}});

  for (const auto& p : g.passages()) {
    records.push_back({{"id", p.id},
                       {"doc_id", p.doc_id},
                       {"seq_index", p.seq_index},
                       {"token_count", p.token_count},
                       {"keywords", p.keywords}});
  }
  g.for_each_edge([&](int u, int v, uint8_t labels) {
    nlohmann::json lab = nlohmann::json::array();
    if (labels & kEdgeStructural) lab.push_back("structural");
    if (labels & kEdgeKeyword) lab.push_back("keyword");
    records.push_back({{"u", u}, {"v", v}, {"labels", lab}});
  });
  write_jsonl(path, records);
}

GraphOfPassages load_graph(const std::filesystem::path& path) {
  enum class Phase { Header, Nodes, Edges };
  Phase phase = Phase::Header;
  size_t node_count = 0, edge_count = 0;
  size_t nodes_seen = 0, edges_seen = 0;
  std::vector<Passage> passages;
  std::vector<std::tuple<int, int, uint8_t>> edges;
  std::set<std::pair<int, int>> seen_edges;

  auto fail = [&](size_t line, const std::string& what) -> void {
    throw Error(ErrorCode::Format,
                path.string() + ": " + what + " (record at line " +
                    std::to_string(line) + ")");
  };

  read_jsonl(path, [&](const nlohmann::json& r, size_t line) {
    try {
      switch (phase) {
        case Phase::Header: {
          if (r.at("version").get<int>() != kGraphFileVersion) {
            throw Error(ErrorCode::VersionMismatch,
                        path.string() + ": unsupported graph file version " +
                            r.at("version").dump());
          }
          node_count = r.at("node_count").get<size_t>();
          edge_count = r.at("edge_count").get<size_t>();
          passages.reserve(node_count);
          phase = node_count == 0 ? Phase::Edges : Phase::Nodes;
          break;
        }
        case Phase::Nodes: {
          Passage p;
          p.id = r.at("id").get<int>();
          if (static_cast<size_t>(p.id) != nodes_seen) {
            fail(line, "node ids must be dense and in order; expected " +
                           std::to_string(nodes_seen));
          }
          p.doc_id = r.at("doc_id").get<std::string>();
          p.seq_index = r.at("seq_index").get<int>();
          p.token_count = r.at("token_count").get<int>();
          if (p.seq_index < 0 || p.token_count < 0) fail(line, "negative node field");
          for (const auto& k : r.at("keywords")) p.keywords.insert(k.get<std::string>());
          passages.push_back(std::move(p));
          if (++nodes_seen == node_count) phase = Phase::Edges;
          break;
        }
        case Phase::Edges: {
          const int u = r.at("u").get<int>();
          const int v = r.at("v").get<int>();
          if (u >= v) fail(line, "edge record must satisfy u < v");
          if (u < 0 || static_cast<size_t>(v) >= node_count) fail(line, "edge endpoint out of range");
          if (!seen_edges.insert({u, v}).second) fail(line, "duplicate edge");
          uint8_t labels = 0;
          for (const auto& lab : r.at("labels")) {
            const auto s = lab.get<std::string>();
            if (s == "structural") labels |= kEdgeStructural;
            else if (s == "keyword") labels |= kEdgeKeyword;
            else fail(line, "unknown edge label '" + s + "'");
          }
          if (labels == 0) fail(line, "edge carries no labels");
          if (labels & kEdgeStructural) {
            const auto& a = passages[static_cast<size_t>(u)];
            const auto& b = passages[static_cast<size_t>(v)];
            if (a.doc_id != b.doc_id || std::abs(a.seq_index - b.seq_index) != 1) {
              fail(line, "structural edge must join seq-adjacent passages of one document");
            }
          }
          if (labels & kEdgeKeyword) {
            const auto& a = passages[static_cast<size_t>(u)].keywords;
            const auto& b = passages[static_cast<size_t>(v)].keywords;
            const bool intersects = std::any_of(a.begin(), a.end(), [&](const std::string& k) {
              return b.count(k) > 0;
            });
            if (!intersects) fail(line, "keyword edge with disjoint keyword sets");
          }
          edges.emplace_back(u, v, labels);
          ++edges_seen;
          break;
        }
      }
    } catch (const nlohmann::json::exception& e) {
      fail(line, std::string("bad record: ") + e.what());
    }
  });

  if (phase == Phase::Header) {
    throw Error(ErrorCode::Format, path.string() + ": missing header record");
  }
  if (nodes_seen != node_count || edges_seen != edge_count) {
    throw Error(ErrorCode::Format,
                path.string() + ": truncated file; header declares " +
                    std::to_string(node_count) + " nodes / " +
                    std::to_string(edge_count) + " edges, found " +
                    std::to_string(nodes_seen) + " / " + std::to_string(edges_seen) +
                    " (file ends after record " +
                    std::to_string(1 + nodes_seen + edges_seen) + ")");
  }

  GraphOfPassages g;
  g.nodes_ = std::move(passages);
  g.adjacency_.assign(node_count, {});
  for (const auto& [u, v, labels] : edges) {
    g.edge_labels_[{u, v}] = labels;
    g.adjacency_[static_cast<size_t>(u)].push_back(v);
    g.adjacency_[static_cast<size_t>(v)].push_back(u);
  }
  for (auto& list : g.adjacency_) std::sort(list.begin(), list.end());
  return g;
}

std::vector<Document> load_corpus_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::Io, "corpus directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".txt" || ext == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<Document> docs;
  std::unordered_set<std::string> ids;
  auto add = [&](Document doc) {
    if (!ids.insert(doc.id).second) {
      throw Error(ErrorCode::InvalidInput, "duplicate document id: " + doc.id);
    }
    docs.push_back(std::move(doc));
  };

  for (const auto& file : files) {
    if (file.extension() == ".txt") {
      std::ifstream in(file);
      if (!in) throw Error(ErrorCode::Io, "cannot open " + file.string());
      std::stringstream ss;
      ss << in.rdbuf();
      add({file.stem().string(), file.stem().string(), ss.str(), file.string()});
    } else {
      read_jsonl(file, [&](const nlohmann::json& r, size_t line) {
        try {
          Document doc;
          doc.id = r.at("id").get<std::string>();
          doc.title = r.at("title").get<std::string>();
          doc.body = r.at("body").get<std::string>();
          doc.source_uri = r.value("source_uri", "");
          add(std::move(doc));
        } catch (const nlohmann::json::exception& e) {
          throw Error(ErrorCode::Format, file.string() + ": bad document record at line " +
                                             std::to_string(line) + ": " + e.what());
        }
      });
    }
  }
  if (docs.empty()) {
    throw Error(ErrorCode::InvalidInput,
                "corpus directory " + dir.string() + " holds no .txt or .jsonl documents");
  }
  return docs;
}

}  // namespace gopret
