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

#include "gopret/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "gopret/error.hpp"
#include "gopret/hash.hpp"
#include "gopret/jsonl.hpp"

namespace gopret {

namespace {
constexpr int kIndexFileVersion = 1;

double norm_of(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}
}  // namespace

void EmbeddingVector::normalize() {
  const double norm = norm_of(values);
  if (norm == 0.0) {
    throw Error(ErrorCode::InvalidInput, "cannot normalize the zero vector");
  }
  for (double& x : values) x /= norm;
  normalized = true;
}

double semantic_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "semantic_distance over dims " + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()));
  }
  const double na = a.normalized ? 1.0 : norm_of(a.values);
  const double nb = b.normalized ? 1.0 : norm_of(b.values);
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::InvalidInput, "semantic_distance over a zero vector");
  }
  const double dot = std::inner_product(a.values.begin(), a.values.end(),
                                        b.values.begin(), 0.0);
  const double d = 1.0 - dot / (na * nb);
  return std::clamp(d, 0.0, 2.0);  // shave float noise at the range ends
}

EmbeddingVector EmbeddingProvider::embed(const std::string& text) {
  auto batch = embed_batch({text});
  return std::move(batch.front());
}

FileBackedProvider::FileBackedProvider(const std::filesystem::path& path) {
  size_t dim = 0;
  read_jsonl(path, [&](const nlohmann::json& r, size_t line) {
    std::string key;
    if (r.contains("text")) {
      key = content_hash(r["text"].get<std::string>());
    } else if (r.contains("hash")) {
      key = r["hash"].get<std::string>();
    } else {
      throw Error(ErrorCode::Format, path.string() + ": record at line " +
                                         std::to_string(line) +
                                         " lacks \"text\" or \"hash\"");
    }
    auto vec = r.at("vector").get<std::vector<double>>();
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim || vec.empty()) {
      throw Error(ErrorCode::DimensionMismatch,
                  path.string() + ": vector at line " + std::to_string(line) +
                      " has dim " + std::to_string(vec.size()) + ", expected " +
                      std::to_string(dim));
    }
    vectors_[key] = std::move(vec);
  });
}

std::vector<EmbeddingVector> FileBackedProvider::embed_batch(
    const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    auto it = vectors_.find(content_hash(text));
    if (it == vectors_.end()) {
      throw Error(ErrorCode::MissingEmbedding,
                  "no stored vector for text: " +
                      text.substr(0, std::min<size_t>(text.size(), 80)));
    }
    EmbeddingVector v{it->second, false};
    v.normalize();
    out.push_back(std::move(v));
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpProviderOptions options)
    : options_(std::move(options)) {}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
  const auto scheme_end = options_.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::Config, "embedding endpoint must be an http(s) URL");
  }
  const auto path_start = options_.endpoint.find('/', scheme_end + 3);
  const std::string base = path_start == std::string::npos
                               ? options_.endpoint
                               : options_.endpoint.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : options_.endpoint.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(options_.timeout_seconds);
  client.set_read_timeout(options_.timeout_seconds);
  if (!options_.auth_env_var.empty()) {
    if (const char* token = std::getenv(options_.auth_env_var.c_str())) {
      client.set_bearer_token_auth(token);
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (size_t start = 0; start < texts.size(); start += options_.batch_size) {
    const size_t stop = std::min(texts.size(), start + options_.batch_size);
    nlohmann::json body = {{"texts", nlohmann::json::array()}};
    for (size_t i = start; i < stop; ++i) body["texts"].push_back(texts[i]);

    httplib::Result res;
    std::string last_error;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
      res = client.Post(path, body.dump(), "application/json");
      if (res && res->status == 200) break;
      last_error = res ? "status " + std::to_string(res->status) : "no response";
      res = httplib::Result();
    }
    if (!res) {
      throw TransportError("embedding request failed after retries: " + last_error);
    }
    auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("vectors") || !reply["vectors"].is_array()) {
      throw Error(ErrorCode::Format, "embedding endpoint returned a non-{vectors} body");
    }
    if (reply["vectors"].size() != stop - start) {
      throw Error(ErrorCode::Format,
                  "embedding endpoint returned " + std::to_string(reply["vectors"].size()) +
                      " vectors for " + std::to_string(stop - start) + " texts");
    }
    for (const auto& jv : reply["vectors"]) {
      EmbeddingVector v{jv.get<std::vector<double>>(), false};
      v.normalize();
      out.push_back(std::move(v));
    }
  }
  return out;
}

EmbeddingIndex::EmbeddingIndex(size_t dim, std::vector<std::vector<double>> vectors,
                               std::vector<std::string> hashes)
    : dim_(dim), vectors_(std::move(vectors)), hashes_(std::move(hashes)) {
  if (vectors_.size() != hashes_.size()) {
    throw Error(ErrorCode::InvalidInput, "index vectors/hashes length mismatch");
  }
  for (const auto& v : vectors_) {
    if (v.size() != dim_) {
      throw Error(ErrorCode::DimensionMismatch, "index vector dim mismatch");
    }
  }
}

const std::vector<double>& EmbeddingIndex::vector_of(int passage_id) const {
  if (!covers(passage_id)) {
    throw Error(ErrorCode::MissingEmbedding,
                "index has no vector for passage " + std::to_string(passage_id));
  }
  return vectors_[static_cast<size_t>(passage_id)];
}

const std::string& EmbeddingIndex::hash_of(int passage_id) const {
  if (!covers(passage_id)) {
    throw Error(ErrorCode::MissingEmbedding,
                "index has no vector for passage " + std::to_string(passage_id));
  }
  return hashes_[static_cast<size_t>(passage_id)];
}

bool EmbeddingIndex::covers(int passage_id) const {
  return passage_id >= 0 && static_cast<size_t>(passage_id) < vectors_.size() &&
         !vectors_[static_cast<size_t>(passage_id)].empty();
}

void EmbeddingIndex::save(const std::filesystem::path& path) const {
  std::vector<nlohmann::json> records;
  records.reserve(1 + vectors_.size());
  records.push_back({{"version", kIndexFileVersion}, {"d", dim_}, {"count", vectors_.size()}});
  for (size_t i = 0; i < vectors_.size(); ++i) {
    records.push_back({{"passage_id", i},
                       {"content_hash", hashes_[i]},
                       {"vector", vectors_[i]}});
  }
  write_jsonl(path, records);
}

EmbeddingIndex EmbeddingIndex::load(const std::filesystem::path& path) {
  bool have_header = false;
  size_t dim = 0, count = 0, seen = 0;
  std::vector<std::vector<double>> vectors;
  std::vector<std::string> hashes;

  read_jsonl(path, [&](const nlohmann::json& r, size_t line) {
    try {
      if (!have_header) {
        if (r.at("version").get<int>() != kIndexFileVersion) {
          throw Error(ErrorCode::VersionMismatch,
                      path.string() + ": unsupported index version " + r.at("version").dump());
        }
        dim = r.at("d").get<size_t>();
        count = r.at("count").get<size_t>();
        vectors.assign(count, {});
        hashes.assign(count, "");
        have_header = true;
        return;
      }
      const size_t id = r.at("passage_id").get<size_t>();
      if (id >= count) {
        throw Error(ErrorCode::Format, path.string() + ": passage_id out of range at line " +
                                           std::to_string(line));
      }
      auto vec = r.at("vector").get<std::vector<double>>();
      if (vec.size() != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    path.string() + ": vector at line " + std::to_string(line) +
                        " has dim " + std::to_string(vec.size()) + ", header declares " +
                        std::to_string(dim));
      }
      vectors[id] = std::move(vec);
      hashes[id] = r.at("content_hash").get<std::string>();
      ++seen;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Format, path.string() + ": bad record at line " +
                                         std::to_string(line) + ": " + e.what());
    }
  });

  if (!have_header) {
    throw Error(ErrorCode::Format, path.string() + ": missing index header");
  }
  if (seen != count) {
    throw Error(ErrorCode::Format,
                path.string() + ": truncated index; header declares " +
                    std::to_string(count) + " records, found " + std::to_string(seen));
  }
  return EmbeddingIndex(dim, std::move(vectors), std::move(hashes));
}

EmbeddingIndex cache_embeddings(const std::vector<Passage>& passages,
                                EmbeddingProvider& provider,
                                const std::filesystem::path& index_path) {
  std::vector<std::vector<double>> vectors(passages.size());
  std::vector<std::string> hashes(passages.size());
  for (const auto& p : passages) {
    hashes[static_cast<size_t>(p.id)] = content_hash(p.text);
  }

  // Resume: keep cached vectors whose content hash still matches.
  size_t dim = 0;
  if (std::filesystem::exists(index_path)) {
    const auto cached = EmbeddingIndex::load(index_path);
    dim = cached.dim();
    for (const auto& p : passages) {
      if (cached.covers(p.id) && cached.hash_of(p.id) == hashes[static_cast<size_t>(p.id)]) {
        vectors[static_cast<size_t>(p.id)] = cached.vector_of(p.id);
      }
    }
  }

  std::vector<std::string> missing_texts;
  std::vector<size_t> missing_ids;
  for (const auto& p : passages) {
    if (vectors[static_cast<size_t>(p.id)].empty()) {
      missing_texts.push_back(p.text);
      missing_ids.push_back(static_cast<size_t>(p.id));
    }
  }
  if (!missing_texts.empty()) {
    auto fresh = provider.embed_batch(missing_texts);
    for (size_t i = 0; i < missing_ids.size(); ++i) {
      if (dim == 0) dim = fresh[i].dim();
      if (fresh[i].dim() != dim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "provider returned dim " + std::to_string(fresh[i].dim()) +
                        " into a dim-" + std::to_string(dim) + " index");
      }
      vectors[missing_ids[i]] = std::move(fresh[i].values);
    }
  }

  EmbeddingIndex index(dim, std::move(vectors), std::move(hashes));
  index.save(index_path);
  return index;
}

DistanceField distance_field(const std::string& query,
                             EmbeddingProvider& provider,
                             const EmbeddingIndex& index,
                             const GraphOfPassages& g) {
  std::vector<int> uncovered;
  for (size_t i = 0; i < g.node_count(); ++i) {
    if (!index.covers(static_cast<int>(i))) uncovered.push_back(static_cast<int>(i));
  }
  if (!uncovered.empty()) {
    std::ostringstream oss;
    oss << "index does not cover node ids:";
    for (size_t i = 0; i < uncovered.size() && i < 20; ++i) oss << ' ' << uncovered[i];
    if (uncovered.size() > 20) oss << " ... (" << uncovered.size() << " total)";
    throw Error(ErrorCode::MissingEmbedding, oss.str());
  }

  DistanceField field;
  field.query_text = query;
  field.h0.resize(g.node_count());
  if (g.node_count() == 0) return field;

  EmbeddingVector q = provider.embed(query);
  if (q.dim() != index.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "query embedding dim " + std::to_string(q.dim()) +
                    " vs index dim " + std::to_string(index.dim()));
  }
  for (size_t i = 0; i < g.node_count(); ++i) {
    EmbeddingVector p{index.vector_of(static_cast<int>(i)), true};
    field.h0[i] = semantic_distance(q, p);
  }
  return field;
}

}  // namespace gopret
