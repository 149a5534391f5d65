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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "gopret/corpus.hpp"
#include "gopret/error.hpp"
#include "gopret/jsonl.hpp"
#include "gopret/llm.hpp"
#include "gopret/llm_extractor.hpp"
#include "test_util.hpp"

using namespace gopret;
using gopret::test::TempDir;

namespace {

// Whitespace token stream, the independent oracle for chunk arithmetic
// and the round-trip comparison.
std::vector<std::string> tokens_of(const std::string& text) {
  std::vector<std::string> out;
  const auto spans = default_tokenizer().tokenize(text);
  for (const auto& s : spans) out.push_back(text.substr(s.begin, s.end - s.begin));
  return out;
}

}  // namespace

TEST_CASE("chunk_document: empty body yields no passages") {
  const auto passages = chunk_document({"d", "t", "", ""}, 200);
  CHECK(passages.empty());
}

TEST_CASE("chunk_document: body below the limit stays one passage") {
  std::mt19937 rng(7);
  Document doc{"d", "t", gopret::test::random_words(rng, 150), ""};
  const auto passages = chunk_document(doc, 200);
  REQUIRE(passages.size() == 1);
  CHECK(passages[0].seq_index == 0);
  CHECK(passages[0].token_count == 150);
  CHECK(passages[0].text == doc.body);
}

TEST_CASE("chunk_document: 450 tokens pack greedily as 200/200/50") {
  std::mt19937 rng(11);
  Document doc{"d", "t", gopret::test::random_words(rng, 450), ""};
  REQUIRE(tokens_of(doc.body).size() == 450);  // oracle for the token count

  const auto passages = chunk_document(doc, 200);
  REQUIRE(passages.size() == 3);
  CHECK(passages[0].token_count == 200);
  CHECK(passages[1].token_count == 200);
  CHECK(passages[2].token_count == 50);
  for (size_t i = 0; i < passages.size(); ++i) {
    CHECK(passages[i].seq_index == static_cast<int>(i));
    CHECK(passages[i].doc_id == "d");
  }
}

TEST_CASE("chunk_document: concatenation reproduces the body modulo boundary whitespace") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<size_t> len(0, 700);
    Document doc{"d", "t", gopret::test::random_words(rng, len(rng)), ""};
    // Mess up the whitespace a little.
    if (!doc.body.empty() && trial % 3 == 0) doc.body = "  " + doc.body + "\n\n";

    const auto passages = chunk_document(doc, 97);
    std::string joined;
    for (const auto& p : passages) {
      CHECK(p.token_count <= 97);
      if (!joined.empty()) joined.push_back(' ');
      joined += p.text;
    }
    CHECK(tokens_of(joined) == tokens_of(doc.body));
  }
}

TEST_CASE("chunk_document rejects max_tokens < 1") {
  CHECK_THROWS_AS(chunk_document({"d", "t", "a b", ""}, 0), Error);
}

TEST_CASE("canonicalize_keyword lowers, strips trailing punctuation, keeps inner marks") {
  CHECK(canonicalize_keyword("Rolf Olsen") == "rolf_olsen");
  CHECK(canonicalize_keyword("Rolf Olsen,") == "rolf_olsen");
  CHECK(canonicalize_keyword("D'Angelo.") == "d'angelo");
  CHECK(canonicalize_keyword("  Charles Mingus Jr. ") == "charles_mingus_jr");
  CHECK(canonicalize_keyword("...") == "");
}

TEST_CASE("canonicalize_link keeps the terminal segment with underscores") {
  CHECK(canonicalize_link("https://en.wikipedia.org/wiki/Rolf_Olsen") == "rolf_olsen");
  CHECK(canonicalize_link("https://en.wikipedia.org/wiki/D'Angelo") == "d'angelo");
  CHECK(canonicalize_link("https://en.wikipedia.org/wiki/Berlin#History") == "berlin");
  CHECK(canonicalize_link("Berlin") == "berlin");
}

TEST_CASE("deterministic extractor finds capitalized spans") {
  DeterministicExtractor extractor;
  const auto ids = extractor.extract(
      "Hotel by the Hour is a 1970 West German crime film directed by Rolf Olsen "
      "and starring Curd Jürgens, Andrea Rau and Corny Collins.",
      "");
  CHECK(ids.count("rolf_olsen") == 1);
  CHECK(ids.count("curd_jürgens") == 1);
  CHECK(ids.count("corny_collins") == 1);
}

TEST_CASE("deterministic extractor does not join spans across sentences") {
  DeterministicExtractor extractor;
  const auto ids = extractor.extract("He met Rolf Olsen. Vienna Austria was next.", "");
  CHECK(ids.count("rolf_olsen") == 1);
  CHECK(ids.count("vienna_austria") == 1);
  CHECK(ids.count("olsen._vienna") == 0);
}

TEST_CASE("deterministic extractor records title mentions") {
  DeterministicExtractor extractor;
  const auto ids = extractor.extract("the film hotel by the hour was panned.",
                                     "Hotel by the Hour");
  CHECK(ids.count("hotel_by_the_hour") == 1);
}

TEST_CASE("extractors return nothing for empty text") {
  DeterministicExtractor det;
  CHECK(det.extract("", "anything").empty());
  ScriptedLlmClient llm({});
  LlmKeywordExtractor ext(llm);
  CHECK(ext.extract("", "t").empty());
  CHECK(llm.calls() == 0);
}

TEST_CASE("llm extractor canonicalizes links, apostrophes intact") {
  ScriptedLlmClient llm(
      {"[['D'Angelo','https://en.wikipedia.org/wiki/D'Angelo']]"});
  LlmKeywordExtractor ext(llm);
  const auto ids = ext.extract("the performer D'Angelo", "t");
  REQUIRE(ids.size() == 1);
  CHECK(ids.count("d'angelo") == 1);
  CHECK(ext.warnings().empty());
}

TEST_CASE("llm extractor turns malformed replies into a warning and empty set") {
  ScriptedLlmClient llm({"I could not find entities, sorry."});
  LlmKeywordExtractor ext(llm);
  CHECK(ext.extract("some text", "t").empty());
  REQUIRE(ext.warnings().size() == 1);
}

TEST_CASE("llm extractor accepts an empty list reply") {
  ScriptedLlmClient llm({"[]"});
  LlmKeywordExtractor ext(llm);
  CHECK(ext.extract("nothing here", "t").empty());
  CHECK(ext.warnings().empty());
}

TEST_CASE("build_graph: one passage has no edges") {
  const auto g = GraphOfPassages::build(gopret::test::plain_passages(1));
  CHECK(g.node_count() == 1);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("build_graph: consecutive passages form a structural path") {
  auto passages = gopret::test::plain_passages(3, /*doc_len=*/3);
  passages[0].keywords = {"a"};
  passages[1].keywords = {"b"};
  passages[2].keywords = {"c"};
  const auto g = GraphOfPassages::build(passages);
  // Pairwise enumeration: (0,1) and (1,2) share a document and are
  // seq-adjacent; (0,2) is not; no keyword intersections.
  CHECK(g.edge_count() == 2);
  CHECK(g.edge_labels(0, 1) == kEdgeStructural);
  CHECK(g.edge_labels(1, 2) == kEdgeStructural);
  CHECK(g.edge_labels(0, 2) == 0);
}

TEST_CASE("build_graph: shared keyword across documents makes one keyword edge") {
  auto passages = gopret::test::plain_passages(2);
  passages[0].keywords = {"d'angelo", "music"};
  passages[1].keywords = {"d'angelo"};
  const auto g = GraphOfPassages::build(passages);
  CHECK(g.edge_count() == 1);
  CHECK(g.edge_labels(0, 1) == kEdgeKeyword);
}

TEST_CASE("build_graph merges structural and keyword labels on one edge") {
  auto passages = gopret::test::plain_passages(2, /*doc_len=*/2);
  passages[0].keywords = {"shared"};
  passages[1].keywords = {"shared"};
  const auto g = GraphOfPassages::build(passages);
  CHECK(g.edge_count() == 1);
  CHECK(g.edge_labels(0, 1) == (kEdgeStructural | kEdgeKeyword));
}

TEST_CASE("build_graph rejects duplicate ids") {
  auto passages = gopret::test::plain_passages(2);
  passages[1].id = 0;
  CHECK_THROWS_AS(GraphOfPassages::build(passages), Error);
}

TEST_CASE("graph symmetry and keyword cliques hold on random corpora") {
  std::mt19937 rng(37);
  std::uniform_int_distribution<int> kw_count(0, 3), kw_pick(0, 5);
  for (int trial = 0; trial < 10; ++trial) {
    auto passages = gopret::test::plain_passages(24, /*doc_len=*/4);
    for (auto& p : passages) {
      const int c = kw_count(rng);
      for (int j = 0; j < c; ++j) p.keywords.insert("k" + std::to_string(kw_pick(rng)));
    }
    const auto g = GraphOfPassages::build(passages);

    for (size_t i = 0; i < g.node_count(); ++i) {
      for (int j : g.neighbors(static_cast<int>(i))) {
        CHECK(j != static_cast<int>(i));
        const auto back = g.neighbors(j);
        CHECK(std::binary_search(back.begin(), back.end(), static_cast<int>(i)));
      }
    }
    // Per keyword, carriers form a clique.
    for (size_t a = 0; a < passages.size(); ++a) {
      for (size_t b = a + 1; b < passages.size(); ++b) {
        const auto& ka = passages[a].keywords;
        const bool shared = std::any_of(ka.begin(), ka.end(), [&](const std::string& k) {
          return passages[b].keywords.count(k) > 0;
        });
        if (shared) {
          CHECK((g.edge_labels(static_cast<int>(a), static_cast<int>(b)) & kEdgeKeyword) != 0);
        }
      }
    }
    // Structural edge count per document: doc of m passages has m-1.
    size_t structural = 0;
    g.for_each_edge([&](int, int, uint8_t labels) {
      if (labels & kEdgeStructural) ++structural;
    });
    CHECK(structural == 6u * 3u);  // 6 docs of 4 passages
  }
}

TEST_CASE("build_graph is permutation-equivariant") {
  std::mt19937 rng(41);
  auto passages = gopret::test::plain_passages(12, /*doc_len=*/3);
  std::uniform_int_distribution<int> kw(0, 4);
  for (auto& p : passages) p.keywords.insert("k" + std::to_string(kw(rng)));
  const auto g = GraphOfPassages::build(passages);

  std::vector<int> perm(passages.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  auto relabeled = passages;
  for (size_t i = 0; i < passages.size(); ++i) relabeled[i].id = perm[i];
  const auto g2 = GraphOfPassages::build(relabeled);

  REQUIRE(g2.node_count() == g.node_count());
  g.for_each_edge([&](int u, int v, uint8_t labels) {
    CHECK(g2.edge_labels(perm[static_cast<size_t>(u)], perm[static_cast<size_t>(v)]) ==
          labels);
  });
  CHECK(g2.edge_count() == g.edge_count());
}

TEST_CASE("graph_density exact values") {
  auto complete = gopret::test::plain_passages(3);
  for (auto& p : complete) p.keywords = {"shared"};
  CHECK(graph_density(GraphOfPassages::build(complete)) == doctest::Approx(1.0));

  const auto empty = GraphOfPassages::build(gopret::test::plain_passages(3));
  CHECK(graph_density(empty) == doctest::Approx(0.0));

  CHECK_THROWS_AS(graph_density(GraphOfPassages::build(gopret::test::plain_passages(1))),
                  Error);
}

TEST_CASE("save/load round-trips the path graph") {
  TempDir tmp("graph-roundtrip");
  auto passages = gopret::test::plain_passages(3, /*doc_len=*/3);
  passages[0].keywords = {"x"};
  passages[2].keywords = {"x"};
  const auto g = GraphOfPassages::build(passages);
  save_graph(g, tmp / "g.jsonl");
  const auto loaded = load_graph(tmp / "g.jsonl");

  REQUIRE(loaded.node_count() == g.node_count());
  REQUIRE(loaded.edge_count() == g.edge_count());
  g.for_each_edge([&](int u, int v, uint8_t labels) {
    CHECK(loaded.edge_labels(u, v) == labels);
  });
  for (size_t i = 0; i < g.node_count(); ++i) {
    CHECK(loaded.passage(static_cast<int>(i)).doc_id == g.passage(static_cast<int>(i)).doc_id);
    CHECK(loaded.passage(static_cast<int>(i)).keywords == g.passage(static_cast<int>(i)).keywords);
    CHECK(loaded.passage(static_cast<int>(i)).token_count ==
          g.passage(static_cast<int>(i)).token_count);
  }
}

TEST_CASE("load_graph rejects an out-of-order edge record") {
  TempDir tmp("graph-asym");
  gopret::test::write_all(
      tmp / "bad.jsonl",
      R"({"version":1,"node_count":2,"edge_count":1,"source_checksum":""})"
      "\n"
      R"({"id":0,"doc_id":"d","seq_index":0,"token_count":1,"keywords":[]})"
      "\n"
      R"({"id":1,"doc_id":"d","seq_index":1,"token_count":1,"keywords":[]})"
      "\n"
      R"({"u":1,"v":0,"labels":["structural"]})"
      "\n");
  CHECK_THROWS_WITH_AS(load_graph(tmp / "bad.jsonl"),
                       doctest::Contains("u < v"), Error);
}

TEST_CASE("load_graph names the position of a truncation") {
  TempDir tmp("graph-trunc");
  auto passages = gopret::test::plain_passages(4, /*doc_len=*/4);
  const auto g = GraphOfPassages::build(passages);
  save_graph(g, tmp / "g.jsonl");

  // Drop the final record.
  std::string contents = gopret::test::read_all(tmp / "g.jsonl");
  contents.erase(contents.find_last_of('\n', contents.size() - 2) + 1);
  gopret::test::write_all(tmp / "g.jsonl", contents);

  CHECK_THROWS_WITH_AS(load_graph(tmp / "g.jsonl"),
                       doctest::Contains("truncated"), Error);
}

TEST_CASE("load_graph rejects a structural edge between unrelated passages") {
  TempDir tmp("graph-badstruct");
  gopret::test::write_all(
      tmp / "bad.jsonl",
      R"({"version":1,"node_count":2,"edge_count":1,"source_checksum":""})"
      "\n"
      R"({"id":0,"doc_id":"a","seq_index":0,"token_count":1,"keywords":[]})"
      "\n"
      R"({"id":1,"doc_id":"b","seq_index":0,"token_count":1,"keywords":[]})"
      "\n"
      R"({"u":0,"v":1,"labels":["structural"]})"
      "\n");
  CHECK_THROWS_AS(load_graph(tmp / "bad.jsonl"), Error);
}

TEST_CASE("load_graph rejects an unknown version") {
  TempDir tmp("graph-version");
  gopret::test::write_all(tmp / "bad.jsonl",
                          R"({"version":99,"node_count":0,"edge_count":0})"
                          "\n");
  CHECK_THROWS_AS(load_graph(tmp / "bad.jsonl"), Error);
}

TEST_CASE("load_corpus_dir reads txt and jsonl documents") {
  TempDir tmp("corpus-dir");
  gopret::test::write_all(tmp / "zebra.txt", "a plain text body");
  gopret::test::write_all(
      tmp / "docs.jsonl",
      R"({"id":"w1","title":"One","body":"first body"})"
      "\n"
      R"({"id":"w2","title":"Two","body":"second body","source_uri":"u"})"
      "\n");
  const auto docs = load_corpus_dir(tmp.path());
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].id == "w1");
  CHECK(docs[1].source_uri == "u");
  CHECK(docs[2].id == "zebra");
  CHECK(docs[2].body == "a plain text body");
}

TEST_CASE("load_corpus_dir rejects an empty directory") {
  TempDir tmp("corpus-empty");
  CHECK_THROWS_AS(load_corpus_dir(tmp.path()), Error);
}
