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

#include "gopret/llm_extractor.hpp"

namespace gopret {

namespace {
constexpr const char* kExtractionInstruction =
    "Instruction: Extract the entities exist in this text and then provide "
    "the wikipedia links for the entities exist in this text. Output the "
    "entities and their wikipedia links in the list format, e.g., "
    "[['entity1', 'link1'], ['entity2', 'link2']].";
}  // namespace

std::set<std::string> LlmKeywordExtractor::extract(
    std::string_view text, std::string_view /*doc_title*/) const {
  if (text.empty()) return {};
  std::string prompt = std::string(kExtractionInstruction) + "\n\n" + std::string(text);
  const std::string reply = client_.send(prompt, DecodingOptions{});
  if (auto ids = parse_keyword_reply(reply)) return *ids;
  warnings_.push_back("unparseable keyword reply: " +
                      reply.substr(0, std::min<size_t>(reply.size(), 120)));
  return {};
}

}  // namespace gopret
