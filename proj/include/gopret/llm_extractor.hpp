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

#include <string>
#include <vector>

#include "gopret/corpus.hpp"
#include "gopret/llm.hpp"

namespace gopret {

// Prompts the model to list entities with wiki links and canonicalizes
// the links. A malformed reply yields the empty set and a recorded
// warning; transport failures propagate as retryable TransportError.
class LlmKeywordExtractor final : public KeywordExtractor {
 public:
  explicit LlmKeywordExtractor(LlmClient& client) : client_(client) {}

  std::set<std::string> extract(std::string_view text,
                                std::string_view doc_title) const override;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  LlmClient& client_;
  mutable std::vector<std::string> warnings_;
};

}  // namespace gopret
