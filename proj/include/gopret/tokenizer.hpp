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

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

namespace gopret {

// Byte range [begin, end) of one token within the original text.
struct TokenSpan {
  size_t begin = 0;
  size_t end = 0;
};

// Chunk limits are expressed in the units of whichever tokenizer is
// plugged in here. The default splits on ASCII whitespace, which keeps
// the whole pipeline deterministic and dependency-free.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<TokenSpan> tokenize(std::string_view text) const = 0;

  size_t count(std::string_view text) const { return tokenize(text).size(); }
};

class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::vector<TokenSpan> tokenize(std::string_view text) const override;
};

const Tokenizer& default_tokenizer();

}  // namespace gopret
