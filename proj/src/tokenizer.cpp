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

#include "gopret/tokenizer.hpp"

#include <cctype>

namespace gopret {

namespace {
bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}
}  // namespace

std::vector<TokenSpan> WhitespaceTokenizer::tokenize(std::string_view text) const {
  std::vector<TokenSpan> spans;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i >= n) break;
    size_t begin = i;
    while (i < n && !is_space(text[i])) ++i;
    spans.push_back({begin, i});
  }
  return spans;
}

const Tokenizer& default_tokenizer() {
  static const WhitespaceTokenizer instance;
  return instance;
}

}  // namespace gopret
