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

#include "gopret/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace gopret {

std::string normalize_answer(std::string_view text) {
  std::string spaced;
  spaced.reserve(text.size());
  for (char c : text) {
    const unsigned char uc = static_cast<unsigned char>(c);
    if (std::ispunct(uc)) continue;
    spaced.push_back(std::isspace(uc) ? ' ' : static_cast<char>(std::tolower(uc)));
  }
  std::istringstream iss(spaced);
  std::string token, out;
  while (iss >> token) {
    if (token == "a" || token == "an" || token == "the") continue;
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

std::vector<std::string> answer_tokens(std::string_view text) {
  std::istringstream iss(normalize_answer(text));
  std::vector<std::string> tokens;
  std::string token;
  while (iss >> token) tokens.push_back(token);
  return tokens;
}

double exact_match(std::string_view prediction, std::string_view gold) {
  return normalize_answer(prediction) == normalize_answer(gold) ? 1.0 : 0.0;
}

double token_f1(std::string_view prediction, std::string_view gold) {
  const auto pred = answer_tokens(prediction);
  const auto ref = answer_tokens(gold);
  if (pred.empty() || ref.empty()) {
    return pred.empty() && ref.empty() ? 1.0 : 0.0;
  }
  std::map<std::string, int> counts;
  for (const auto& t : ref) ++counts[t];
  int overlap = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace gopret
