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
#include <string_view>
#include <vector>

namespace gopret {

// Standard QA answer normalization: lowercase, drop punctuation and the
// articles a/an/the, collapse whitespace.
std::string normalize_answer(std::string_view text);

std::vector<std::string> answer_tokens(std::string_view text);

// 1.0 iff the normalized strings are equal.
double exact_match(std::string_view prediction, std::string_view gold);

// Token-overlap F1 over normalized tokens (multiset intersection).
double token_f1(std::string_view prediction, std::string_view gold);

}  // namespace gopret
