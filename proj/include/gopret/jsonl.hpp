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

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gopret {

// Line-delimited JSON files. All on-disk artifacts (graph, index, params,
// traces, training sets) use this shape so that a failed parse can name
// the offending record.

// Reads every line of `path` as a JSON object and calls `fn(record, line_no)`
// with 1-based line numbers. Blank lines are skipped. Throws Error{Format}
// naming the line on parse failure, Error{Io} if the file cannot be opened.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const nlohmann::json&, size_t)>& fn);

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

// Writes one compact JSON object per line. Overwrites `path`.
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& records);

}  // namespace gopret
