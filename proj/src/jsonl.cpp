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

#include "gopret/jsonl.hpp"

#include <fstream>

#include "gopret/error.hpp"

namespace gopret {

void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const nlohmann::json&, size_t)>& fn) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      throw Error(ErrorCode::Format, path.string() + ": malformed record at line " +
                                         std::to_string(line_no));
    }
    fn(record, line_no);
  }
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::vector<nlohmann::json> records;
  read_jsonl(path, [&](const nlohmann::json& r, size_t) { records.push_back(r); });
  return records;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& records) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
  for (const auto& record : records) {
    out << record.dump() << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::Io, "write failed for " + path.string());
  }
}

}  // namespace gopret
