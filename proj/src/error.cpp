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

#include "gopret/error.hpp"

namespace gopret {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "E_INVALID_INPUT";
    case ErrorCode::MissingEmbedding: return "E_MISSING_EMBEDDING";
    case ErrorCode::DimensionMismatch: return "E_DIMENSION_MISMATCH";
    case ErrorCode::Transport: return "E_TRANSPORT";
    case ErrorCode::Format: return "E_FORMAT";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::VersionMismatch: return "E_VERSION_MISMATCH";
    case ErrorCode::Config: return "E_CONFIG";
    case ErrorCode::DegenerateExample: return "E_DEGENERATE_EXAMPLE";
    case ErrorCode::StaleArtifact: return "E_STALE_ARTIFACT";
    case ErrorCode::Locked: return "E_LOCKED";
    case ErrorCode::LlmFormat: return "E_LLM_FORMAT";
  }
  return "E_UNKNOWN";
}

}  // namespace gopret
