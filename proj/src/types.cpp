// Copyright 2026 The prondiff Authors
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

#include "prondiff/types.hpp"

#include "prondiff/errors.hpp"

namespace prondiff {

std::string_view to_string(PoolLabel label) {
  return label == PoolLabel::Correct ? "correct" : "incorrect";
}

PoolLabel pool_label_from_string(std::string_view s) {
  if (s == "correct") return PoolLabel::Correct;
  if (s == "incorrect") return PoolLabel::Incorrect;
  throw UsageError("unknown label '" + std::string(s) + "' (expected correct|incorrect)");
}

}  // namespace prondiff
