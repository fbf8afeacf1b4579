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

#ifndef PRONDIFF_BASE64_HPP
#define PRONDIFF_BASE64_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace prondiff::base64 {

std::string encode(const std::vector<std::uint8_t>& bytes);

/// Strict RFC 4648 decoding (padding required); throws BadPayload on any
/// character outside the alphabet.
std::vector<std::uint8_t> decode(std::string_view text);

}  // namespace prondiff::base64

#endif  // PRONDIFF_BASE64_HPP
