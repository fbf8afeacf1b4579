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

#ifndef PRONDIFF_ERRORS_HPP
#define PRONDIFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace prondiff {

// Base class for every error raised by this library. `kind()` is a stable
// machine-readable tag; the CLI maps it to an exit code and a structured
// stderr diagnostic.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define PRONDIFF_DEFINE_ERROR(NAME)                       \
  class NAME : public Error {                             \
   public:                                                \
    explicit NAME(const std::string& message)             \
        : Error(#NAME, message) {}                        \
  }

// textgrid
PRONDIFF_DEFINE_ERROR(MalformedTextGrid);
PRONDIFF_DEFINE_ERROR(TierNotFound);
PRONDIFF_DEFINE_ERROR(WordSequenceMismatch);

// audio
PRONDIFF_DEFINE_ERROR(UnsupportedFormat);
PRONDIFF_DEFINE_ERROR(CorruptContainer);
PRONDIFF_DEFINE_ERROR(EmptyBuffer);
PRONDIFF_DEFINE_ERROR(SpanOutOfRange);
PRONDIFF_DEFINE_ERROR(InvalidRate);

// mfcc
PRONDIFF_DEFINE_ERROR(BufferTooShort);
PRONDIFF_DEFINE_ERROR(InvalidConfig);

// dtw
PRONDIFF_DEFINE_ERROR(EmptyMatrix);

// distance
PRONDIFF_DEFINE_ERROR(ZeroPeak);

// calibration
PRONDIFF_DEFINE_ERROR(EmptyPool);
PRONDIFF_DEFINE_ERROR(DegeneratePool);
PRONDIFF_DEFINE_ERROR(MalformedModel);

// detector
PRONDIFF_DEFINE_ERROR(MissingClassPools);
PRONDIFF_DEFINE_ERROR(MissingKde);

// metrics
PRONDIFF_DEFINE_ERROR(EmptyInput);
PRONDIFF_DEFINE_ERROR(EmptyGroup);

// clone provider
PRONDIFF_DEFINE_ERROR(CloneNotFound);
PRONDIFF_DEFINE_ERROR(Timeout);
PRONDIFF_DEFINE_ERROR(BadPayload);

// manifest / cli
PRONDIFF_DEFINE_ERROR(MalformedManifest);
PRONDIFF_DEFINE_ERROR(UsageError);

#undef PRONDIFF_DEFINE_ERROR

// Remote failures keep the HTTP status and response body so callers can
// distinguish retryable conditions from client errors.
class RemoteError : public Error {
 public:
  RemoteError(int status, const std::string& body)
      : Error("RemoteError",
              "remote service returned status " + std::to_string(status)),
        status_(status),
        body_(body) {}
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};

}  // namespace prondiff

#endif  // PRONDIFF_ERRORS_HPP
