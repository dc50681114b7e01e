// Copyright 2026 The SCL Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scl {

// Root of every error raised by the toolkit. The CLI maps UsageError to exit
// code 1 and every other scl::Error to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SCL_DEFINE_ERROR(Name)          \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

// exemplar / image IO
SCL_DEFINE_ERROR(DecodeError);
SCL_DEFINE_ERROR(EncodeError);
SCL_DEFINE_ERROR(NoAlphaError);
SCL_DEFINE_ERROR(EmptyLogoError);
SCL_DEFINE_ERROR(DuplicateClassError);
SCL_DEFINE_ERROR(EmptyRegistryError);

// geometry / raster
SCL_DEFINE_ERROR(InvalidParameterError);
SCL_DEFINE_ERROR(NonPositiveScaleError);
SCL_DEFINE_ERROR(SingularShearError);
SCL_DEFINE_ERROR(SingularMapError);
SCL_DEFINE_ERROR(BackFacingError);
SCL_DEFINE_ERROR(OutOfBoundsError);

// synth
SCL_DEFINE_ERROR(DoesNotFitError);
SCL_DEFINE_ERROR(GenerationFailedError);

// dataset / eval
SCL_DEFINE_ERROR(UnknownClassError);
SCL_DEFINE_ERROR(InsufficientImagesError);
SCL_DEFINE_ERROR(MissingManifestError);
SCL_DEFINE_ERROR(ClassMismatchError);
SCL_DEFINE_ERROR(IoError);

// cli
SCL_DEFINE_ERROR(UsageError);

#undef SCL_DEFINE_ERROR

// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& message, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + message : message),
        message_(message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }
  /// The message without the line prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t line_;
};

}  // namespace scl
