// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace drforge {

// All library errors derive from Error so callers (the CLI in particular) can
// report a stable category name next to the message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
};

#define DRFORGE_ERROR_TYPE(Name, tag)                          \
  class Name : public Error {                                  \
   public:                                                     \
    using Error::Error;                                        \
    const char* category() const noexcept override { return tag; } \
  };

DRFORGE_ERROR_TYPE(DomainError, "domain")
DRFORGE_ERROR_TYPE(InvalidRadianceError, "invalid_radiance")
DRFORGE_ERROR_TYPE(IndexError, "index")
DRFORGE_ERROR_TYPE(FormatError, "format")
DRFORGE_ERROR_TYPE(IoError, "io")
DRFORGE_ERROR_TYPE(ValidationError, "validation")
DRFORGE_ERROR_TYPE(GenerationError, "generation")

#undef DRFORGE_ERROR_TYPE

}  // namespace drforge
