#pragma once

#include <stdexcept>
#include <string>

namespace metadist {

/// Input file could not be read or parsed (CLI exit code 3).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Domain, point or config violates an invariant (CLI exit code 4).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A query was routed to a signature with no training data.
struct UnseenSignatureError : std::runtime_error {
  explicit UnseenSignatureError(const std::string& what) : std::runtime_error(what) {}
};

/// Sub distance requested across different inclusion signatures.
struct CrossSignatureError : std::runtime_error {
  explicit CrossSignatureError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace metadist
