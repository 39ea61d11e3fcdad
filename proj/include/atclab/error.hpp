#pragma once

#include <stdexcept>
#include <string>

namespace atclab {

// A vector whose Euclidean norm is below the zero threshold; signals a
// degenerate embedding.
struct ZeroVectorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BatchTooSmallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed text input. line is 1-based; the header counts as line 1.
struct ParseError : std::runtime_error {
  ParseError(int line_no, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + message),
        line(line_no) {}
  int line;
};

}  // namespace atclab
