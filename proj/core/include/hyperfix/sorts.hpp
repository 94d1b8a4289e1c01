#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hyperfix {

enum class Sort : uint8_t { Int, Bool, String };

inline const char* to_string(Sort s) {
  switch (s) {
    case Sort::Int: return "Int";
    case Sort::Bool: return "Bool";
    case Sort::String: return "String";
  }
  return "?";
}

inline Sort sort_from_string(const std::string& s) {
  if (s == "Int" || s == "int") return Sort::Int;
  if (s == "Bool" || s == "bool") return Sort::Bool;
  if (s == "String" || s == "string") return Sort::String;
  throw std::invalid_argument("unknown sort: " + s);
}

/// Error carrying a source position, thrown by both parsers and the sort checker.
struct DiagnosticError : std::runtime_error {
  int line = 0, col = 0;
  DiagnosticError(const std::string& msg, int line_ = 0, int col_ = 0)
      : std::runtime_error(line_ ? (std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg)
                                 : msg),
        line(line_), col(col_) {}
};

}  // namespace hyperfix
