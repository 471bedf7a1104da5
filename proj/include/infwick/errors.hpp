#pragma once

#include <stdexcept>
#include <string>

namespace infwick {

// Enumeration or scan request above the configured cap.
class SizeLimitError : public std::length_error {
 public:
  explicit SizeLimitError(const std::string& what) : std::length_error(what) {}
};

// A moment or cumulant table is missing an entry the recursion needs.
class IncompleteTableError : public std::runtime_error {
 public:
  explicit IncompleteTableError(const std::string& what) : std::runtime_error(what) {}
};

// The restricted exponent is undefined because the admissible count is zero.
class UndefinedExponentError : public std::domain_error {
 public:
  explicit UndefinedExponentError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace infwick
