#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ipl {

/// Input violates a precondition (shape mismatch, wrong ambient, bad data).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An identity that must hold by theory failed; points at a sign or formula fault.
struct ConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A homotopy equivalence whose obstruction class is nonzero cannot be extended.
struct ExtensionObstructed : std::runtime_error {
  ExtensionObstructed() : std::runtime_error("extension obstructed") {}
  explicit ExtensionObstructed(const std::string& what)
      : std::runtime_error("extension obstructed: " + what) {}
};

struct Finding {
  std::string check;
  std::string detail;
};

/// Diagnostic result of a validator. Empty means valid.
struct Report {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
  void add(std::string check, std::string detail) {
    findings.push_back({std::move(check), std::move(detail)});
  }
  void merge(const Report& other, const std::string& prefix = {}) {
    for (const auto& f : other.findings)
      findings.push_back({prefix + f.check, f.detail});
  }
  bool mentions(const std::string& check) const {
    for (const auto& f : findings)
      if (f.check == check) return true;
    return false;
  }
};

}  // namespace ipl
