#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gasket {

enum class ErrorKind {
  Domain,
  ResourceLimit,
  Numeric,
  Structural,
  Convergence,
  Mismatch,
  Window,
  Hypothesis,
  Separation,
  ClusterCount,
  Schema,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library. The kind lets the CLI map errors to
/// exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::ResourceLimit: return "resource-limit";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Structural: return "structural";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Mismatch: return "mismatch";
    case ErrorKind::Window: return "window";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::Separation: return "separation";
    case ErrorKind::ClusterCount: return "cluster-count";
    case ErrorKind::Schema: return "schema";
  }
  return "unknown";
}

}  // namespace gasket
