#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlac {

/// Failure categories raised by the numerical kernels. The CLI maps them onto
/// exit codes (config problems -> 2, numerical breakdowns -> 3).
enum class ErrorKind {
  NotBistable,
  Unbalanced,
  DeltaTooLarge,
  StiffnessFailure,
  QuadratureSingular,
  FredholmViolation,
  IllConditioned,
  BadInterface,
  Diverged,
  LinearSolveFailed,
  EmptyContour,
  InterfaceVanished,
  Extinction,
  NoAdmissibleK,
  FlowFailure,
  OutOfTable,
  NeverGenerated,
  ConfigInvalid,
  SchemaMismatch,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nlac
