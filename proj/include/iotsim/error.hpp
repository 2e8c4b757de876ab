#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iotsim {

enum class Errc {
  PastTime,
  HandlerFailure,
  UnknownEntity,
  OutOfRange,
  EmptyDataset,
  DepletedNode,
  NoForwardTarget,
  DeadTarget,
  UnknownServiceType,
  DuplicateRound,
  EmptyInput,
  MissingFile,
  BadHeader,
  NonNumericValue,
  IoFailure,
  UnknownPreset,
  InvalidScenario,
};

std::string_view to_string(Errc code);

/// Every failure the library reports carries one of the codes above so callers
/// (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace iotsim
