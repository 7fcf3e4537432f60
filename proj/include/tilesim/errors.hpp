#pragma once

#include <stdexcept>
#include <string>

namespace tilesim {

// Every failure the library can raise, so callers (CLI, python bindings,
// tests) can dispatch on the condition instead of parsing message text.
enum class Errc {
  NonPowerOfTwo,
  ZeroCount,
  OutOfRange,
  DuplicateProgram,
  InvalidRegister,
  ValueOutOfWidth,
  Deadlock,
  CycleLimitExceeded,
  InvalidRadix,
  NonPowerOfTwoParticipants,
  PENotInPlan,
  UnalignedSubset,
  IndivisibleSize,
  TooFewElements,
  BadSize,
  IncompleteBarrier,
  EmptyTrace,
  ZeroCycles,
  EmptyInput,
  ConfigParse,
  IoError,
};

const char* errc_name(Errc c);

class SimError : public std::runtime_error {
 public:
  SimError(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw SimError(code, msg);
}

}  // namespace tilesim
