#include "tilesim/errors.hpp"

namespace tilesim {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonPowerOfTwo: return "NonPowerOfTwo";
    case Errc::ZeroCount: return "ZeroCount";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::DuplicateProgram: return "DuplicateProgram";
    case Errc::InvalidRegister: return "InvalidRegister";
    case Errc::ValueOutOfWidth: return "ValueOutOfWidth";
    case Errc::Deadlock: return "Deadlock";
    case Errc::CycleLimitExceeded: return "CycleLimitExceeded";
    case Errc::InvalidRadix: return "InvalidRadix";
    case Errc::NonPowerOfTwoParticipants: return "NonPowerOfTwoParticipants";
    case Errc::PENotInPlan: return "PENotInPlan";
    case Errc::UnalignedSubset: return "UnalignedSubset";
    case Errc::IndivisibleSize: return "IndivisibleSize";
    case Errc::TooFewElements: return "TooFewElements";
    case Errc::BadSize: return "BadSize";
    case Errc::IncompleteBarrier: return "IncompleteBarrier";
    case Errc::EmptyTrace: return "EmptyTrace";
    case Errc::ZeroCycles: return "ZeroCycles";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace tilesim
