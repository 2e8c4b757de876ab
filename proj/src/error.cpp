#include "iotsim/error.hpp"

namespace iotsim {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::PastTime: return "PastTime";
    case Errc::HandlerFailure: return "HandlerFailure";
    case Errc::UnknownEntity: return "UnknownEntity";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::DepletedNode: return "DepletedNode";
    case Errc::NoForwardTarget: return "NoForwardTarget";
    case Errc::DeadTarget: return "DeadTarget";
    case Errc::UnknownServiceType: return "UnknownServiceType";
    case Errc::DuplicateRound: return "DuplicateRound";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MissingFile: return "MissingFile";
    case Errc::BadHeader: return "BadHeader";
    case Errc::NonNumericValue: return "NonNumericValue";
    case Errc::IoFailure: return "IoFailure";
    case Errc::UnknownPreset: return "UnknownPreset";
    case Errc::InvalidScenario: return "InvalidScenario";
  }
  return "Unknown";
}

}  // namespace iotsim
