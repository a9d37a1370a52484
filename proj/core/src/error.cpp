#include "rrrt/error.hpp"

namespace rrrt {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::PastTime: return "PastTime";
    case Errc::UnknownLink: return "UnknownLink";
    case Errc::UnknownTarget: return "UnknownTarget";
    case Errc::NoRoute: return "NoRoute";
    case Errc::InvalidTarget: return "InvalidTarget";
    case Errc::InconsistentStats: return "InconsistentStats";
    case Errc::DegenerateProbe: return "DegenerateProbe";
    case Errc::DeadlineExpired: return "DeadlineExpired";
    case Errc::NoDeliveries: return "NoDeliveries";
    case Errc::UnknownParameter: return "UnknownParameter";
    case Errc::Validation: return "Validation";
    case Errc::Io: return "Io";
    case Errc::Corrupt: return "Corrupt";
    case Errc::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace rrrt
