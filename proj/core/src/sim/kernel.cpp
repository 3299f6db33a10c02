#include "iiotsim/sim/kernel.hpp"

namespace iiotsim {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::PastDue: return "PastDue";
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::PortOccupied: return "PortOccupied";
    case Errc::UnknownEndpoint: return "UnknownEndpoint";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::UnknownLink: return "UnknownLink";
    case Errc::UnknownSwitch: return "UnknownSwitch";
    case Errc::UnknownSegment: return "UnknownSegment";
    case Errc::UnknownReservation: return "UnknownReservation";
    case Errc::UnknownPrincipal: return "UnknownPrincipal";
    case Errc::UnknownInstance: return "UnknownInstance";
    case Errc::UnknownFlow: return "UnknownFlow";
    case Errc::UnauthorizedController: return "UnauthorizedController";
    case Errc::DuplicateRuleId: return "DuplicateRuleId";
    case Errc::DuplicateApp: return "DuplicateApp";
    case Errc::NoCapacity: return "NoCapacity";
    case Errc::NoParent: return "NoParent";
    case Errc::SessionExpired: return "SessionExpired";
    case Errc::IncompleteTrace: return "IncompleteTrace";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

} // namespace iiotsim
