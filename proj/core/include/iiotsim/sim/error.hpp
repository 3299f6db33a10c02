#pragma once

#include <stdexcept>
#include <string>

namespace iiotsim {

// Contract violations and unknown-reference errors. Expected domain
// outcomes (a rejected admission, a denied flow) are plain return values,
// not exceptions.
enum class Errc {
  PastDue,
  InvalidRange,
  DuplicateId,
  PortOccupied,
  UnknownEndpoint,
  UnknownNode,
  UnknownLink,
  UnknownSwitch,
  UnknownSegment,
  UnknownReservation,
  UnknownPrincipal,
  UnknownInstance,
  UnknownFlow,
  UnauthorizedController,
  DuplicateRuleId,
  DuplicateApp,
  NoCapacity,
  NoParent,
  SessionExpired,
  IncompleteTrace,
  ParseError,
  ValidationError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

} // namespace iiotsim
