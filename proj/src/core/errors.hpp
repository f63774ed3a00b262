// Error hierarchy shared by every beamsweep module. The C API maps these
// onto bs_status codes at the library boundary.
#pragma once

#include <stdexcept>
#include <string>

namespace beamsweep {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numeric argument violated its stated domain (nonpositive distance,
// bad span ordering, zero-energy reference, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Vector/matrix sizes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Placement outside the room or an otherwise impossible geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// File or stream contents could not be parsed; carries the 1-based line
// number where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// The retransmission budget was exhausted without hearing from the peer.
class PeerUnreachableError : public Error {
 public:
  using Error::Error;
};

// The peer violated the control-flow contract (e.g. QUIT before any
// receiver pass completed).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace beamsweep
