#pragma once

#include <stdexcept>
#include <string>

namespace ranemu {

// Base class for every error raised by the emulator.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Structurally invalid input: truncated buffer, length-field mismatch,
// unexpected framing. Distinct from AuthenticationFailure by contract.
class MalformedPacket : public Error {
 public:
  using Error::Error;
};

// DTLS record with a version code other than 1.2.
class UnsupportedVersion : public Error {
 public:
  using Error::Error;
};

// Encoder precondition violated (oversize payload, field out of range).
class EncodingError : public Error {
 public:
  using Error::Error;
};

// Integrity check failed on otherwise well-formed input. Signals tampering.
class AuthenticationFailure : public Error {
 public:
  using Error::Error;
};

// ESP padding inconsistent after an authenticated decrypt.
class PaddingError : public Error {
 public:
  using Error::Error;
};

// Sequence number already seen or older than the replay window.
class ReplayRejected : public Error {
 public:
  using Error::Error;
};

// Wire packet carries an SPI no local SA is provisioned for.
class UnknownSpi : public Error {
 public:
  using Error::Error;
};

// A per-SA or per-entity counter reached its maximum; re-provision required.
class SequenceExhausted : public Error {
 public:
  using Error::Error;
};

// Bad argument to an operation (key length, bearer range, empty input...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Invalid scenario/topology configuration (suite not allowed on interface,
// unknown field, missing node, port in use).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Control-plane procedure did not complete in time.
class TimeoutError : public Error {
 public:
  using Error::Error;
};

// An echo or procedure aborted inside the pipeline; the message names the
// failing link.
class PipelineError : public Error {
 public:
  using Error::Error;
};

}  // namespace ranemu
