/**
 * @file error.hpp
 * @brief Exception types shared by every tunesmith module.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tunesmith {

enum class Errc {
  parse,
  empty_lexicon,
  non_lexical_token,
  invalid_argument,
  config,
  training,
  plan,
  alignment,
  skipped,
  transport_timeout,
  transport_protocol,
  transport_closed,
  model,
  unsatisfiable,
  io,
  stage,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::parse: return "parse error";
    case Errc::empty_lexicon: return "empty lexicon";
    case Errc::non_lexical_token: return "non-lexical token";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::config: return "config error";
    case Errc::training: return "training error";
    case Errc::plan: return "plan error";
    case Errc::alignment: return "alignment error";
    case Errc::skipped: return "skipped";
    case Errc::transport_timeout: return "transport timeout";
    case Errc::transport_protocol: return "protocol error";
    case Errc::transport_closed: return "transport closed";
    case Errc::model: return "model error";
    case Errc::unsatisfiable: return "unsatisfiable constraints";
    case Errc::io: return "io error";
    case Errc::stage: return "stage error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Failure talking to an external scorer. Never raised for model-side errors.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Every beam dead-ended. Carries the furthest position any hypothesis reached.
class UnsatisfiableError : public Error {
 public:
  UnsatisfiableError(std::size_t phrase, std::size_t slot)
      : Error(Errc::unsatisfiable, "no hypothesis got past phrase " + std::to_string(phrase) +
                                       ", slot " + std::to_string(slot)),
        phrase_(phrase),
        slot_(slot) {}

  std::size_t phrase() const noexcept { return phrase_; }
  std::size_t slot() const noexcept { return slot_; }

 private:
  std::size_t phrase_;
  std::size_t slot_;
};

}  // namespace tunesmith
