// ============================================================================
// stratsynth/errors.hpp — error hierarchy
// ============================================================================

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stratsynth {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed strategy text or instance text.
class SyntaxError : public Error {
  public:
    SyntaxError(std::size_t position, std::string expected)
        : Error("syntax error at offset " + std::to_string(position) + ": expected " + expected),
          position_(position),
          expected_(std::move(expected)) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }

  private:
    std::size_t position_;
    std::string expected_;
};

// A tactic/probe/parameter name that is not in the active catalog.
class UnknownSymbolError : public Error {
  public:
    explicit UnknownSymbolError(std::string name)
        : Error("unknown symbol: " + name), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

  private:
    std::string name_;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

// The configured solver command cannot be run.
class BackendUnavailableError : public Error {
  public:
    using Error::Error;
};

// An append would overwrite an existing cache entry with different data.
class CacheConflictError : public Error {
  public:
    using Error::Error;
};

class MissingRecordError : public Error {
  public:
    MissingRecordError(const std::string& strategy_key, const std::string& instance_id)
        : Error("no cached record for strategy " + strategy_key + " on instance " + instance_id) {}
};

class MissingFeatureError : public Error {
  public:
    explicit MissingFeatureError(const std::string& probe)
        : Error("feature map does not cover probe " + probe) {}
};

// MDP misuse.
class TerminalStateError : public Error {
  public:
    TerminalStateError() : Error("state is terminal: no legal actions") {}
};

class IllegalActionError : public Error {
  public:
    explicit IllegalActionError(const std::string& action)
        : Error("action is not legal in this state: " + action) {}
};

class NotTerminalError : public Error {
  public:
    NotTerminalError() : Error("state is not terminal") {}
};

// A rollout failed to terminate within the configured cap.
class RolloutOverflowError : public Error {
  public:
    explicit RolloutOverflowError(int cap)
        : Error("rollout exceeded " + std::to_string(cap) + " steps without reaching a terminal state") {}
};

class EmptySetError : public Error {
  public:
    EmptySetError() : Error("empty record set") {}
};

// Wraps an evaluation failure together with the offending strategy.
class EvalError : public Error {
  public:
    EvalError(const std::string& what, std::string strategy_text)
        : Error(what + " [strategy: " + strategy_text + "]"),
          strategy_text_(std::move(strategy_text)) {}

    const std::string& strategy_text() const noexcept { return strategy_text_; }

  private:
    std::string strategy_text_;
};

}  // namespace stratsynth
