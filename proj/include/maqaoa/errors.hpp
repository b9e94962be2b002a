#pragma once

#include <stdexcept>
#include <string>

namespace maqaoa {

/// Malformed edge-list or configuration text. Carries the 1-based line number
/// when one applies (0 otherwise).
class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          m_line(line) {}

    std::size_t line() const noexcept { return m_line; }

  private:
    std::size_t m_line;
};

/// Argument outside the domain an operation is defined on.
class DomainError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A random generator could not produce a graph with the requested properties.
class GenerationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Request exceeds a configured size limit (qubits, exhaustive search, ...).
class ResourceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Ansatz and backend cannot be combined for the given graph.
class BackendError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// File-system failure; the message names the path.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace maqaoa
