#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arqmc {

// Integer mode keeps exact copy numbers; real mode is the normal approximation.
enum class StateMode { integer, real };

std::string to_string(StateMode mode);
StateMode parse_state_mode(const std::string& text);

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t line, std::size_t column);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

class ModelError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class NegativeStateError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace arqmc
