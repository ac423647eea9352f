#pragma once

#include <stdexcept>
#include <string>

namespace ecdiv {

enum class ErrorKind {
  invalid_dimension,
  invalid_distribution,
  invalid_parameter,
  invalid_input,
  model_construction,
  config,
  backend,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ecdiv
