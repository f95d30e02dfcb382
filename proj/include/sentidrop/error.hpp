#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sentidrop {

// Typed error carrying a stable machine-readable code plus the module that
// raised it. The CLI surfaces these as {"code","module","message"} JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string module, std::string message)
      : std::runtime_error(module + "/" + code + ": " + message),
        code_(std::move(code)),
        module_(std::move(module)),
        message_(std::move(message)) {}

  const std::string& code() const { return code_; }
  const std::string& module_name() const { return module_; }
  const std::string& message() const { return message_; }

 private:
  std::string code_;
  std::string module_;
  std::string message_;
};

}  // namespace sentidrop
