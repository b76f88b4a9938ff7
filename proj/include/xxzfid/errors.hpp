#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xxzfid {

// Errors carry a stable machine-readable code and whether they represent
// a validation problem (bad input) or a numerical failure.
enum class ErrorClass { validation, numerical };

class Error : public std::runtime_error {
 public:
  Error(std::string_view code, ErrorClass cls, const std::string& what)
      : std::runtime_error(what), code_(code), class_(cls) {}

  std::string_view code() const noexcept { return code_; }
  ErrorClass error_class() const noexcept { return class_; }

 private:
  std::string_view code_;
  ErrorClass class_;
};

class InvalidSpec : public Error {
 public:
  explicit InvalidSpec(const std::string& what)
      : Error("invalid_spec", ErrorClass::validation, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error("domain_error", ErrorClass::validation, what) {}
};

class SizeLimit : public Error {
 public:
  explicit SizeLimit(const std::string& what)
      : Error("size_limit", ErrorClass::validation, what) {}
};

class NonConvergent : public Error {
 public:
  explicit NonConvergent(const std::string& what)
      : Error("non_convergent", ErrorClass::numerical, what) {}

 protected:
  NonConvergent(std::string_view code, const std::string& what)
      : Error(code, ErrorClass::numerical, what) {}
};

// Eigensolver-specific flavour of NonConvergent.
class NoConvergence : public NonConvergent {
 public:
  explicit NoConvergence(const std::string& what)
      : NonConvergent("no_convergence", what) {}
};

class Underflow : public Error {
 public:
  explicit Underflow(const std::string& what)
      : Error("underflow", ErrorClass::numerical, what) {}
};

class SingularSystem : public Error {
 public:
  explicit SingularSystem(const std::string& what)
      : Error("singular_system", ErrorClass::numerical, what) {}
};

class SectorMismatch : public Error {
 public:
  explicit SectorMismatch(const std::string& what)
      : Error("sector_mismatch", ErrorClass::numerical, what) {}
};

}  // namespace xxzfid
