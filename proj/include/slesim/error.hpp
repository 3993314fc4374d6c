#pragma once

#include <stdexcept>
#include <string>

namespace sle {

// Failure categories surfaced by the library. The CLI maps config-shaped
// failures (param/domain/format) to exit code 2 and run-shaped failures
// (resolution/starved/horizon/walker_budget) to exit code 3.
enum class Errc {
  domain,
  param,
  format,
  resolution,
  starved,
  horizon,
  walker_budget,
  dead_point,
  target_swallowed,
  degenerate,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, Errc code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace sle
