#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace intentgate {

// Every recoverable failure in the library throws Error with one of these
// codes. The CLI maps codes onto process exit codes via exit_code().
enum class Errc {
  config,                // invalid configuration value or malformed config file
  data,                  // malformed input data (logs, catalogs, pools, specs)
  io,                    // file not found / unreadable / unwritable
  out_of_order_event,    // event older than newest-stored minus tolerance
  empty_window,          // operation requires a non-empty behavior window
  not_applicable,        // template does not serve the requested scenario
  no_templates,          // no template applicable to the scenario
  duplicate_component,   // component already part of the prompt
  template_over_budget,  // bare template alone exceeds the budget
  prompt_over_budget,    // instantiated text cannot fit even after truncation
  generation_failed,     // generation backend unavailable or returned garbage
  parse_failure,         // judge response held fewer than three scores
  range_violation,       // judge score outside [0,1]
  insufficient_samples,  // source pool smaller than its mixing quota
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Exit code contract: 0 success, 2 config error, 3 data error,
// 4 generation backend unavailable.
inline int exit_code(Errc c) {
  switch (c) {
    case Errc::config:
      return 2;
    case Errc::generation_failed:
      return 4;
    default:
      return 3;
  }
}

[[noreturn]] inline void fail(Errc c, const std::string& msg) {
  throw Error(c, msg);
}

}  // namespace intentgate
