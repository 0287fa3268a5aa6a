#pragma once

#include <stdexcept>
#include <string>

namespace sftlab {

// Library error codes. The CLI maps ParseError/usage problems to exit code 2;
// everything else surfaces as a diagnostic on stderr.
enum class Errc {
  MalformedElement,
  InsufficientWindow,
  UnsupportedGroup,
  UnsupportedPresentation,
  NoMetric,
  NotAPermutation,
  NotACover,
  PartitionRequired,
  RefinementError,
  AmbiguousReconstruction,
  PrecisionError,
  NotApplicable,
  UnresolvedRef,
  ParseError,
  Inconsistency,   // a verified identity failed; always build-stopping
  Internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc c, const std::string& what)
      : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

inline void require(bool ok, Errc c, const std::string& msg) {
  if (!ok) fail(c, msg);
}

}  // namespace sftlab
