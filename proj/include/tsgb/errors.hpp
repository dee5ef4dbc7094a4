#pragma once

#include <stdexcept>
#include <string>

namespace tsgb {

// Error categories; every failure path carries one of these so the CLI can
// emit a machine-parsable tag and tests can assert on the exact cause.
enum class Errc {
  EmptyScale,
  NonMonotone,
  BadSpec,
  PointNotInScale,
  ReversedRange,
  NotInKappa,
  NotRegressive,
  NotRefinable,
  NonFinite,
  SyntaxError,
  UnknownIdentifier,
  EvalFault,
  DomainExceeded,
  NonpositiveInput,
  IntegrandFault,
  NonpositiveZeta,
  WrongScaleKind,
  NonmonotoneR,
  CertificateFail,
  BadInstance,
  Overflow,
  EnvelopeViolated,
  HypothesisViolated,
  GeneratorExhausted,
  BadScenario,
};

const char* errc_tag(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_tag(code)) + ": " + msg),
        code_(code) {}
  Errc code() const { return code_; }
  const char* tag() const { return errc_tag(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace tsgb
