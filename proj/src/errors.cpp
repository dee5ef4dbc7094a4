#include "tsgb/errors.hpp"

namespace tsgb {

const char* errc_tag(Errc c) {
  switch (c) {
    case Errc::EmptyScale: return "EmptyScale";
    case Errc::NonMonotone: return "NonMonotone";
    case Errc::BadSpec: return "BadSpec";
    case Errc::PointNotInScale: return "PointNotInScale";
    case Errc::ReversedRange: return "ReversedRange";
    case Errc::NotInKappa: return "NotInKappa";
    case Errc::NotRegressive: return "NotRegressive";
    case Errc::NotRefinable: return "NotRefinable";
    case Errc::NonFinite: return "NonFinite";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownIdentifier: return "UnknownIdentifier";
    case Errc::EvalFault: return "EvalFault";
    case Errc::DomainExceeded: return "DomainExceeded";
    case Errc::NonpositiveInput: return "NonpositiveInput";
    case Errc::IntegrandFault: return "IntegrandFault";
    case Errc::NonpositiveZeta: return "NonpositiveZeta";
    case Errc::WrongScaleKind: return "WrongScaleKind";
    case Errc::NonmonotoneR: return "NonmonotoneR";
    case Errc::CertificateFail: return "CertificateFail";
    case Errc::BadInstance: return "BadInstance";
    case Errc::Overflow: return "Overflow";
    case Errc::EnvelopeViolated: return "EnvelopeViolated";
    case Errc::HypothesisViolated: return "HypothesisViolated";
    case Errc::GeneratorExhausted: return "GeneratorExhausted";
    case Errc::BadScenario: return "BadScenario";
  }
  return "Unknown";
}

}  // namespace tsgb
