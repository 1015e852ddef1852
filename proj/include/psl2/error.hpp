#pragma once

#include <stdexcept>
#include <string>

namespace psl2 {

enum class Fault {
    NonPositiveDeterminant,
    NonFinite,
    DeterminantDrift,
    NotHyperbolic,
    AmbiguousRegion,
    NotInImage,
    NegIdentityFiber,
    CentralInput,
    DivergentApproach,
    StepTooCoarse,
    SingularFiber,
    NoConvergence,
    ForbiddenSample,
    RelationViolated,
    NotCentral,
    NotInW,
    InterfaceNotHyperbolic,
    TargetUnreachable,
    TargetLeavesHyperbolic,
    TrackerFailure,
    WrongStartClass,
    NotInCommutatorImage,
    ClassTooHigh,
    TemplateUnsupported,
    DifferentClasses,
    ParseError,
};

const char* fault_name(Fault f);

class Error : public std::runtime_error {
public:
    Error(Fault f, const std::string& what)
        : std::runtime_error(std::string(fault_name(f)) + ": " + what), fault_(f) {}
    Fault fault() const { return fault_; }

private:
    Fault fault_;
};

}  // namespace psl2
