#pragma once
#include <stdexcept>
#include <string>

namespace newform {

// One type per named failure; what() carries the detail.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define NEWFORM_ERROR(Name)                                              \
  struct Name : Error {                                                  \
    using Error::Error;                                                  \
    const char* kind() const noexcept override { return #Name; }         \
  };

NEWFORM_ERROR(NonPrimeCharacteristic)
NEWFORM_ERROR(ReduciblePolynomial)
NEWFORM_ERROR(SearchBudgetExceeded)
NEWFORM_ERROR(EnumerationBoundExceeded)
NEWFORM_ERROR(SingularMatrix)
NEWFORM_ERROR(EigenspaceSplitFailure)
NEWFORM_ERROR(InconsistentOrthogonality)
NEWFORM_ERROR(NonRegularTheta)
NEWFORM_ERROR(NotAGroup)
NEWFORM_ERROR(NonInvertibleOrder)
NEWFORM_ERROR(NotCuspidal)
NEWFORM_ERROR(ProjectionRankMismatch)
NEWFORM_ERROR(NotIntegral)
NEWFORM_ERROR(WindowOverflow)
NEWFORM_ERROR(NotMonomial)
NEWFORM_ERROR(UnknownFamily)
NEWFORM_ERROR(PartitionFailure)
NEWFORM_ERROR(WitnessConjugationFailure)
NEWFORM_ERROR(NotASubgroup)
NEWFORM_ERROR(VerificationFailure)
NEWFORM_ERROR(NotInFiltration)
NEWFORM_ERROR(CounterexampleFound)
NEWFORM_ERROR(FactorizationFailure)
NEWFORM_ERROR(ReducibleResiduePolynomial)
NEWFORM_ERROR(EvenM)
NEWFORM_ERROR(MixedModeUnsupported)
NEWFORM_ERROR(InvalidArgument)

#undef NEWFORM_ERROR

}  // namespace newform
