#ifndef NV_ERRORS_HPP
#define NV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define NV_DECLARE_ERROR(Name)                                   \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& what) : Error(what) {}  \
    }

NV_DECLARE_ERROR(InvalidArgument);
NV_DECLARE_ERROR(DomainZero);
NV_DECLARE_ERROR(BranchCut);
NV_DECLARE_ERROR(NonFiniteSymbol);
NV_DECLARE_ERROR(SupportViolation);
NV_DECLARE_ERROR(GridTooCoarse);
NV_DECLARE_ERROR(GridTooSmall);
NV_DECLARE_ERROR(NotConverged);
NV_DECLARE_ERROR(DirichletEigenvalue);
NV_DECLARE_ERROR(SolverSingular);
NV_DECLARE_ERROR(NotConductivityType);
NV_DECLARE_ERROR(NonFinite);
NV_DECLARE_ERROR(DegenerateParams);
NV_DECLARE_ERROR(SingularPoint);
NV_DECLARE_ERROR(NonPositiveSigma);
NV_DECLARE_ERROR(MatrixTooLarge);
NV_DECLARE_ERROR(IOError);

#undef NV_DECLARE_ERROR

// Thrown by the time stepper; carries the time at which the detector fired.
class BlowupDetected : public Error {
public:
    BlowupDetected(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

}  // namespace nv

#endif
