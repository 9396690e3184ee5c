#pragma once

#include <stdexcept>
#include <string>

namespace lpfda {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define LPFDA_ERROR_TYPE(Name)              \
    struct Name : Error {                   \
        using Error::Error;                 \
    };

LPFDA_ERROR_TYPE(SingularMoments)        // kernel moment matrix numerically singular
LPFDA_ERROR_TYPE(NotAvailable)           // model lacks the requested regularity
LPFDA_ERROR_TYPE(NotPsd)                 // covariance factorization failed at maximal jitter
LPFDA_ERROR_TYPE(BadDensity)             // sampling density nonpositive on the mesh
LPFDA_ERROR_TYPE(VanishingDerivative)    // m^(p+1) vanishes where it must not
LPFDA_ERROR_TYPE(WrongParity)            // operation requires p - nu even
LPFDA_ERROR_TYPE(RankDeficient)          // local normal matrix ill conditioned
LPFDA_ERROR_TYPE(BandwidthTooSmall)      // fewer than p+1 points under the kernel window
LPFDA_ERROR_TYPE(ZeroCurvature)          // required regression derivative vanishes
LPFDA_ERROR_TYPE(AlphaZero)              // covariance jump is zero, smooth-route formulas apply
LPFDA_ERROR_TYPE(OptimalDensityInUse)    // second-order bias vanishes, no optimum available
LPFDA_ERROR_TYPE(NotOptimizable)         // sign condition on diagonal partials fails
LPFDA_ERROR_TYPE(AllCandidatesInfeasible)// every bandwidth candidate failed
LPFDA_ERROR_TYPE(ConditionViolated)      // bandwidth decay condition fails at given (n, h)
LPFDA_ERROR_TYPE(UnknownId)              // unrecognized catalog identifier
LPFDA_ERROR_TYPE(IoError)                // file input/output failure

#undef LPFDA_ERROR_TYPE

}  // namespace lpfda
