#pragma once

#include <stdexcept>

namespace lfpe {

// Every particle received zero likelihood for a datum, so the posterior mass
// vanished and the weight update is undefined.
struct ZeroPosteriorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The resampling covariance could not be Cholesky-factorized even after
// symmetrization and diagonal jitter.
struct DegenerateCovarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fisher information is undefined where the outcome distribution is
// deterministic (click probability 0 or 1).
struct SingularInformationError : std::domain_error {
  using std::domain_error::domain_error;
};

// An adaptive estimator was configured with no sample budget.
struct BudgetExhaustedError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace lfpe
