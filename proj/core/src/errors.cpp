#include "dthsem/errors.hpp"

#include <utility>

namespace dth {

EvaluationError::EvaluationError(const std::string& what, Eigen::VectorXd z)
    : Error(what), state_(std::move(z)) {}

NonconvergenceError::NonconvergenceError(const std::string& what, double residual,
                                         int iterations)
    : Error(what), residual_(residual), iterations_(iterations) {}

LinearSolveError::LinearSolveError(const std::string& what, double rcond)
    : Error(what), rcond_(rcond) {}

StepNonexistenceError::StepNonexistenceError(const std::string& what, std::string verdict)
    : Error(what + " [" + verdict + "]"), verdict_(std::move(verdict)) {}

}  // namespace dth
