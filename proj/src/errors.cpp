#include "isobranch/errors.hpp"

#include <sstream>

namespace isobranch {

namespace {
std::string inverted_message(int element, double lambda, double det)
{
  std::ostringstream os;
  os << "inverted element " << element << " at lambda = " << lambda << " (det = " << det << ")";
  return os.str();
}
}  // namespace

InvertedElementError::InvertedElementError(int element, double lambda, double det)
    : std::runtime_error(inverted_message(element, lambda, det)), element_(element), lambda_(lambda), det_(det)
{
}

SingularMatrixError::SingularMatrixError(const std::string& what, long pivot) : std::runtime_error(what), pivot_(pivot)
{
}

ConvergenceError::ConvergenceError(const std::string& what, double residual)
    : std::runtime_error(what), residual_(residual)
{
}

}  // namespace isobranch
