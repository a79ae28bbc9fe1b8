#include "flatlab/errors.hpp"

#include <sstream>

namespace flatlab {

namespace {

std::string psi_message(double radius, double value, double bound)
{
    std::ostringstream os;
    os.precision(17);
    os << "PsiViolation: |v| = " << value << " exceeds psi = " << bound << " at radius " << radius;
    return os.str();
}

}  // namespace

PsiViolation::PsiViolation(double radius, double value, double bound)
    : Error(psi_message(radius, value, bound)), radius_(radius)
{
}

ParseError::ParseError(int line, const std::string& what)
    : Error("ParseError: line " + std::to_string(line) + ": " + what), line_(line)
{
}

}  // namespace flatlab
