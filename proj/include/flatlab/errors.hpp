#pragma once

#include <stdexcept>
#include <string>

namespace flatlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define FLATLAB_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

FLATLAB_DEFINE_ERROR(InvalidArgument);
FLATLAB_DEFINE_ERROR(EmptyWindow);
FLATLAB_DEFINE_ERROR(NoConvergence);
FLATLAB_DEFINE_ERROR(InsufficientResolution);
FLATLAB_DEFINE_ERROR(DegenerateDirection);
FLATLAB_DEFINE_ERROR(DomainViolation);
FLATLAB_DEFINE_ERROR(QuadratureFailure);
FLATLAB_DEFINE_ERROR(DimensionMismatch);
FLATLAB_DEFINE_ERROR(OriginSingularity);
FLATLAB_DEFINE_ERROR(NonConvergence);
FLATLAB_DEFINE_ERROR(GraphicalityLoss);
FLATLAB_DEFINE_ERROR(NoReversal);
FLATLAB_DEFINE_ERROR(SlabViolation);
FLATLAB_DEFINE_ERROR(AmbiguousSheets);
FLATLAB_DEFINE_ERROR(InsufficientAnnuli);
FLATLAB_DEFINE_ERROR(IllConditioned);
FLATLAB_DEFINE_ERROR(FormatError);
FLATLAB_DEFINE_ERROR(ConfigError);

#undef FLATLAB_DEFINE_ERROR

/// Raised when a field exceeds max(t^{4-n-alpha}, t^{1+alpha}) at some node.
class PsiViolation : public Error {
public:
    PsiViolation(double radius, double value, double bound);
    double radius() const noexcept { return radius_; }

private:
    double radius_;
};

/// Config-file syntax error; line is 1-based.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& what);
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace flatlab
