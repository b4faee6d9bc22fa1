#ifndef CONEWALK_ERROR_HPP
#define CONEWALK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cw {

enum class ErrorCode {
    Ok = 0,
    ConfigError,
    NonZeroDrift,
    DegenerateSupport,
    SingularCovariance,
    DimensionMismatch,
    PointOutsideCone,
    StartOutsideCone,
    UnsupportedTransform,
    NoClosedForm,
    SeriesNotConverged,
    FitDiverged,
    NonPositiveValue,
    EmptyGrid,
    IoError,
    InternalError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace cw

#endif
