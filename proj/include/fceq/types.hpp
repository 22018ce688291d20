#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace fceq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Numeric policy shared across the library. All cutoffs are relative and
/// get scaled by local magnitudes at the point of use.
struct TolerancePolicy {
    double rank_rel_tol = 1e-10;  ///< singular-value cutoff, relative to the largest
    double residual_tol = 1e-6;   ///< accept/reject band for normalized CEQ residuals
    double contact_tol = 1e-9;    ///< contact classification and shift-regularity band
};

enum class ErrorCode {
    EVAL_DOMAIN,
    SPEC_INVALID,
    SHIFT_SINGULAR,
    PIVOT_LOST,
    VERTICAL_CONTACT,
    RANK_ANOMALY,
    NOT_CONVEX,
    CONFIG_INVALID,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Index payload for errors tied to a coordinate direction (e.g. which
    /// shifted point lost the pivot). -1 when not applicable.
    int index = -1;

private:
    ErrorCode code_;
};

inline Error error_at(ErrorCode code, const std::string& what, int index) {
    Error e(code, what);
    e.index = index;
    return e;
}

}  // namespace fceq
