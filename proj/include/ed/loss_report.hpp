#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ed/error.hpp"

namespace ed {

/// Posterior expected loss of a candidate against the optimal estimator,
/// both evaluated on the same draw matrix.
struct LossReport {
    std::string loss_name;
    std::string rule;
    double optimal_loss = 0.0;
    double candidate_loss = 0.0;
    double regret = 0.0;
    double percent_regret = 0.0;
};

/// Relative slack under which a negative regret is treated as rounding.
inline constexpr double kRegretRoundingTolerance = 1e-9;

inline double percent_of(double regret, double optimal) {
    if (optimal > 0.0) return 100.0 * regret / optimal;
    return regret == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

inline LossReport make_loss_report(std::string loss_name, std::string rule, double optimal,
                                   double candidate) {
    double regret = candidate - optimal;
    if (regret < 0.0) {
        const double slack =
            kRegretRoundingTolerance * std::max(std::abs(optimal), std::abs(candidate));
        if (-regret > slack) {
            fail(ErrorKind::numerical, loss_name + ": candidate " + rule +
                                           " beats the optimal estimator by more than rounding");
        }
        regret = 0.0;
    }
    LossReport r{std::move(loss_name), std::move(rule), optimal, candidate, regret, 0.0};
    r.percent_regret = percent_of(r.regret, r.optimal_loss);
    return r;
}

}  // namespace ed
