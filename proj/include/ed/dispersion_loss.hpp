#pragma once

// Losses on ensemble quantiles (Q-SEL), the quartile ratio (QR-SEL) and the
// interquartile range (IQR-SEL): posterior expected losses, their optimal
// estimators, the RoPQ / DoPQ plug-ins, and plug-in regrets.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ed/ensemble_core.hpp"
#include "ed/estimators.hpp"
#include "ed/loss_report.hpp"

namespace ed {

enum class LossScale { natural, log };

struct QselSpec {
    std::vector<double> probs{0.25, 0.75};

    void validate() const {
        require(!probs.empty(), ErrorKind::validation, "Q-SEL needs at least one probability");
        for (std::size_t j = 0; j < probs.size(); ++j) {
            require(probs[j] > 0.0 && probs[j] < 1.0, ErrorKind::validation,
                    "Q-SEL probabilities must lie in (0,1)");
            require(j == 0 || probs[j] > probs[j - 1], ErrorKind::validation,
                    "Q-SEL probabilities must be strictly increasing");
        }
    }
};

namespace detail {

inline double to_scale(double v, LossScale scale) {
    if (scale == LossScale::natural) return v;
    if (!(v > 0.0)) fail(ErrorKind::domain, "log-scale loss needs positive values");
    return std::log(v);
}

/// out[j][s] = empirical p_j-quantile of draw s, on the requested scale.
inline std::vector<std::vector<double>> draw_quantiles(const PosteriorDrawMatrix& m,
                                                       std::span<const double> probs,
                                                       LossScale scale) {
    std::vector<std::vector<double>> out(probs.size(), std::vector<double>(m.draws()));
    std::vector<double> sorted(m.units());
    for (std::size_t s = 0; s < m.draws(); ++s) {
        const auto row = m.row(s);
        std::copy(row.begin(), row.end(), sorted.begin());
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t j = 0; j < probs.size(); ++j) {
            out[j][s] = to_scale(quantile_sorted(sorted, probs[j]), scale);
        }
    }
    return out;
}

inline double mean_squared_distance(std::span<const double> xs, double target) {
    double acc = 0.0;
    for (double x : xs) acc += (x - target) * (x - target);
    return acc / static_cast<double>(xs.size());
}

struct DrawQuartiles {
    std::vector<double> lower;
    std::vector<double> upper;
};

inline DrawQuartiles draw_quartiles(const PosteriorDrawMatrix& m) {
    const std::vector<double> probs{0.25, 0.75};
    auto q = draw_quantiles(m, probs, LossScale::natural);
    return {std::move(q[0]), std::move(q[1])};
}

inline bool all_positive(const PosteriorDrawMatrix& m) {
    const auto v = m.values();
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

inline void require_positive_draws(const PosteriorDrawMatrix& m) {
    if (!all_positive(m)) {
        fail(ErrorKind::domain,
             "QR-SEL refused: draws are not all positive; replace the QR-SEL with the IQR-SEL");
    }
}

inline std::vector<double> draw_qrs(const PosteriorDrawMatrix& m) {
    require_positive_draws(m);
    const auto q = draw_quartiles(m);
    std::vector<double> out(m.draws());
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = q.upper[s] / q.lower[s];
    return out;
}

inline std::vector<double> draw_iqrs(const PosteriorDrawMatrix& m) {
    const auto q = draw_quartiles(m);
    std::vector<double> out(m.draws());
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = q.upper[s] - q.lower[s];
    return out;
}

}  // namespace detail

/// Monte Carlo estimate of E[sum_j (Q_theta(p_j) - delta_j)^2 | y].
inline double posterior_qsel(const PosteriorDrawMatrix& m, const QselSpec& spec,
                             std::span<const double> delta, LossScale scale = LossScale::natural) {
    spec.validate();
    require(delta.size() == spec.probs.size(), ErrorKind::dimension,
            "Q-SEL estimate length does not match the number of probabilities");
    const auto q = detail::draw_quantiles(m, spec.probs, scale);
    double total = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        total += detail::mean_squared_distance(q[j], detail::to_scale(delta[j], scale));
    }
    return total;
}

/// Posterior means of the per-draw empirical quantiles (natural scale).
inline QuantileSet optimal_qsel_estimator(const PosteriorDrawMatrix& m, const QselSpec& spec) {
    spec.validate();
    const auto q = detail::draw_quantiles(m, spec.probs, LossScale::natural);
    QuantileSet out{spec.probs, std::vector<double>(q.size())};
    for (std::size_t j = 0; j < q.size(); ++j) out.values[j] = mean(q[j]);
    return out;
}

inline double posterior_qrsel(const PosteriorDrawMatrix& m, double delta) {
    return detail::mean_squared_distance(detail::draw_qrs(m), delta);
}

inline double posterior_iqrsel(const PosteriorDrawMatrix& m, double delta) {
    return detail::mean_squared_distance(detail::draw_iqrs(m), delta);
}

/// Posterior mean of the per-draw quartile ratio. Draws must be positive.
inline double optimal_qr(const PosteriorDrawMatrix& m) { return mean(detail::draw_qrs(m)); }

inline double optimal_iqr(const PosteriorDrawMatrix& m) { return mean(detail::draw_iqrs(m)); }

/// E[Q(.75)|y] / E[Q(.25)|y].
inline double ropq(const PosteriorDrawMatrix& m) {
    const auto q = detail::draw_quartiles(m);
    const double lower = mean(q.lower);
    if (lower == 0.0) fail(ErrorKind::domain, "RoPQ undefined: posterior first quartile is zero");
    return mean(q.upper) / lower;
}

/// E[Q(.75)|y] - E[Q(.25)|y].
inline double dopq(const PosteriorDrawMatrix& m) {
    const auto q = detail::draw_quartiles(m);
    return mean(q.upper) - mean(q.lower);
}

/// True when the quartile ratio is well posed on every draw.
inline bool qr_applicable(const PosteriorDrawMatrix& m) { return detail::all_positive(m); }

inline LossReport qsel_regret(const PosteriorDrawMatrix& m, const QselSpec& spec,
                              const EnsembleEstimate& candidate,
                              LossScale scale = LossScale::natural) {
    spec.validate();
    require(candidate.values.size() == m.units(), ErrorKind::dimension,
            "candidate length does not match the draw matrix");
    const auto q = detail::draw_quantiles(m, spec.probs, scale);
    const auto plug_in = empirical_quantiles(candidate.values, spec.probs);
    double optimal = 0.0;
    double cand = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        optimal += detail::mean_squared_distance(q[j], mean(q[j]));
        cand += detail::mean_squared_distance(q[j], detail::to_scale(plug_in[j], scale));
    }
    return make_loss_report(scale == LossScale::log ? "Q-SEL(log)" : "Q-SEL",
                            candidate.rule.label(), optimal, cand);
}

/// Regret of a scalar QR estimate (e.g. RoPQ).
inline LossReport qrsel_regret_value(const PosteriorDrawMatrix& m, double value,
                                     const std::string& label) {
    const auto qrs = detail::draw_qrs(m);
    return make_loss_report("QR-SEL", label, detail::mean_squared_distance(qrs, mean(qrs)),
                            detail::mean_squared_distance(qrs, value));
}

inline LossReport qrsel_regret(const PosteriorDrawMatrix& m, const EnsembleEstimate& candidate) {
    require(candidate.values.size() == m.units(), ErrorKind::dimension,
            "candidate length does not match the draw matrix");
    return qrsel_regret_value(m, empirical_qr(candidate.values), candidate.rule.label());
}

inline LossReport iqrsel_regret_value(const PosteriorDrawMatrix& m, double value,
                                      const std::string& label) {
    const auto iqrs = detail::draw_iqrs(m);
    return make_loss_report("IQR-SEL", label, detail::mean_squared_distance(iqrs, mean(iqrs)),
                            detail::mean_squared_distance(iqrs, value));
}

inline LossReport iqrsel_regret(const PosteriorDrawMatrix& m, const EnsembleEstimate& candidate) {
    require(candidate.values.size() == m.units(), ErrorKind::dimension,
            "candidate length does not match the draw matrix");
    return iqrsel_regret_value(m, empirical_iqr(candidate.values), candidate.rule.label());
}

/// QR-SEL on positive draws, IQR-SEL otherwise.
inline LossReport dispersion_regret(const PosteriorDrawMatrix& m,
                                    const EnsembleEstimate& candidate) {
    return qr_applicable(m) ? qrsel_regret(m, candidate) : iqrsel_regret(m, candidate);
}

/// RoPQ on positive draws, DoPQ otherwise, scored like dispersion_regret.
inline LossReport quartile_plugin_regret(const PosteriorDrawMatrix& m) {
    return qr_applicable(m) ? qrsel_regret_value(m, ropq(m), "RoPQ")
                            : iqrsel_regret_value(m, dopq(m), "DoPQ");
}

}  // namespace ed
