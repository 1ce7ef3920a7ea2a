#pragma once

// Ensembles of point estimates derived from a posterior draw matrix:
// posterior means (SSEL), posterior quantiles, constrained Bayes (CB),
// weighted-ranks SEL (WRSEL), triple-goal (GR) and MLE pass-through.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "ed/ensemble_core.hpp"

namespace ed {

enum class RuleKind { mle, ssel, med, quant, wrsel, cb, gr };

struct EstimateRule {
    RuleKind kind = RuleKind::ssel;
    double q = 0.5;   // quant
    double a1 = 0.0;  // wrsel
    double a2 = 0.0;

    static EstimateRule mle() { return {RuleKind::mle}; }
    static EstimateRule ssel() { return {RuleKind::ssel}; }
    static EstimateRule med() { return {RuleKind::med, 0.5}; }
    static EstimateRule quant(double q) { return {RuleKind::quant, q}; }
    static EstimateRule wrsel(double a1, double a2) { return {RuleKind::wrsel, 0.5, a1, a2}; }
    static EstimateRule cb() { return {RuleKind::cb}; }
    static EstimateRule gr() { return {RuleKind::gr}; }

    [[nodiscard]] std::string label() const {
        char buf[64];
        switch (kind) {
            case RuleKind::mle: return "MLE";
            case RuleKind::ssel: return "SSEL";
            case RuleKind::med: return "MED";
            case RuleKind::quant: std::snprintf(buf, sizeof buf, "QUANT(%g)", q); return buf;
            case RuleKind::wrsel:
                std::snprintf(buf, sizeof buf, "WRSEL(%g;%g)", a1, a2);
                return buf;
            case RuleKind::cb: return "CB";
            case RuleKind::gr: return "GR";
        }
        return "?";
    }
};

struct EnsembleEstimate {
    std::vector<double> values;
    EstimateRule rule;
};

/// Column means.
inline EnsembleEstimate ssel_estimate(const PosteriorDrawMatrix& m) {
    const std::size_t n = m.units();
    std::vector<double> acc(n, 0.0);
    for (std::size_t s = 0; s < m.draws(); ++s) {
        const auto r = m.row(s);
        for (std::size_t i = 0; i < n; ++i) acc[i] += r[i];
    }
    const auto S = static_cast<double>(m.draws());
    for (double& v : acc) v /= S;
    return {std::move(acc), EstimateRule::ssel()};
}

/// Monte Carlo posterior variances with denominator S.
inline std::vector<double> posterior_variances(const PosteriorDrawMatrix& m) {
    const auto means = ssel_estimate(m).values;
    const std::size_t n = m.units();
    std::vector<double> acc(n, 0.0);
    for (std::size_t s = 0; s < m.draws(); ++s) {
        const auto r = m.row(s);
        for (std::size_t i = 0; i < n; ++i) acc[i] += (r[i] - means[i]) * (r[i] - means[i]);
    }
    const auto S = static_cast<double>(m.draws());
    for (double& v : acc) v /= S;
    return acc;
}

/// Type-1 posterior q-quantile of every column. q = 0.5 is tagged MED.
inline EnsembleEstimate posterior_quantile_estimate(const PosteriorDrawMatrix& m, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        fail(ErrorKind::domain, "posterior quantile level must lie in (0,1)");
    }
    std::vector<double> out(m.units());
    for (std::size_t i = 0; i < m.units(); ++i) {
        auto col = m.column(i);
        std::sort(col.begin(), col.end());
        out[i] = quantile_sorted(col, q);
    }
    return {std::move(out), q == 0.5 ? EstimateRule::med() : EstimateRule::quant(q)};
}

struct CbInputs {
    std::vector<double> post_means;
    std::vector<double> post_vars;
    double omega = 1.0;
};

/// omega = [1 + mean(V) / var(m)]^{1/2}, var with denominator n.
inline double cb_weight(std::span<const double> post_means, std::span<const double> post_vars) {
    require(post_means.size() == post_vars.size() && !post_means.empty(), ErrorKind::dimension,
            "posterior means and variances differ in length");
    const double spread = variance(post_means);
    if (!(spread > 0.0)) {
        fail(ErrorKind::degenerate,
             "constrained Bayes is undefined: posterior means have zero variance");
    }
    for (double v : post_vars) require(v >= 0.0, ErrorKind::domain, "negative posterior variance");
    return std::sqrt(1.0 + mean(post_vars) / spread);
}

inline CbInputs cb_inputs(const PosteriorDrawMatrix& m) {
    CbInputs in{ssel_estimate(m).values, posterior_variances(m), 1.0};
    in.omega = cb_weight(in.post_means, in.post_vars);
    return in;
}

inline EnsembleEstimate cb_estimate(const CbInputs& in) {
    const double centre = mean(in.post_means);
    std::vector<double> out(in.post_means.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = centre + in.omega * (in.post_means[i] - centre);
    }
    return {std::move(out), EstimateRule::cb()};
}

inline EnsembleEstimate cb_estimate(const PosteriorDrawMatrix& m) { return cb_estimate(cb_inputs(m)); }

struct WrselWeights {
    double a1 = 0.0;
    double a2 = 0.0;
    std::vector<double> phi;  // phi[r - 1] is the weight of rank r
};

inline WrselWeights wrsel_weights(std::size_t n, double a1, double a2) {
    require(n >= 1, ErrorKind::domain, "WRSEL weights need n >= 1");
    require(a1 >= 0.0 && a2 >= 0.0, ErrorKind::domain, "WRSEL exponents must be >= 0");
    WrselWeights w{a1, a2, std::vector<double>(n)};
    const double mid = (static_cast<double>(n) + 1.0) / 2.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double d = static_cast<double>(i) - mid;
        w.phi[i - 1] = std::exp(a1 * d) + std::exp(-a2 * d);
    }
    return w;
}

/// theta_i = E[theta_i phi_{R_i} | y] / E[phi_{R_i} | y], ranks recomputed on
/// every draw.
inline EnsembleEstimate wrsel_estimate(const PosteriorDrawMatrix& m, double a1, double a2) {
    const std::size_t n = m.units();
    const auto w = wrsel_weights(n, a1, a2);
    const bool constant =
        std::all_of(w.phi.begin(), w.phi.end(), [&](double v) { return v == w.phi.front(); });
    if (constant) {
        // Constant weights cancel out of the ratio.
        auto est = ssel_estimate(m);
        est.rule = EstimateRule::wrsel(a1, a2);
        return est;
    }
    std::vector<double> num(n, 0.0);
    std::vector<double> den(n, 0.0);
    for (std::size_t s = 0; s < m.draws(); ++s) {
        const auto row = m.row(s);
        const auto r = ranks(row);
        for (std::size_t i = 0; i < n; ++i) {
            const double phi = w.phi[static_cast<std::size_t>(r.ranks[i] - 1)];
            num[i] += row[i] * phi;
            den[i] += phi;
        }
    }
    for (std::size_t i = 0; i < n; ++i) num[i] /= den[i];
    return {std::move(num), EstimateRule::wrsel(a1, a2)};
}

/// Posterior expected ranks: Rbar_i = sum_j P(theta_i >= theta_j | y).
inline std::vector<double> posterior_mean_ranks(const PosteriorDrawMatrix& m) {
    std::vector<double> acc(m.units(), 0.0);
    for (std::size_t s = 0; s < m.draws(); ++s) {
        const auto r = ranks(m.row(s));
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += r.ranks[i];
    }
    const auto S = static_cast<double>(m.draws());
    for (double& v : acc) v /= S;
    return acc;
}

/// Triple-goal estimates. The posterior EDF is the EDF of the pooled S*n
/// draws, so its min-rule inverse is a type-1 quantile of the pooled values.
inline EnsembleEstimate gr_estimate(const PosteriorDrawMatrix& m) {
    const std::size_t n = m.units();
    std::vector<double> pooled(m.values().begin(), m.values().end());
    std::sort(pooled.begin(), pooled.end());

    const auto rbar = posterior_mean_ranks(m);
    const auto rhat = rank_permutation(rbar);

    std::vector<double> out(n);
    const double two_n = 2.0 * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double target = (2.0 * rhat.ranks[i] - 1.0) / two_n;
        out[i] = quantile_sorted(pooled, target);
    }
    return {std::move(out), EstimateRule::gr()};
}

inline EnsembleEstimate mle_passthrough(std::span<const double> mle, std::size_t expected_units) {
    require(mle.size() == expected_units, ErrorKind::dimension,
            "MLE length " + std::to_string(mle.size()) + " does not match " +
                std::to_string(expected_units) + " units");
    check_ensemble(mle, "MLE ensemble");
    return {std::vector<double>(mle.begin(), mle.end()), EstimateRule::mle()};
}

}  // namespace ed
