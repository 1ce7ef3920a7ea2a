#pragma once

// Threshold (TCL_p) and rank (RCL) classification losses. Posterior expected
// losses use the dot-product form: the exceedance probabilities are computed
// once per (draw matrix, rule) and reused for every candidate allocation.

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ed/ensemble_core.hpp"
#include "ed/estimators.hpp"
#include "ed/loss_report.hpp"

namespace ed {

/// `above` flags units with theta > C as positives. `below` inverts the
/// roles (positives are theta <= C), as used for thresholds under 1 on the
/// relative-risk scale.
enum class Direction { above, below };

struct ThresholdRule {
    double C = 0.0;
    /// Weight on false positives; false negatives get 1 - p. Unset means the
    /// unweighted loss with weight 1 on both error types.
    std::optional<double> p;
    Direction direction = Direction::above;

    static ThresholdRule weighted(double C, double p, Direction d = Direction::above) {
        require(p >= 0.0 && p <= 1.0, ErrorKind::validation, "TCL weight p must lie in [0,1]");
        return {C, p, d};
    }
    static ThresholdRule unweighted(double C, Direction d = Direction::above) {
        return {C, std::nullopt, d};
    }

    [[nodiscard]] double fp_weight() const { return p ? *p : 1.0; }
    [[nodiscard]] double fn_weight() const { return p ? 1.0 - *p : 1.0; }
    [[nodiscard]] bool positive(double x) const {
        return direction == Direction::above ? x > C : x <= C;
    }
};

struct RankRule {
    double gamma = 0.8;

    void validate() const {
        require(gamma > 0.0 && gamma < 1.0, ErrorKind::validation, "RCL gamma must lie in (0,1)");
    }
};

/// above_i = P[theta_i > C | y] (or P[P_i > gamma | y]); below_i = 1 - above_i.
struct ClassificationProbabilities {
    std::vector<double> above;
    std::vector<double> below;
};

struct BayesRates {
    std::optional<double> tpr;  // unset when no posterior mass is positive
    std::optional<double> tnr;
};

// ---------------------------------------------------------------- threshold

inline double tcl_realized(const ThresholdRule& rule, std::span<const double> truth,
                           std::span<const double> delta) {
    require(truth.size() == delta.size() && !truth.empty(), ErrorKind::dimension,
            "truth and estimate lengths differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = rule.positive(truth[i]);
        const bool d = rule.positive(delta[i]);
        if (!t && d) acc += rule.fp_weight();
        if (t && !d) acc += rule.fn_weight();
    }
    return acc / static_cast<double>(truth.size());
}

inline ClassificationProbabilities threshold_probabilities(const PosteriorDrawMatrix& m,
                                                           const ThresholdRule& rule) {
    std::vector<std::size_t> count(m.units(), 0);
    for (std::size_t s = 0; s < m.draws(); ++s) {
        const auto r = m.row(s);
        for (std::size_t i = 0; i < r.size(); ++i) count[i] += r[i] > rule.C ? 1 : 0;
    }
    const auto S = static_cast<double>(m.draws());
    ClassificationProbabilities out{std::vector<double>(m.units()), std::vector<double>(m.units())};
    for (std::size_t i = 0; i < count.size(); ++i) {
        out.above[i] = static_cast<double>(count[i]) / S;
        out.below[i] = static_cast<double>(m.draws() - count[i]) / S;
    }
    return out;
}

namespace detail {

inline const std::vector<double>& positive_mass(const ClassificationProbabilities& pr,
                                                Direction d) {
    return d == Direction::above ? pr.above : pr.below;
}
inline const std::vector<double>& negative_mass(const ClassificationProbabilities& pr,
                                                Direction d) {
    return d == Direction::above ? pr.below : pr.above;
}

}  // namespace detail

/// (1/n) [ w_fp <z_pos, p_neg> + w_fn <z_neg, p_pos> ].
inline double posterior_expected_tcl(const ClassificationProbabilities& pr,
                                     const ThresholdRule& rule, std::span<const double> delta) {
    require(delta.size() == pr.above.size(), ErrorKind::dimension,
            "estimate length does not match the number of units");
    const auto& pos = detail::positive_mass(pr, rule.direction);
    const auto& neg = detail::negative_mass(pr, rule.direction);
    double fp = 0.0;
    double fn = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (rule.positive(delta[i])) {
            fp += neg[i];
        } else {
            fn += pos[i];
        }
    }
    return (rule.fp_weight() * fp + rule.fn_weight() * fn) / static_cast<double>(delta.size());
}

inline double posterior_expected_tcl(const PosteriorDrawMatrix& m, const ThresholdRule& rule,
                                     std::span<const double> delta) {
    return posterior_expected_tcl(threshold_probabilities(m, rule), rule, delta);
}

/// Posterior (1 - p)-quantiles (p-quantiles for Direction::below); medians
/// for the unweighted loss.
inline EnsembleEstimate optimal_tcl(const PosteriorDrawMatrix& m, const ThresholdRule& rule) {
    if (!rule.p) return posterior_quantile_estimate(m, 0.5);
    const double p = *rule.p;
    if (!(p > 0.0 && p < 1.0)) {
        fail(ErrorKind::domain, "optimal TCL estimator needs 0 < p < 1");
    }
    return posterior_quantile_estimate(m, rule.direction == Direction::above ? 1.0 - p : p);
}

namespace detail {

template <class Allocated>
BayesRates rates_from(const ClassificationProbabilities& pr, Direction direction, std::size_t n,
                      Allocated&& allocated_positive) {
    require(n == pr.above.size(), ErrorKind::dimension,
            "allocation length does not match the number of units");
    const auto& pos = positive_mass(pr, direction);
    const auto& neg = negative_mass(pr, direction);
    double tp = 0.0, tn = 0.0, pos_total = 0.0, neg_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pos_total += pos[i];
        neg_total += neg[i];
        if (allocated_positive(i)) {
            tp += pos[i];
        } else {
            tn += neg[i];
        }
    }
    BayesRates r;
    if (pos_total > 0.0) r.tpr = tp / pos_total;
    if (neg_total > 0.0) r.tnr = tn / neg_total;
    return r;
}

}  // namespace detail

/// Posterior true positive / true negative rates of a threshold allocation.
inline BayesRates bayes_rates(const ClassificationProbabilities& pr, const ThresholdRule& rule,
                              std::span<const double> delta) {
    return detail::rates_from(pr, rule.direction, delta.size(),
                              [&](std::size_t i) { return rule.positive(delta[i]); });
}

// --------------------------------------------------------------------- rank

/// Number of percentile slots r/(n+1), r = 1..n, strictly above gamma.
inline std::size_t rcl_top_count(std::size_t n, double gamma) {
    std::size_t k = 0;
    const auto denom = static_cast<double>(n + 1);
    for (std::size_t r = 1; r <= n; ++r) k += static_cast<double>(r) / denom > gamma ? 1 : 0;
    return k;
}

inline double rcl_realized(const RankRule& rule, std::span<const double> truth,
                           std::span<const double> delta_percentiles) {
    rule.validate();
    require(truth.size() == delta_percentiles.size() && !truth.empty(), ErrorKind::dimension,
            "truth and percentile lengths differ");
    const auto p = ranks(truth).percentiles;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const bool t = p[i] > rule.gamma;
        const bool d = delta_percentiles[i] > rule.gamma;
        errors += (t != d) ? 1 : 0;
    }
    return static_cast<double>(errors) / static_cast<double>(truth.size());
}

/// above_i = P[P_i(theta) > gamma | y] from per-draw percentile ranks.
inline ClassificationProbabilities rank_exceedance_probabilities(const PosteriorDrawMatrix& m,
                                                                 const RankRule& rule) {
    rule.validate();
    std::vector<std::size_t> count(m.units(), 0);
    for (std::size_t s = 0; s < m.draws(); ++s) {
        const auto r = ranks(m.row(s));
        for (std::size_t i = 0; i < count.size(); ++i) {
            count[i] += r.percentiles[i] > rule.gamma ? 1 : 0;
        }
    }
    const auto S = static_cast<double>(m.draws());
    ClassificationProbabilities out{std::vector<double>(m.units()), std::vector<double>(m.units())};
    for (std::size_t i = 0; i < count.size(); ++i) {
        out.above[i] = static_cast<double>(count[i]) / S;
        out.below[i] = static_cast<double>(m.draws() - count[i]) / S;
    }
    return out;
}

/// Double ranking: percentile ranks of the exceedance probabilities. Ties
/// are ordered by posterior expected rank, then by unit index.
inline RankVector optimal_rcl(const PosteriorDrawMatrix& m, const RankRule& rule) {
    const auto pr = rank_exceedance_probabilities(m, rule);
    const auto rbar = posterior_mean_ranks(m);
    return rank_permutation(pr.above, rbar);
}

/// (1/n) [ <z_above, p_below> + <z_below, p_above> ]; equals
/// (2/n) <z_below, p_above> whenever delta places exactly rcl_top_count
/// units above gamma.
inline double posterior_expected_rcl(const ClassificationProbabilities& pr, const RankRule& rule,
                                     std::span<const double> delta_percentiles) {
    rule.validate();
    require(delta_percentiles.size() == pr.above.size(), ErrorKind::dimension,
            "percentile vector length does not match the number of units");
    double acc = 0.0;
    for (std::size_t i = 0; i < delta_percentiles.size(); ++i) {
        acc += delta_percentiles[i] > rule.gamma ? pr.below[i] : pr.above[i];
    }
    return acc / static_cast<double>(delta_percentiles.size());
}

inline double posterior_expected_rcl(const PosteriorDrawMatrix& m, const RankRule& rule,
                                     std::span<const double> delta_percentiles) {
    return posterior_expected_rcl(rank_exceedance_probabilities(m, rule), rule, delta_percentiles);
}

inline BayesRates bayes_rates(const ClassificationProbabilities& pr, const RankRule& rule,
                              std::span<const double> delta_percentiles) {
    return detail::rates_from(pr, Direction::above, delta_percentiles.size(), [&](std::size_t i) {
        return delta_percentiles[i] > rule.gamma;
    });
}

// ------------------------------------------------------------------ regrets

/// TCL regrets for several candidates sharing one set of exceedance
/// probabilities.
inline std::vector<LossReport> tcl_regrets(const PosteriorDrawMatrix& m, const ThresholdRule& rule,
                                           std::span<const EnsembleEstimate> candidates) {
    const auto pr = threshold_probabilities(m, rule);
    const auto best = optimal_tcl(m, rule);
    const double optimal = posterior_expected_tcl(pr, rule, best.values);
    const std::string name = rule.p ? "TCL_p" : "TCL";
    std::vector<LossReport> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        out.push_back(make_loss_report(name, c.rule.label(), optimal,
                                       posterior_expected_tcl(pr, rule, c.values)));
    }
    return out;
}

inline LossReport tcl_regret(const PosteriorDrawMatrix& m, const ThresholdRule& rule,
                             const EnsembleEstimate& candidate) {
    return tcl_regrets(m, rule, std::span<const EnsembleEstimate>(&candidate, 1)).front();
}

/// RCL regrets; candidate values are mapped to percentile ranks first.
inline std::vector<LossReport> rcl_regrets(const PosteriorDrawMatrix& m, const RankRule& rule,
                                           std::span<const EnsembleEstimate> candidates) {
    const auto pr = rank_exceedance_probabilities(m, rule);
    const auto rbar = posterior_mean_ranks(m);
    const auto best = rank_permutation(pr.above, rbar);
    const double optimal = posterior_expected_rcl(pr, rule, best.percentiles);
    std::vector<LossReport> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        require(c.values.size() == m.units(), ErrorKind::dimension,
                "candidate length does not match the draw matrix");
        const auto pct = ranks(c.values).percentiles;
        out.push_back(make_loss_report("RCL", c.rule.label(), optimal,
                                       posterior_expected_rcl(pr, rule, pct)));
    }
    return out;
}

inline LossReport rcl_regret(const PosteriorDrawMatrix& m, const RankRule& rule,
                             const EnsembleEstimate& candidate) {
    return rcl_regrets(m, rule, std::span<const EnsembleEstimate>(&candidate, 1)).front();
}

}  // namespace ed
