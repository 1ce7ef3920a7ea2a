#pragma once

// Primitives on finite ensembles and posterior draw matrices: empirical
// quantiles (min-rule / type 1), ranks, percentile ranks, quartile ratio and
// interquartile range, and row-wise functional evaluation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ed/error.hpp"

namespace ed {

/// A parameter ensemble or an ensemble of point estimates.
using Ensemble = std::vector<double>;

struct RankVector {
    std::vector<int> ranks;           // values in 1..n
    std::vector<double> percentiles;  // ranks / (n + 1)
};

struct QuantileSet {
    std::vector<double> probs;   // strictly increasing
    std::vector<double> values;  // non-decreasing
};

inline void check_ensemble(std::span<const double> e, const char* what = "ensemble") {
    if (e.empty()) fail(ErrorKind::domain, std::string(what) + " is empty");
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (!std::isfinite(e[i])) {
            fail(ErrorKind::domain,
                 std::string(what) + " has non-finite entry at index " + std::to_string(i));
        }
    }
}

inline void check_probability(double p, const char* what = "p") {
    if (!(p >= 0.0 && p <= 1.0)) {
        fail(ErrorKind::domain, std::string(what) + " must lie in [0,1], got " + std::to_string(p));
    }
}

/// Joint posterior draws: S rows (iterations) by n columns (units), stored
/// row-major so a single joint draw is contiguous.
class PosteriorDrawMatrix {
public:
    PosteriorDrawMatrix() = default;

    PosteriorDrawMatrix(std::size_t draws, std::size_t units, std::vector<double> values,
                        std::vector<std::string> unit_ids = {})
        : draws_(draws), units_(units), values_(std::move(values)), ids_(std::move(unit_ids)) {
        require(draws_ >= 1 && units_ >= 1, ErrorKind::dimension,
                "draw matrix needs at least one draw and one unit");
        require(values_.size() == draws_ * units_, ErrorKind::dimension,
                "draw matrix storage does not match S x n");
        for (std::size_t k = 0; k < values_.size(); ++k) {
            if (!std::isfinite(values_[k])) {
                fail(ErrorKind::domain, "non-finite draw at row " + std::to_string(k / units_) +
                                            ", column " + std::to_string(k % units_));
            }
        }
        if (ids_.empty()) {
            ids_.reserve(units_);
            for (std::size_t i = 0; i < units_; ++i) ids_.push_back("u" + std::to_string(i + 1));
        }
        require(ids_.size() == units_, ErrorKind::dimension, "unit id count does not match n");
        std::unordered_set<std::string> seen(ids_.begin(), ids_.end());
        require(seen.size() == ids_.size(), ErrorKind::validation, "unit ids are not unique");
    }

    static PosteriorDrawMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                         std::vector<std::string> unit_ids = {}) {
        require(!rows.empty(), ErrorKind::dimension, "no draws");
        const std::size_t n = rows.front().size();
        std::vector<double> flat;
        flat.reserve(rows.size() * n);
        for (const auto& r : rows) {
            require(r.size() == n, ErrorKind::dimension, "ragged draw rows");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return {rows.size(), n, std::move(flat), std::move(unit_ids)};
    }

    [[nodiscard]] std::size_t draws() const noexcept { return draws_; }
    [[nodiscard]] std::size_t units() const noexcept { return units_; }

    [[nodiscard]] std::span<const double> row(std::size_t s) const {
        return {values_.data() + s * units_, units_};
    }
    [[nodiscard]] double operator()(std::size_t s, std::size_t i) const {
        return values_[s * units_ + i];
    }
    [[nodiscard]] std::vector<double> column(std::size_t i) const {
        std::vector<double> c(draws_);
        for (std::size_t s = 0; s < draws_; ++s) c[s] = values_[s * units_ + i];
        return c;
    }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<std::string>& unit_ids() const noexcept { return ids_; }

    /// Element-wise transform, e.g. log for log-scale losses.
    template <class F>
    [[nodiscard]] PosteriorDrawMatrix transformed(F&& f) const {
        std::vector<double> v(values_.size());
        std::transform(values_.begin(), values_.end(), v.begin(), f);
        return {draws_, units_, std::move(v), ids_};
    }

private:
    std::size_t draws_ = 0;
    std::size_t units_ = 0;
    std::vector<double> values_;
    std::vector<std::string> ids_;
};

/// Min-rule quantile of already sorted data: the smallest x_(k) with k/n >= p.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    const auto nd = static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(p * nd)));
    k = std::min(k, n);
    // ceil(p * n) can be off by one after rounding; settle on the exact rule.
    while (k > 1 && static_cast<double>(k - 1) / nd >= p) --k;
    while (k < n && static_cast<double>(k) / nd < p) ++k;
    return sorted[k - 1];
}

inline double empirical_quantile(std::span<const double> e, double p) {
    check_ensemble(e);
    check_probability(p);
    std::vector<double> sorted(e.begin(), e.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, p);
}

inline std::vector<double> empirical_quantiles(std::span<const double> e,
                                               std::span<const double> probs) {
    check_ensemble(e);
    std::vector<double> sorted(e.begin(), e.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out;
    out.reserve(probs.size());
    for (double p : probs) {
        check_probability(p);
        out.push_back(quantile_sorted(sorted, p));
    }
    return out;
}

/// R_i = #{j : e_j <= e_i}. Ties share the larger rank.
inline RankVector ranks(std::span<const double> e) {
    if (e.empty()) fail(ErrorKind::domain, "cannot rank an empty ensemble");
    std::vector<double> sorted(e.begin(), e.end());
    std::sort(sorted.begin(), sorted.end());
    const double denom = static_cast<double>(e.size() + 1);
    RankVector r;
    r.ranks.resize(e.size());
    r.percentiles.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto pos = std::upper_bound(sorted.begin(), sorted.end(), e[i]) - sorted.begin();
        r.ranks[i] = static_cast<int>(pos);
        r.percentiles[i] = static_cast<double>(r.ranks[i]) / denom;
    }
    return r;
}

/// Ranks forming a permutation of 1..n. Ties are ordered by `tiebreak`
/// (ascending) when provided, then by ascending unit index.
inline RankVector rank_permutation(std::span<const double> e,
                                   std::span<const double> tiebreak = {}) {
    if (e.empty()) fail(ErrorKind::domain, "cannot rank an empty ensemble");
    require(tiebreak.empty() || tiebreak.size() == e.size(), ErrorKind::dimension,
            "tie-break key length mismatch");
    std::vector<std::size_t> order(e.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (e[a] != e[b]) return e[a] < e[b];
        if (!tiebreak.empty() && tiebreak[a] != tiebreak[b]) return tiebreak[a] < tiebreak[b];
        return false;
    });
    const double denom = static_cast<double>(e.size() + 1);
    RankVector r;
    r.ranks.resize(e.size());
    r.percentiles.resize(e.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        r.ranks[order[pos]] = static_cast<int>(pos + 1);
        r.percentiles[order[pos]] = static_cast<double>(pos + 1) / denom;
    }
    return r;
}

struct Quartiles {
    double lower;
    double upper;
};

inline Quartiles quartiles_sorted(std::span<const double> sorted) {
    return {quantile_sorted(sorted, 0.25), quantile_sorted(sorted, 0.75)};
}

inline Quartiles empirical_quartiles(std::span<const double> e) {
    check_ensemble(e);
    std::vector<double> sorted(e.begin(), e.end());
    std::sort(sorted.begin(), sorted.end());
    return quartiles_sorted(sorted);
}

inline double empirical_iqr(std::span<const double> e) {
    const auto q = empirical_quartiles(e);
    return q.upper - q.lower;
}

/// Q(.75) / Q(.25). Only defined on the positive scale: a first quartile
/// <= 0 is refused and callers should use the IQR instead.
inline double empirical_qr(std::span<const double> e) {
    const auto q = empirical_quartiles(e);
    if (!(q.lower > 0.0)) {
        fail(ErrorKind::domain, "quartile ratio needs a positive first quartile (got " +
                                    std::to_string(q.lower) + "); use the IQR instead");
    }
    return q.upper / q.lower;
}

/// Evaluates f on every joint draw. Errors raised by f are re-thrown with
/// the offending draw index.
template <class F>
std::vector<double> per_draw_map(const PosteriorDrawMatrix& m, F&& f) {
    std::vector<double> out(m.draws());
    for (std::size_t s = 0; s < m.draws(); ++s) {
        try {
            out[s] = f(m.row(s));
        } catch (const Error& e) {
            throw Error(e.kind(), "draw " + std::to_string(s) + ": " + e.what());
        }
    }
    return out;
}

inline double mean(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

/// Population variance (denominator n).
inline double variance(std::span<const double> x) {
    const double mu = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - mu) * (v - mu);
    return acc / static_cast<double>(x.size());
}

}  // namespace ed
