#pragma once

// Posterior draw generators: exact samplers for the conjugate Normal-Normal
// and Gamma-Inverse-Gamma models, Metropolis-within-Gibbs samplers for the
// Poisson-lognormal and BYM (iid + intrinsic CAR) models, and MLEs.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ed/ensemble_core.hpp"
#include "ed/graph.hpp"
#include "ed/rng.hpp"

namespace ed {

// ----------------------------------------------------------- conjugate models

struct NormalNormalSpec {
    double mu0 = 0.0;
    double tau0_sq = 1.0;
    std::vector<double> sigma_sq;  // per-unit sampling variances

    void validate(std::size_t n) const {
        require(tau0_sq > 0.0, ErrorKind::domain, "tau0^2 must be positive");
        require(sigma_sq.size() == n, ErrorKind::dimension,
                "sampling variances do not match the data length");
        for (double s : sigma_sq) require(s > 0.0, ErrorKind::domain, "sampling variance <= 0");
    }

    /// Shrinkage factor gamma_i = sigma_i^2 / (sigma_i^2 + tau0^2).
    [[nodiscard]] double shrinkage(std::size_t i) const {
        return sigma_sq[i] / (sigma_sq[i] + tau0_sq);
    }
    [[nodiscard]] double posterior_mean(std::size_t i, double y) const {
        const double g = shrinkage(i);
        return g * mu0 + (1.0 - g) * y;
    }
    [[nodiscard]] double posterior_variance(std::size_t i) const { return tau0_sq * shrinkage(i); }
};

inline PosteriorDrawMatrix nn_posterior_draws(const NormalNormalSpec& spec,
                                              std::span<const double> y, std::size_t S,
                                              std::uint64_t seed) {
    spec.validate(y.size());
    require(S >= 1 && !y.empty(), ErrorKind::domain, "need S >= 1 draws and n >= 1 units");
    const std::size_t n = y.size();
    std::vector<double> mean(n), sd(n);
    for (std::size_t i = 0; i < n; ++i) {
        mean[i] = spec.posterior_mean(i, y[i]);
        sd[i] = std::sqrt(spec.posterior_variance(i));
    }
    auto rng = make_rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> v(S * n);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t i = 0; i < n; ++i) v[s * n + i] = mean[i] + sd[i] * z(rng);
    }
    return {S, n, std::move(v)};
}

struct GammaInvGammaSpec {
    double alpha0 = 4.0;
    double beta0 = 3.0;
    std::vector<double> a;  // per-unit Gamma shapes

    void validate(std::size_t n) const {
        require(alpha0 > 1.0, ErrorKind::domain, "alpha0 must exceed 1");
        require(beta0 > 0.0, ErrorKind::domain, "beta0 must be positive");
        require(a.size() == n, ErrorKind::dimension, "shape vector does not match the data length");
        for (double v : a) require(v > 0.0, ErrorKind::domain, "Gamma shape <= 0");
    }
    [[nodiscard]] double posterior_shape(std::size_t i) const { return a[i] + alpha0; }
    [[nodiscard]] double posterior_scale(double y) const { return y + beta0; }
};

/// theta_i | y_i ~ Inv-Gamma(a_i + alpha0, y_i + beta0), drawn as 1 / Gamma.
inline PosteriorDrawMatrix gig_posterior_draws(const GammaInvGammaSpec& spec,
                                               std::span<const double> y, std::size_t S,
                                               std::uint64_t seed) {
    spec.validate(y.size());
    require(S >= 1 && !y.empty(), ErrorKind::domain, "need S >= 1 draws and n >= 1 units");
    for (double v : y) require(v > 0.0, ErrorKind::domain, "G-IG observations must be positive");
    const std::size_t n = y.size();
    std::vector<std::gamma_distribution<double>> dists;
    dists.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        dists.emplace_back(spec.posterior_shape(i), 1.0 / spec.posterior_scale(y[i]));
    }
    auto rng = make_rng(seed);
    std::vector<double> v(S * n);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t i = 0; i < n; ++i) v[s * n + i] = 1.0 / dists[i](rng);
    }
    return {S, n, std::move(v)};
}

// ------------------------------------------------------------------- MCMC

struct GammaParams {
    double shape = 0.5;
    double rate = 0.0005;
};

struct McmcConfig {
    std::size_t iters = 4000;  // total sweeps including burn-in
    std::size_t burnin = 2000;
    std::size_t thin = 1;
    double proposal_sd = 0.3;        // random-effect updates
    double alpha_proposal_sd = 0.3;  // intercept update
    std::uint64_t seed = 1;

    void validate() const {
        require(iters > burnin, ErrorKind::validation, "MCMC iterations must exceed burn-in");
        require(thin >= 1, ErrorKind::validation, "thinning must be >= 1");
        require(proposal_sd > 0.0 && alpha_proposal_sd > 0.0, ErrorKind::validation,
                "proposal scales must be positive");
    }
    [[nodiscard]] std::size_t kept() const { return (iters - burnin + thin - 1) / thin; }
};

struct AcceptanceRates {
    double v = 0.0;
    double u = 0.0;  // BYM only
    double alpha = 0.0;
};

struct McmcResult {
    PosteriorDrawMatrix draws;  // columns are relative risks exp(eta_i)
    AcceptanceRates acceptance;
};

namespace detail {

inline void check_counts(std::span<const double> y, std::span<const double> E) {
    require(y.size() == E.size() && !y.empty(), ErrorKind::dimension,
            "counts and expected counts differ in length");
    for (std::size_t i = 0; i < y.size(); ++i) {
        require(y[i] >= 0.0 && std::floor(y[i]) == y[i], ErrorKind::domain,
                "counts must be non-negative integers");
        if (!(E[i] > 0.0) || !std::isfinite(E[i])) {
            fail(ErrorKind::numerical,
                 "non-finite Poisson likelihood: expected count of unit " + std::to_string(i + 1) +
                     " is not positive");
        }
    }
}

/// Poisson log-likelihood of one unit at linear predictor eta (no constant).
inline double poisson_loglik(double y, double E, double eta) { return y * eta - E * std::exp(eta); }

inline double initial_intercept(std::span<const double> y, std::span<const double> E) {
    const double ys = std::accumulate(y.begin(), y.end(), 0.0);
    const double es = std::accumulate(E.begin(), E.end(), 0.0);
    return std::log(std::max(ys, 0.5) / es);
}

struct Counter {
    std::size_t accepted = 0;
    std::size_t proposed = 0;
    [[nodiscard]] double rate() const {
        return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
    }
};

}  // namespace detail

/// Conjugate update of the precision 1/sigma^2 of iid N(0, sigma^2) effects.
inline GammaParams iid_precision_full_conditional(const GammaParams& prior,
                                                  std::span<const double> v) {
    double ss = 0.0;
    for (double x : v) ss += x * x;
    return {prior.shape + static_cast<double>(v.size()) / 2.0, prior.rate + ss / 2.0};
}

/// Conjugate update of the intrinsic CAR precision: the quadratic form is
/// the sum over neighbouring pairs of (u_i - u_j)^2, with rank n - #components.
inline GammaParams car_precision_full_conditional(const GammaParams& prior,
                                                  const AdjacencyGraph& graph,
                                                  std::span<const double> u) {
    double ss = 0.0;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        for (std::size_t j : graph.neighbors(i)) {
            if (j > i) ss += (u[i] - u[j]) * (u[i] - u[j]);
        }
    }
    const auto rank = static_cast<double>(graph.size() - graph.component_count());
    return {prior.shape + rank / 2.0, prior.rate + ss / 2.0};
}

struct PoissonLogNormalSpec {
    std::vector<double> y;
    std::vector<double> E;
    double alpha_prior_mean = 0.0;
    double alpha_prior_var = 1e6;
    GammaParams precision_prior{0.5, 0.0005};
    McmcConfig mcmc{60000, 10000};
};

/// y_i ~ Pois(E_i exp(alpha + v_i)), v_i ~ N(0, sigma^2). One sweep is a
/// random-walk Metropolis step per v_i, one for alpha, then a Gibbs draw of
/// 1/sigma^2.
class PoissonLogNormalSampler {
public:
    explicit PoissonLogNormalSampler(PoissonLogNormalSpec spec)
        : spec_(std::move(spec)), rng_(make_rng(spec_.mcmc.seed)) {
        detail::check_counts(spec_.y, spec_.E);
        spec_.mcmc.validate();
        alpha_ = detail::initial_intercept(spec_.y, spec_.E);
        v_.resize(spec_.y.size());
        for (std::size_t i = 0; i < v_.size(); ++i) {
            v_[i] = std::log((spec_.y[i] + 0.5) / spec_.E[i]) - alpha_;
        }
        precision_ = 1.0;
    }

    void sweep() {
        const std::size_t n = v_.size();
        const double sd = spec_.mcmc.proposal_sd;
        for (std::size_t i = 0; i < n; ++i) {
            const double cur = v_[i];
            const double prop = cur + draw_normal(rng_, 0.0, sd);
            const double log_ratio =
                detail::poisson_loglik(spec_.y[i], spec_.E[i], alpha_ + prop) -
                detail::poisson_loglik(spec_.y[i], spec_.E[i], alpha_ + cur) -
                0.5 * precision_ * (prop * prop - cur * cur);
            ++v_count_.proposed;
            if (accept(log_ratio)) {
                v_[i] = prop;
                ++v_count_.accepted;
            }
        }

        const double prop = alpha_ + draw_normal(rng_, 0.0, spec_.mcmc.alpha_proposal_sd);
        double log_ratio = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            log_ratio += detail::poisson_loglik(spec_.y[i], spec_.E[i], prop + v_[i]) -
                         detail::poisson_loglik(spec_.y[i], spec_.E[i], alpha_ + v_[i]);
        }
        const double m = spec_.alpha_prior_mean;
        log_ratio -= ((prop - m) * (prop - m) - (alpha_ - m) * (alpha_ - m)) /
                     (2.0 * spec_.alpha_prior_var);
        ++alpha_count_.proposed;
        if (accept(log_ratio)) {
            alpha_ = prop;
            ++alpha_count_.accepted;
        }

        const auto fc = iid_precision_full_conditional(spec_.precision_prior, v_);
        precision_ = draw_gamma(rng_, fc.shape, fc.rate);
    }

    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] const std::vector<double>& v() const { return v_; }
    [[nodiscard]] double precision() const { return precision_; }
    [[nodiscard]] AcceptanceRates acceptance() const {
        return {v_count_.rate(), 0.0, alpha_count_.rate()};
    }
    [[nodiscard]] const PoissonLogNormalSpec& spec() const { return spec_; }

    void relative_risks(std::span<double> out) const {
        for (std::size_t i = 0; i < v_.size(); ++i) out[i] = std::exp(alpha_ + v_[i]);
    }

private:
    bool accept(double log_ratio) {
        return log_ratio >= 0.0 || std::log(draw_uniform(rng_, 0.0, 1.0)) < log_ratio;
    }

    PoissonLogNormalSpec spec_;
    Rng rng_;
    double alpha_ = 0.0;
    std::vector<double> v_;
    double precision_ = 1.0;
    detail::Counter v_count_;
    detail::Counter alpha_count_;
};

struct BymSpec {
    std::vector<double> y;
    std::vector<double> E;
    AdjacencyGraph graph;
    GammaParams precision_prior_u{0.5, 0.0005};
    GammaParams precision_prior_v{0.5, 0.0005};
    McmcConfig mcmc{4000, 2000};
    /// Prior-only sampling when false (the Poisson term is dropped).
    bool use_likelihood = true;
    /// Pin a precision instead of sampling it (prior checks).
    std::optional<double> fixed_precision_u;
    std::optional<double> fixed_precision_v;
};

/// log theta_i = alpha + v_i + u_i with v iid normal and u intrinsic CAR.
/// After every sweep u is recentred to sum to zero and the offset moves
/// into the flat-prior intercept.
class BymSampler {
public:
    explicit BymSampler(BymSpec spec) : spec_(std::move(spec)), rng_(make_rng(spec_.mcmc.seed)) {
        const std::size_t n = spec_.y.size();
        detail::check_counts(spec_.y, spec_.E);
        spec_.mcmc.validate();
        require(spec_.graph.size() == n, ErrorKind::dimension,
                "adjacency graph size does not match the data");
        for (std::size_t i = 0; i < n; ++i) {
            require(spec_.graph.degree(i) > 0, ErrorKind::validation,
                    "area " + std::to_string(i + 1) + " has no neighbours");
        }
        alpha_ = detail::initial_intercept(spec_.y, spec_.E);
        u_.assign(n, 0.0);
        v_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            v_[i] = spec_.use_likelihood ? std::log((spec_.y[i] + 0.5) / spec_.E[i]) - alpha_ : 0.0;
        }
        precision_u_ = spec_.fixed_precision_u.value_or(1.0);
        precision_v_ = spec_.fixed_precision_v.value_or(1.0);
    }

    void sweep() {
        const std::size_t n = u_.size();
        const double sd = spec_.mcmc.proposal_sd;
        for (std::size_t i = 0; i < n; ++i) {
            // u_i | u_-i ~ N(mean of neighbours, 1 / (tau_u m_i))
            const auto& nb = spec_.graph.neighbors(i);
            double nb_sum = 0.0;
            for (std::size_t j : nb) nb_sum += u_[j];
            const double m_i = static_cast<double>(nb.size());
            const double centre = nb_sum / m_i;
            const double cur = u_[i];
            const double prop = cur + draw_normal(rng_, 0.0, sd);
            double log_ratio = -0.5 * precision_u_ * m_i *
                               ((prop - centre) * (prop - centre) - (cur - centre) * (cur - centre));
            log_ratio += loglik_delta(i, alpha_ + v_[i] + prop, alpha_ + v_[i] + cur);
            ++u_count_.proposed;
            if (accept(log_ratio)) {
                u_[i] = prop;
                ++u_count_.accepted;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double cur = v_[i];
            const double prop = cur + draw_normal(rng_, 0.0, sd);
            double log_ratio = -0.5 * precision_v_ * (prop * prop - cur * cur);
            log_ratio += loglik_delta(i, alpha_ + prop + u_[i], alpha_ + cur + u_[i]);
            ++v_count_.proposed;
            if (accept(log_ratio)) {
                v_[i] = prop;
                ++v_count_.accepted;
            }
        }

        const double prop = alpha_ + draw_normal(rng_, 0.0, spec_.mcmc.alpha_proposal_sd);
        double log_ratio = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            log_ratio += loglik_delta(i, prop + v_[i] + u_[i], alpha_ + v_[i] + u_[i]);
        }
        ++alpha_count_.proposed;
        if (accept(log_ratio)) {
            alpha_ = prop;
            ++alpha_count_.accepted;
        }

        if (!spec_.fixed_precision_u) {
            const auto fc = car_precision_full_conditional(spec_.precision_prior_u, spec_.graph, u_);
            precision_u_ = draw_gamma(rng_, fc.shape, fc.rate);
        }
        if (!spec_.fixed_precision_v) {
            const auto fc = iid_precision_full_conditional(spec_.precision_prior_v, v_);
            precision_v_ = draw_gamma(rng_, fc.shape, fc.rate);
        }

        recentre();
    }

    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] const std::vector<double>& u() const { return u_; }
    [[nodiscard]] const std::vector<double>& v() const { return v_; }
    [[nodiscard]] double precision_u() const { return precision_u_; }
    [[nodiscard]] double precision_v() const { return precision_v_; }
    [[nodiscard]] AcceptanceRates acceptance() const {
        return {v_count_.rate(), u_count_.rate(), alpha_count_.rate()};
    }
    [[nodiscard]] const BymSpec& spec() const { return spec_; }

    void relative_risks(std::span<double> out) const {
        for (std::size_t i = 0; i < u_.size(); ++i) out[i] = std::exp(alpha_ + v_[i] + u_[i]);
    }

private:
    double loglik_delta(std::size_t i, double eta_new, double eta_old) const {
        if (!spec_.use_likelihood) return 0.0;
        return detail::poisson_loglik(spec_.y[i], spec_.E[i], eta_new) -
               detail::poisson_loglik(spec_.y[i], spec_.E[i], eta_old);
    }

    bool accept(double log_ratio) {
        return log_ratio >= 0.0 || std::log(draw_uniform(rng_, 0.0, 1.0)) < log_ratio;
    }

    // The last entry absorbs the rounding residue so that a left-to-right
    // sum of u is exactly zero.
    void recentre() {
        const double shift = mean(u_);
        double partial = 0.0;
        for (std::size_t i = 0; i + 1 < u_.size(); ++i) {
            u_[i] -= shift;
            partial += u_[i];
        }
        u_.back() = -partial;
        alpha_ += shift;
    }

    BymSpec spec_;
    Rng rng_;
    double alpha_ = 0.0;
    std::vector<double> u_;
    std::vector<double> v_;
    double precision_u_ = 1.0;
    double precision_v_ = 1.0;
    detail::Counter u_count_;
    detail::Counter v_count_;
    detail::Counter alpha_count_;
};

namespace detail {

template <class Sampler>
McmcResult run_chain(Sampler& sampler, const McmcConfig& cfg, std::size_t n,
                     std::vector<std::string> unit_ids) {
    std::vector<double> out;
    out.reserve(cfg.kept() * n);
    std::vector<double> row(n);
    for (std::size_t it = 0; it < cfg.iters; ++it) {
        sampler.sweep();
        if (it >= cfg.burnin && (it - cfg.burnin) % cfg.thin == 0) {
            sampler.relative_risks(row);
            out.insert(out.end(), row.begin(), row.end());
        }
    }
    const std::size_t kept = out.size() / n;
    return {PosteriorDrawMatrix(kept, n, std::move(out), std::move(unit_ids)),
            sampler.acceptance()};
}

}  // namespace detail

inline McmcResult pln_mcmc(const PoissonLogNormalSpec& spec,
                           std::vector<std::string> unit_ids = {}) {
    PoissonLogNormalSampler sampler(spec);
    return detail::run_chain(sampler, sampler.spec().mcmc, spec.y.size(), std::move(unit_ids));
}

inline McmcResult bym_mcmc(const BymSpec& spec, std::vector<std::string> unit_ids = {}) {
    BymSampler sampler(spec);
    return detail::run_chain(sampler, sampler.spec().mcmc, spec.y.size(), std::move(unit_ids));
}

// --------------------------------------------------------------------- MLE

enum class ModelKind { normal_normal, gamma_inverse_gamma, poisson };

/// N-N: y_i.  G-IG: y_i / a_i.  Poisson: y_i / E_i (SMRs).
inline Ensemble model_mle(ModelKind kind, std::span<const double> y,
                          std::span<const double> scale = {}) {
    require(!y.empty(), ErrorKind::domain, "no observations");
    if (kind == ModelKind::normal_normal) return {y.begin(), y.end()};
    require(scale.size() == y.size(), ErrorKind::dimension,
            "MLE denominators do not match the observations");
    Ensemble out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (scale[i] == 0.0) {
            fail(ErrorKind::domain, "division by zero in MLE for unit " + std::to_string(i + 1));
        }
        out[i] = y[i] / scale[i];
    }
    return out;
}

}  // namespace ed
