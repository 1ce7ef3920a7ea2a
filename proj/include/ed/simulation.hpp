#pragma once

// Synthetic data generators: the non-spatial Normal-Normal / Gamma-Inverse-
// Gamma design indexed by sampling-variance heterogeneity (RLS), and four
// spatial risk surfaces on a lattice map with multinomial or Poisson counts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "ed/ensemble_core.hpp"
#include "ed/graph.hpp"
#include "ed/parallel.hpp"
#include "ed/rng.hpp"

namespace ed {

struct SimulatedDataset {
    Ensemble theta;         // true parameter ensemble
    std::vector<double> y;  // observations (counts for spatial data)
    std::vector<double> E;  // N-N: sigma^2; G-IG: a; spatial: expected counts (scaled by SF)
    std::string provenance;
    std::vector<std::vector<std::size_t>> elevated_groups;  // SC1/SC2 only
};

// ---------------------------------------------------------------- non-spatial

enum class NonSpatialModel { nn, gig };

/// Half-width C_l of the log-uniform sampling-scale design for the
/// nominal RLS levels 1, 20 and 100.
inline double rls_half_width(int rls) {
    switch (rls) {
        case 1: return 0.01;
        case 20: return 1.5;
        case 100: return 2.3;
        default: fail(ErrorKind::validation, "RLS level must be one of 1, 20, 100");
    }
}

struct NonSpatialScenario {
    NonSpatialModel model = NonSpatialModel::nn;
    std::size_t n = 100;
    double half_width = 0.01;  // C_l
    std::size_t replicates = 1;
    std::uint64_t seed = 1;
    double alpha0 = 4.0;  // G-IG prior on theta
    double beta0 = 3.0;

    void validate() const {
        require(n >= 1, ErrorKind::validation, "n must be >= 1");
        require(half_width >= 0.0 && std::isfinite(half_width), ErrorKind::validation,
                "C_l must be finite and >= 0");
        require(alpha0 > 0.0 && beta0 > 0.0, ErrorKind::validation,
                "Inverse-Gamma parameters must be positive");
    }
};

/// Ratio of the largest to the smallest entry.
inline double ratio_largest_smallest(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

inline SimulatedDataset gen_nonspatial_replicate(const NonSpatialScenario& sc, std::size_t r) {
    sc.validate();
    auto rng = make_rng(sc.seed, r);
    SimulatedDataset d;
    d.theta.resize(sc.n);
    d.y.resize(sc.n);
    d.E.resize(sc.n);
    for (std::size_t i = 0; i < sc.n; ++i) {
        // exp(U(-C, C)); C = 0 gives exactly 1
        d.E[i] = std::exp(draw_uniform(rng, -sc.half_width, sc.half_width));
    }
    for (std::size_t i = 0; i < sc.n; ++i) {
        if (sc.model == NonSpatialModel::nn) {
            d.theta[i] = draw_normal(rng, 0.0, 1.0);
            d.y[i] = draw_normal(rng, d.theta[i], std::sqrt(d.E[i]));
        } else {
            d.theta[i] = draw_inverse_gamma(rng, sc.alpha0, sc.beta0);
            d.y[i] = draw_gamma(rng, d.E[i], 1.0 / d.theta[i]);
        }
    }
    std::ostringstream os;
    os << (sc.model == NonSpatialModel::nn ? "nn" : "gig") << " n=" << sc.n
       << " C_l=" << sc.half_width << " seed=" << sc.seed << " replicate=" << r;
    d.provenance = os.str();
    return d;
}

inline std::vector<SimulatedDataset> gen_nonspatial(const NonSpatialScenario& sc,
                                                    std::size_t threads = thread_budget()) {
    sc.validate();
    std::vector<SimulatedDataset> out(sc.replicates);
    parallel_for(
        sc.replicates, [&](std::size_t r) { out[r] = gen_nonspatial_replicate(sc, r); }, threads);
    return out;
}

// ------------------------------------------------------------------ geometry

struct SpatialGeometry {
    AdjacencyGraph graph;
    std::vector<Point2> centroids;
    std::vector<double> E;
};

/// Log-normal expected counts with mean about 42, clamped to [7.97, 114.35].
inline std::vector<double> lognormal_expected_counts(std::size_t n, std::uint64_t seed,
                                                     double mean = 42.0, double log_sd = 0.45) {
    auto rng = make_rng(seed, 0x45);
    const double mu = std::log(mean) - 0.5 * log_sd * log_sd;
    std::vector<double> E(n);
    for (auto& e : E) e = std::clamp(std::exp(draw_normal(rng, mu, log_sd)), 7.97, 114.35);
    return E;
}

inline SpatialGeometry make_lattice_geometry(std::size_t k = 13, std::uint64_t seed = 1) {
    auto lat = make_lattice(k);
    auto E = lognormal_expected_counts(k * k, seed);
    return {std::move(lat.graph), std::move(lat.centroids), std::move(E)};
}

/// Mean centroid distance over neighbouring pairs.
inline double mean_neighbor_distance(const AdjacencyGraph& g, std::span<const Point2> c) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j : g.neighbors(i)) {
            total += std::hypot(c[i].x - c[j].x, c[i].y - c[j].y);
            ++count;
        }
    }
    require(count > 0, ErrorKind::validation, "graph has no edges");
    return total / static_cast<double>(count);
}

// -------------------------------------------------------------------- Matérn

/// (2^{nu-1} Gamma(nu))^{-1} x^nu K_nu(x) with x = 2 sqrt(nu) d phi.
inline double matern_correlation(double d, double nu, double phi) {
    require(nu > 1.0 && phi > 0.0, ErrorKind::domain, "Matern needs nu > 1 and phi > 0");
    require(d >= 0.0 && std::isfinite(d), ErrorKind::domain, "distance must be finite and >= 0");
    if (d == 0.0) return 1.0;
    const double x = 2.0 * std::sqrt(nu) * d * phi;
    if (x < 1e-2) return 1.0 - x * x / (4.0 * (nu - 1.0));
    const double k = std::cyl_bessel_k(nu, x);
    if (k == 0.0) return 0.0;
    const double log_c =
        nu * std::log(x) + std::log(k) - (nu - 1.0) * std::log(2.0) - std::lgamma(nu);
    return std::min(1.0, std::exp(log_c));
}

inline Eigen::MatrixXd matern_cov(std::span<const Point2> c, double nu, double phi) {
    const auto n = static_cast<Eigen::Index>(c.size());
    Eigen::MatrixXd S(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        S(i, i) = 1.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double d = std::hypot(c[i].x - c[j].x, c[i].y - c[j].y);
            S(i, j) = S(j, i) = matern_correlation(d, nu, phi);
        }
    }
    return S;
}

struct CholeskyFactor {
    Eigen::MatrixXd L;
    double jitter = 0.0;
};

/// Lower Cholesky factor of S + jitter*I, escalating jitter up to 1e-8.
inline CholeskyFactor cholesky_with_jitter(const Eigen::MatrixXd& S) {
    const auto n = S.rows();
    for (double jitter : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
        Eigen::LLT<Eigen::MatrixXd> llt(S + jitter * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) {
            Eigen::MatrixXd L = llt.matrixL();
            if (L.allFinite()) return {std::move(L), jitter};
        }
    }
    fail(ErrorKind::numerical, "covariance not positive definite after 1e-8 diagonal jitter");
}

inline std::vector<double> draw_mvn(Rng& rng, const Eigen::MatrixXd& L, double scale = 1.0) {
    const auto n = L.rows();
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = draw_normal(rng, 0.0, 1.0);
    const Eigen::VectorXd x = scale * (L * z);
    return {x.data(), x.data() + n};
}

// -------------------------------------------------------------------- counts

enum class CountModel { automatic, multinomial, poisson };

/// Multinomial counts with N = round(sum(E)*SF) trials and cell
/// probabilities proportional to E_i theta_i.
inline std::vector<double> multinomial_counts(std::span<const double> theta,
                                              std::span<const double> E, double sf,
                                              std::uint64_t seed) {
    require(theta.size() == E.size() && !E.empty(), ErrorKind::dimension,
            "theta and E differ in length");
    require(sf > 0.0, ErrorKind::validation, "SF must be positive");
    std::vector<double> w(E.size());
    for (std::size_t i = 0; i < E.size(); ++i) {
        require(theta[i] > 0.0 && E[i] > 0.0, ErrorKind::domain, "theta and E must be positive");
        w[i] = E[i] * theta[i];
    }
    const double total = std::accumulate(E.begin(), E.end(), 0.0) * sf;
    auto rng = make_rng(seed, 0x6d);
    const auto counts = draw_multinomial(rng, std::llround(total), w);
    return {counts.begin(), counts.end()};
}

inline std::vector<double> poisson_counts(std::span<const double> theta,
                                          std::span<const double> E, double sf,
                                          std::uint64_t seed) {
    require(theta.size() == E.size(), ErrorKind::dimension, "theta and E differ in length");
    auto rng = make_rng(seed, 0x70);
    std::vector<double> y(E.size());
    for (std::size_t i = 0; i < E.size(); ++i) {
        y[i] = static_cast<double>(draw_poisson(rng, theta[i] * E[i] * sf));
    }
    return y;
}

// ------------------------------------------------------------ spatial design

enum class SpatialKind { sc1, sc2, sc3, sc4 };
enum class RiskLevel { low, med, high };

struct SpatialScenario {
    SpatialKind kind = SpatialKind::sc1;
    RiskLevel level = RiskLevel::med;
    double sf = 1.0;
    CountModel counts = CountModel::automatic;
    /// Replaces the level's LR / sigma / beta when set.
    std::optional<double> parameter;
    double nu = 40.0;
    /// Matérn range; defaults to 1 / (mean neighbour distance).
    std::optional<double> phi;
    double sc4_sd = 0.1;
    std::optional<std::vector<double>> covariate;  // SC4
    std::size_t buffer_hops = 2;
    std::uint64_t seed = 1;

    [[nodiscard]] double risk_parameter() const {
        if (parameter) return *parameter;
        const auto idx = static_cast<std::size_t>(level);
        switch (kind) {
            case SpatialKind::sc1:
            case SpatialKind::sc2: return std::array{1.5, 2.0, 3.0}[idx];
            case SpatialKind::sc3: return std::array{0.1, 0.2, 0.3}[idx];
            case SpatialKind::sc4: return std::array{0.2, 0.3, 0.4}[idx];
        }
        return 0.0;
    }

    [[nodiscard]] bool use_multinomial() const {
        if (counts == CountModel::automatic) return sf == 1.0;
        return counts == CountModel::multinomial;
    }
};

inline const char* to_string(SpatialKind k) {
    switch (k) {
        case SpatialKind::sc1: return "SC1";
        case SpatialKind::sc2: return "SC2";
        case SpatialKind::sc3: return "SC3";
        case SpatialKind::sc4: return "SC4";
    }
    return "?";
}

namespace detail {

inline constexpr int kSeedRetries = 100;

/// Grows a cluster from `seed` by breadth-first accretion of unblocked
/// first-degree neighbours. With `stop_at_or_above` the last area may
/// overshoot the target mass; otherwise areas that would exceed it are
/// skipped.
inline std::vector<std::size_t> accrete(const AdjacencyGraph& g, std::span<const double> E,
                                        std::size_t seed, double target,
                                        const std::vector<char>& blocked, bool stop_at_or_above) {
    std::vector<std::size_t> cluster{seed};
    std::vector<char> in(g.size(), 0);
    in[seed] = 1;
    double mass = E[seed];
    for (std::size_t head = 0; head < cluster.size() && mass < target; ++head) {
        for (std::size_t j : g.neighbors(cluster[head])) {
            if (in[j] || blocked[j]) continue;
            if (!stop_at_or_above && mass + E[j] > target) continue;
            in[j] = 1;
            cluster.push_back(j);
            mass += E[j];
            if (mass >= target) break;
        }
    }
    std::sort(cluster.begin(), cluster.end());
    return cluster;
}

inline double mass_of(std::span<const double> E, std::span<const std::size_t> idx) {
    double m = 0.0;
    for (auto i : idx) m += E[i];
    return m;
}

/// Blocks every area within `hops` of the group.
inline void block_around(const AdjacencyGraph& g, std::span<const std::size_t> group,
                         std::size_t hops, std::vector<char>& blocked) {
    for (auto i : group) {
        const auto dist = g.hops_from(i);
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (dist[j] <= hops) blocked[j] = 1;
        }
    }
}

inline std::vector<std::vector<std::size_t>> sc1_groups(const SpatialGeometry& geo, Rng& rng) {
    const double total = std::accumulate(geo.E.begin(), geo.E.end(), 0.0);
    const std::vector<char> none(geo.graph.size(), 0);
    std::uniform_int_distribution<std::size_t> pick(0, geo.graph.size() - 1);
    for (int attempt = 0; attempt < kSeedRetries; ++attempt) {
        auto cluster = accrete(geo.graph, geo.E, pick(rng), 0.05 * total, none, true);
        const double share = mass_of(geo.E, cluster) / total;
        if (share >= 0.03 && share <= 0.07) return {std::move(cluster)};
    }
    fail(ErrorKind::degenerate,
         "infeasible scenario: no cluster with 3-7% of the expected counts after 100 seeds");
}

inline std::vector<std::vector<std::size_t>> sc2_groups(const SpatialGeometry& geo,
                                                        std::size_t buffer, Rng& rng) {
    const auto& g = geo.graph;
    const std::size_t n = g.size();
    const double total = std::accumulate(geo.E.begin(), geo.E.end(), 0.0);
    std::vector<char> blocked(n, 0);
    std::vector<std::vector<std::size_t>> groups;

    // Singletons at the E percentiles; an excluded pick moves to the
    // nearest available area in E order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return geo.E[a] < geo.E[b]; });
    for (double pct : {0.10, 0.20, 0.50, 0.75, 0.90}) {
        const auto target = static_cast<std::ptrdiff_t>(
            std::ceil(pct * static_cast<double>(n)) - 1.0);
        std::optional<std::size_t> chosen;
        for (std::ptrdiff_t off = 0; off < static_cast<std::ptrdiff_t>(n) && !chosen; ++off) {
            for (std::ptrdiff_t pos : {target + off, target - off}) {
                if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(n) &&
                    !blocked[order[static_cast<std::size_t>(pos)]]) {
                    chosen = order[static_cast<std::size_t>(pos)];
                    break;
                }
            }
        }
        if (!chosen) fail(ErrorKind::degenerate, "infeasible scenario: no room for singleton areas");
        groups.push_back({*chosen});
        block_around(g, groups.back(), buffer, blocked);
    }

    for (int c = 0; c < 5; ++c) {
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i) {
            if (!blocked[i]) free.push_back(i);
        }
        if (free.empty()) {
            fail(ErrorKind::degenerate,
                 "infeasible scenario: graph too small to host 5 buffered clusters");
        }
        std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
        std::vector<std::size_t> best;
        for (int attempt = 0; attempt < kSeedRetries; ++attempt) {
            auto cluster = accrete(g, geo.E, free[pick(rng)], 0.05 * total, blocked, false);
            if (cluster.size() > best.size()) best = std::move(cluster);
            if (best.size() > 1) break;
        }
        groups.push_back(best);
        block_around(g, groups.back(), buffer, blocked);
    }
    return groups;
}

}  // namespace detail

inline SimulatedDataset gen_spatial(const SpatialScenario& sc, const SpatialGeometry& geo) {
    const std::size_t n = geo.graph.size();
    require(n >= 1 && geo.E.size() == n && geo.centroids.size() == n, ErrorKind::dimension,
            "geometry: graph, centroids and E must agree in size");
    require(sc.sf > 0.0, ErrorKind::validation, "SF must be positive");
    for (double e : geo.E) require(e > 0.0, ErrorKind::domain, "expected counts must be positive");

    auto rng = make_rng(sc.seed, 0x5c);
    const double param = sc.risk_parameter();
    SimulatedDataset d;
    d.theta.assign(n, 1.0);
    std::ostringstream prov;
    prov << to_string(sc.kind) << " parameter=" << param << " SF=" << sc.sf
         << " seed=" << sc.seed;

    switch (sc.kind) {
        case SpatialKind::sc1:
        case SpatialKind::sc2: {
            require(param > 0.0, ErrorKind::validation, "LR must be positive");
            d.elevated_groups = sc.kind == SpatialKind::sc1
                                    ? detail::sc1_groups(geo, rng)
                                    : detail::sc2_groups(geo, sc.buffer_hops, rng);
            for (const auto& grp : d.elevated_groups) {
                for (auto i : grp) d.theta[i] = param;
            }
            prov << " buffer=" << sc.buffer_hops << "-hop";
            break;
        }
        case SpatialKind::sc3: {
            require(param >= 0.0, ErrorKind::validation, "SC3 sigma must be >= 0");
            const double phi = sc.phi.value_or(1.0 / mean_neighbor_distance(geo.graph, geo.centroids));
            const auto f = cholesky_with_jitter(matern_cov(geo.centroids, sc.nu, phi));
            const auto z = draw_mvn(rng, f.L, param);
            for (std::size_t i = 0; i < n; ++i) d.theta[i] = std::exp(z[i]);
            prov << " nu=" << sc.nu << " phi=" << phi << " jitter=" << f.jitter;
            break;
        }
        case SpatialKind::sc4: {
            std::vector<double> cov;
            if (sc.covariate) {
                require(sc.covariate->size() == n, ErrorKind::dimension,
                        "covariate length does not match the map");
                cov = *sc.covariate;
            } else {
                auto crng = make_rng(sc.seed, 0xc0);
                cov.resize(n);
                for (auto& c : cov) c = draw_normal(crng, 0.0, 1.0);
            }
            for (std::size_t i = 0; i < n; ++i) {
                d.theta[i] = std::exp(param * cov[i] + draw_normal(rng, 0.0, sc.sc4_sd));
            }
            prov << " covariate=" << (sc.covariate ? "supplied" : "synthetic-normal");
            break;
        }
    }

    const bool multinomial = sc.use_multinomial();
    d.y = multinomial ? multinomial_counts(d.theta, geo.E, sc.sf, sc.seed)
                      : poisson_counts(d.theta, geo.E, sc.sf, sc.seed);
    d.E.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.E[i] = geo.E[i] * sc.sf;
    prov << " counts=" << (multinomial ? "multinomial" : "poisson");
    d.provenance = prov.str();
    return d;
}

/// True when no two elevated groups touch or share an area.
inline bool groups_non_adjacent(const AdjacencyGraph& g,
                                const std::vector<std::vector<std::size_t>>& groups) {
    for (std::size_t a = 0; a < groups.size(); ++a) {
        for (std::size_t b = a + 1; b < groups.size(); ++b) {
            for (auto i : groups[a]) {
                for (auto j : groups[b]) {
                    if (i == j || g.adjacent(i, j)) return false;
                }
            }
        }
    }
    return true;
}

}  // namespace ed
