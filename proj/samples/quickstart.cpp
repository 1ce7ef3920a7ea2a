// Minimal end-to-end use of the library: simulate a Normal-Normal ensemble,
// draw from its posterior, and compare estimators under Q-SEL and TCL.
#include <cstdio>

#include "ed/ed.hpp"

int main() {
    ed::NonSpatialScenario sc;
    sc.n = 100;
    sc.half_width = ed::rls_half_width(20);
    sc.seed = 11;
    const auto data = ed::gen_nonspatial_replicate(sc, 0);

    const ed::NormalNormalSpec prior{0.0, 1.0, data.E};
    const auto draws = ed::nn_posterior_draws(prior, data.y, 2000, 12);

    const std::vector<ed::EnsembleEstimate> candidates{
        ed::ssel_estimate(draws), ed::cb_estimate(draws), ed::gr_estimate(draws),
        ed::mle_passthrough(data.y, draws.units())};

    const ed::QselSpec quartiles;
    for (const auto& c : candidates) {
        const auto r = ed::qsel_regret(draws, quartiles, c);
        std::printf("%-6s Q-SEL regret %.3g (%.1f%%)\n", r.rule.c_str(), r.regret, r.percent_regret);
    }
    const auto rule = ed::ThresholdRule::unweighted(1.0);
    for (const auto& r : ed::tcl_regrets(draws, rule, candidates)) {
        std::printf("%-6s TCL   regret %.3g (%.1f%%)\n", r.rule.c_str(), r.regret, r.percent_regret);
    }
}
