#pragma once

// `ed` command-line front end: simulate -> fit -> estimate -> classify /
// regret -> report. Kept in a header so tests can drive it in-process.
//
// Exit codes: 0 ok, 2 validation / parse / domain / dimension errors,
// 3 numerical or degenerate failures.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ed/ed.hpp"

namespace ed::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::numerical:
        case ErrorKind::degenerate: return 3;
        default: return 2;
    }
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

inline double to_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    fail(ErrorKind::validation, "bad number for " + what + ": '" + s + "'");
}

// ---------------------------------------------------------------- config

/// Expands `--config file.json` into ordinary flags. Keys are long option
/// names without dashes; flags given on the command line win. Unknown keys
/// are rejected.
inline std::vector<std::string> expand_config(const CLI::App& sub, std::vector<std::string> args) {
    auto it = std::find(args.begin(), args.end(), "--config");
    if (it == args.end()) return args;
    if (it + 1 == args.end()) fail(ErrorKind::validation, "--config needs a file");
    const fs::path path = *(it + 1);
    args.erase(it, it + 2);

    json cfg;
    try {
        cfg = json::parse(io::read_text(path));
    } catch (const json::parse_error& e) {
        fail(ErrorKind::parse, path.string() + ": " + e.what());
    }
    if (!cfg.is_object()) fail(ErrorKind::validation, path.string() + ": config must be an object");

    auto given = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        const auto* opt = sub.get_option_no_throw(flag);
        if (!opt || key == "config") {
            fail(ErrorKind::validation, path.string() + ": unknown config key '" + key + "'");
        }
        if (given(flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
            continue;
        }
        std::string text;
        if (value.is_array()) {
            for (const auto& v : value) {
                if (!text.empty()) text += ',';
                text += v.is_string() ? v.get<std::string>() : v.dump();
            }
        } else if (value.is_string()) {
            text = value.get<std::string>();
        } else if (value.is_number()) {
            text = value.dump();
        } else {
            fail(ErrorKind::validation, path.string() + ": unsupported value for '" + key + "'");
        }
        args.push_back(flag);
        args.push_back(text);
    }
    return args;
}

// ------------------------------------------------------------ estimates

struct DataOptions {
    std::string model = "pln";  // nn | gig | pln | bym (MLE denominators)
    std::string data;            // dataset or counts CSV
};

inline Ensemble mle_from_data(const DataOptions& d) {
    const auto t = io::read_table(d.data, true);
    const auto y = t.column("y", true);
    const auto scale = t.column("E", true);
    const auto m = lower(d.model);
    if (m == "nn") return model_mle(ModelKind::normal_normal, y);
    if (m == "gig") return model_mle(ModelKind::gamma_inverse_gamma, y, scale);
    if (m == "pln" || m == "bym" || m == "poisson") return model_mle(ModelKind::poisson, y, scale);
    fail(ErrorKind::validation, "unknown model '" + d.model + "'");
}

struct RuleOptions {
    std::optional<double> a1;
    std::optional<double> a2;
    std::string harness = "none";  // nonspatial | spatial | none (WRSEL defaults)

    [[nodiscard]] std::pair<double, double> wrsel_params() const {
        double def = 0.1;
        if (harness == "nonspatial") def = 0.05;
        else if (harness == "spatial") def = 0.5;
        else require(harness == "none", ErrorKind::validation, "unknown harness '" + harness + "'");
        return {a1.value_or(def), a2.value_or(a1.value_or(def))};
    }
};

/// Parses "ssel", "med", "quant:0.8", "wrsel", "wrsel:0.05:0.05", "cb", "gr", "mle".
inline EstimateRule parse_rule(const std::string& token, const RuleOptions& opts) {
    const auto parts = split(lower(token), ':');
    require(!parts.empty(), ErrorKind::validation, "empty estimator name");
    const auto& name = parts[0];
    if (name == "ssel" || name == "mean") return EstimateRule::ssel();
    if (name == "med" || name == "median") return EstimateRule::med();
    if (name == "cb") return EstimateRule::cb();
    if (name == "gr") return EstimateRule::gr();
    if (name == "mle") return EstimateRule::mle();
    if (name == "quant") {
        require(parts.size() == 2, ErrorKind::validation, "use quant:<q>");
        return EstimateRule::quant(to_number(parts[1], "quant"));
    }
    if (name == "wrsel") {
        auto [a1, a2] = opts.wrsel_params();
        if (parts.size() >= 2) a1 = a2 = to_number(parts[1], "wrsel a1");
        if (parts.size() >= 3) a2 = to_number(parts[2], "wrsel a2");
        return EstimateRule::wrsel(a1, a2);
    }
    fail(ErrorKind::validation, "unknown estimator '" + token + "'");
}

inline EnsembleEstimate compute_rule(const PosteriorDrawMatrix& m, const EstimateRule& rule,
                                     const DataOptions& data) {
    switch (rule.kind) {
        case RuleKind::ssel: return ssel_estimate(m);
        case RuleKind::med:
        case RuleKind::quant: {
            auto e = posterior_quantile_estimate(m, rule.q);
            e.rule = rule;
            return e;
        }
        case RuleKind::wrsel: return wrsel_estimate(m, rule.a1, rule.a2);
        case RuleKind::cb: return cb_estimate(m);
        case RuleKind::gr: return gr_estimate(m);
        case RuleKind::mle:
            require(!data.data.empty(), ErrorKind::validation,
                    "the MLE candidate needs --data (or an MLE column in --estimates)");
            return mle_passthrough(mle_from_data(data), m.units());
    }
    fail(ErrorKind::validation, "unsupported rule");
}

/// Candidate ensembles: a matching column of --estimates wins, otherwise
/// the rule is computed from the draws.
inline std::vector<EnsembleEstimate> resolve_candidates(const PosteriorDrawMatrix& m,
                                                        const std::vector<std::string>& names,
                                                        const RuleOptions& ropts,
                                                        const DataOptions& data,
                                                        const std::string& estimates_path) {
    std::map<std::string, std::vector<double>> supplied;
    if (!estimates_path.empty()) {
        for (auto& [k, v] : io::read_estimates(estimates_path)) supplied[lower(k)] = std::move(v);
    }
    std::vector<EnsembleEstimate> out;
    for (const auto& name : names) {
        const auto rule = parse_rule(name, ropts);
        if (auto it = supplied.find(lower(rule.label())); it != supplied.end()) {
            require(it->second.size() == m.units(), ErrorKind::dimension,
                    "estimates column " + rule.label() + " does not match the draw matrix");
            out.push_back({it->second, rule});
        } else {
            out.push_back(compute_rule(m, rule, data));
        }
    }
    return out;
}

inline LossReport optimal_row(const std::string& loss, double optimal) {
    return make_loss_report(loss, "optimal", optimal, optimal);
}

// ------------------------------------------------------------ subcommands

struct SimulateOpts {
    std::string scenario = "nn";
    std::size_t n = 100;
    int rls = 1;
    std::optional<double> cl;
    std::size_t reps = 1;
    std::uint64_t seed = 1;
    std::string out = "sim";
    std::string level = "med";
    double sf = 1.0;
    std::size_t lattice = 13;
    std::optional<double> param;
    std::optional<double> phi;
    std::string counts = "auto";
};

inline int run_simulate(const SimulateOpts& o) {
    const auto kind = lower(o.scenario);
    const fs::path dir = o.out;
    if (kind == "nn" || kind == "gig") {
        NonSpatialScenario sc;
        sc.model = kind == "nn" ? NonSpatialModel::nn : NonSpatialModel::gig;
        sc.n = o.n;
        sc.half_width = o.cl ? *o.cl : rls_half_width(o.rls);
        sc.replicates = o.reps;
        sc.seed = o.seed;
        const auto sets = gen_nonspatial(sc);
        const auto ids = io::default_ids(sc.n);
        for (std::size_t r = 0; r < sets.size(); ++r) {
            io::write_dataset(dir / ("dataset_" + std::to_string(r + 1) + ".csv"), sets[r], ids);
        }
        std::cout << "wrote " << sets.size() << " dataset(s) to " << dir.string() << "\n";
        return 0;
    }

    SpatialScenario sc;
    if (kind == "sc1") sc.kind = SpatialKind::sc1;
    else if (kind == "sc2") sc.kind = SpatialKind::sc2;
    else if (kind == "sc3") sc.kind = SpatialKind::sc3;
    else if (kind == "sc4") sc.kind = SpatialKind::sc4;
    else fail(ErrorKind::validation, "unknown scenario '" + o.scenario + "'");
    const auto lvl = lower(o.level);
    if (lvl == "low") sc.level = RiskLevel::low;
    else if (lvl == "med") sc.level = RiskLevel::med;
    else if (lvl == "high") sc.level = RiskLevel::high;
    else fail(ErrorKind::validation, "level must be low, med or high");
    const auto cm = lower(o.counts);
    if (cm == "auto") sc.counts = CountModel::automatic;
    else if (cm == "multinomial") sc.counts = CountModel::multinomial;
    else if (cm == "poisson") sc.counts = CountModel::poisson;
    else fail(ErrorKind::validation, "counts must be auto, multinomial or poisson");
    sc.sf = o.sf;
    sc.parameter = o.param;
    sc.phi = o.phi;

    const auto geo = make_lattice_geometry(o.lattice, o.seed);
    const auto ids = io::default_ids(geo.graph.size());
    io::write_adjacency(dir / "adjacency.txt", geo.graph);
    std::vector<json> meta(o.reps);
    parallel_for(o.reps, [&](std::size_t r) {
        auto local = sc;
        local.seed = make_rng(o.seed, r + 1)();
        const auto d = gen_spatial(local, geo);
        io::write_dataset(dir / ("dataset_" + std::to_string(r + 1) + ".csv"), d, ids);
        meta[r] = {{"replicate", r + 1}, {"provenance", d.provenance}, {"elevated_groups", json::array()}};
        for (const auto& g : d.elevated_groups) {
            json grp = json::array();
            for (auto i : g) grp.push_back(i + 1);
            meta[r]["elevated_groups"].push_back(grp);
        }
    });
    io::write_text_atomic(dir / "provenance.json", json(meta).dump(2) + "\n");
    std::cout << "wrote " << o.reps << " dataset(s) to " << dir.string() << "\n";
    return 0;
}

struct FitOpts {
    std::string model = "nn";
    std::string data;
    std::string adjacency;
    std::string out = "draws.csv";
    std::size_t draws = 2000;
    std::uint64_t seed = 1;
    double mu0 = 0.0;
    double tau0sq = 1.0;
    double alpha0 = 4.0;
    double beta0 = 3.0;
    std::optional<std::size_t> iters;
    std::optional<std::size_t> burnin;
    std::size_t thin = 1;
    double proposal_sd = 0.3;
    double alpha_proposal_sd = 0.3;
};

inline int run_fit(const FitOpts& o) {
    const auto t = io::read_table(o.data, true);
    const auto y = t.column("y", true);
    const auto E = t.column("E", true);
    const auto model = lower(o.model);
    PosteriorDrawMatrix m(1, 1, {0.0});
    json summary{{"model", model}};

    auto mcmc = [&](McmcConfig base) {
        if (o.iters) base.iters = *o.iters;
        if (o.burnin) base.burnin = *o.burnin;
        base.thin = o.thin;
        base.proposal_sd = o.proposal_sd;
        base.alpha_proposal_sd = o.alpha_proposal_sd;
        base.seed = o.seed;
        return base;
    };

    if (model == "nn") {
        NormalNormalSpec spec{o.mu0, o.tau0sq, E};
        m = nn_posterior_draws(spec, y, o.draws, o.seed);
    } else if (model == "gig") {
        GammaInvGammaSpec spec{o.alpha0, o.beta0, E};
        m = gig_posterior_draws(spec, y, o.draws, o.seed);
    } else if (model == "pln") {
        PoissonLogNormalSpec spec;
        spec.y = y;
        spec.E = E;
        spec.mcmc = mcmc(spec.mcmc);
        auto res = pln_mcmc(spec, t.ids);
        m = std::move(res.draws);
        summary["acceptance"] = {{"v", res.acceptance.v}, {"alpha", res.acceptance.alpha}};
    } else if (model == "bym") {
        require(!o.adjacency.empty(), ErrorKind::validation, "bym needs --adjacency");
        BymSpec spec;
        spec.y = y;
        spec.E = E;
        spec.graph = io::read_adjacency(o.adjacency);
        spec.mcmc = mcmc(spec.mcmc);
        auto res = bym_mcmc(spec, t.ids);
        m = std::move(res.draws);
        summary["acceptance"] = {
            {"v", res.acceptance.v}, {"u", res.acceptance.u}, {"alpha", res.acceptance.alpha}};
    } else {
        fail(ErrorKind::validation, "unknown model '" + o.model + "'");
    }
    if (model == "nn" || model == "gig") m = PosteriorDrawMatrix(m.draws(), m.units(),
                                                                 {m.values().begin(), m.values().end()}, t.ids);
    io::write_draws(o.out, m);
    summary["draws"] = m.draws();
    summary["units"] = m.units();
    std::cout << summary.dump() << "\n";
    return 0;
}

struct EstimateOpts {
    std::string draws;
    std::string rules = "ssel,cb,gr";
    std::string out = "estimates.csv";
    RuleOptions rule_opts;
    DataOptions data;
};

inline int run_estimate(const EstimateOpts& o) {
    const auto m = io::read_draws(o.draws);
    std::vector<EnsembleEstimate> est;
    for (const auto& name : split(o.rules, ',')) {
        est.push_back(compute_rule(m, parse_rule(name, o.rule_opts), o.data));
    }
    require(!est.empty(), ErrorKind::validation, "no estimators requested");
    io::write_estimates(o.out, m.unit_ids(), est);
    std::cout << "wrote " << est.size() << " estimate column(s) to " << o.out << "\n";
    return 0;
}

inline Direction parse_direction(const std::string& s) {
    const auto d = lower(s);
    if (d == "above") return Direction::above;
    if (d == "below") return Direction::below;
    fail(ErrorKind::validation, "direction must be above or below");
}

inline json rates_json(const BayesRates& r) {
    return {{"tpr", r.tpr ? json(*r.tpr) : json(nullptr)},
            {"tnr", r.tnr ? json(*r.tnr) : json(nullptr)}};
}

struct ClassifyOpts {
    std::string draws;
    std::string loss = "tcl";
    double C = 1.0;
    std::optional<double> p;
    std::string direction = "above";
    double gamma = 0.8;
    std::string out = "classification.csv";
};

inline int run_classify(const ClassifyOpts& o) {
    const auto m = io::read_draws(o.draws);
    const auto loss = lower(o.loss);
    std::string csv = "unit,allocated,probability\n";
    json summary{{"loss", loss}};
    const auto& ids = m.unit_ids();
    if (loss == "tcl") {
        const auto dir = parse_direction(o.direction);
        const auto rule = o.p ? ThresholdRule::weighted(o.C, *o.p, dir)
                              : ThresholdRule::unweighted(o.C, dir);
        const auto pr = threshold_probabilities(m, rule);
        const auto best = optimal_tcl(m, rule);
        const auto& pos = dir == Direction::above ? pr.above : pr.below;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            csv += ids[i] + "," + (rule.positive(best.values[i]) ? "1" : "0") + "," +
                   io::format_double(pos[i]) + "\n";
        }
        summary["C"] = o.C;
        summary["p"] = o.p ? json(*o.p) : json(nullptr);
        summary["direction"] = lower(o.direction);
        summary["expected_loss"] = posterior_expected_tcl(pr, rule, best.values);
        summary["rates"] = rates_json(bayes_rates(pr, rule, best.values));
    } else if (loss == "rcl") {
        const RankRule rule{o.gamma};
        rule.validate();
        const auto pr = rank_exceedance_probabilities(m, rule);
        const auto best = optimal_rcl(m, rule);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            csv += ids[i] + "," + (best.percentiles[i] > rule.gamma ? "1" : "0") + "," +
                   io::format_double(pr.above[i]) + "\n";
        }
        summary["gamma"] = o.gamma;
        summary["expected_loss"] = posterior_expected_rcl(pr, rule, best.percentiles);
        summary["rates"] = rates_json(bayes_rates(pr, rule, best.percentiles));
    } else {
        fail(ErrorKind::validation, "classify --loss must be tcl or rcl");
    }
    io::write_text_atomic(o.out, csv);
    fs::path jpath = o.out;
    jpath.replace_extension(".json");
    io::write_text_atomic(jpath, summary.dump(2) + "\n");
    std::cout << summary.dump() << "\n";
    return 0;
}

struct RegretOpts {
    std::string draws;
    std::string loss = "qsel";
    std::string p;  // qsel: probability list; tcl: single weight
    std::string scale = "natural";
    std::string candidates = "ssel,cb,gr";
    std::string estimates;
    double C = 1.0;
    std::string direction = "above";
    double gamma = 0.8;
    std::string out = "regret.csv";
    RuleOptions rule_opts;
    DataOptions data;
};

inline int run_regret(const RegretOpts& o) {
    const auto m = io::read_draws(o.draws);
    const auto loss = lower(o.loss);
    std::vector<std::string> names = split(o.candidates, ',');
    // Quartile plug-ins are scalars, not ensembles.
    bool ropq_requested = false;
    bool dopq_requested = false;
    std::erase_if(names, [&](const std::string& n) {
        const auto l = lower(n);
        ropq_requested |= l == "ropq";
        dopq_requested |= l == "dopq";
        return l == "ropq" || l == "dopq";
    });
    const auto cands = resolve_candidates(m, names, o.rule_opts, o.data, o.estimates);
    std::vector<LossReport> rows;

    if (loss == "qsel") {
        QselSpec spec;
        if (!o.p.empty()) {
            spec.probs.clear();
            for (const auto& t : split(o.p, ',')) spec.probs.push_back(to_number(t, "--p"));
        }
        const auto scale = lower(o.scale) == "log" ? LossScale::log : LossScale::natural;
        require(lower(o.scale) == "log" || lower(o.scale) == "natural", ErrorKind::validation,
                "scale must be natural or log");
        const auto best = optimal_qsel_estimator(m, spec);
        const double opt = posterior_qsel(m, spec, best.values, scale);
        rows.push_back(optimal_row(scale == LossScale::log ? "Q-SEL(log)" : "Q-SEL", opt));
        for (const auto& c : cands) rows.push_back(qsel_regret(m, spec, c, scale));
    } else if (loss == "qrsel" || loss == "iqrsel" || loss == "dispersion") {
        const bool qr = loss == "qrsel" || (loss == "dispersion" && qr_applicable(m));
        if (qr) {
            detail::require_positive_draws(m);
            rows.push_back(optimal_row("QR-SEL", posterior_qrsel(m, optimal_qr(m))));
            for (const auto& c : cands) rows.push_back(qrsel_regret(m, c));
            if (ropq_requested) rows.push_back(qrsel_regret_value(m, ropq(m), "RoPQ"));
            require(!dopq_requested, ErrorKind::validation, "DoPQ is scored under IQR-SEL");
        } else {
            rows.push_back(optimal_row("IQR-SEL", posterior_iqrsel(m, optimal_iqr(m))));
            for (const auto& c : cands) rows.push_back(iqrsel_regret(m, c));
            if (dopq_requested || (ropq_requested && loss == "dispersion")) {
                rows.push_back(iqrsel_regret_value(m, dopq(m), "DoPQ"));
            }
            require(!(ropq_requested && loss == "iqrsel"), ErrorKind::validation,
                    "RoPQ is scored under QR-SEL");
        }
    } else if (loss == "tcl") {
        const auto dir = parse_direction(o.direction);
        const auto rule = o.p.empty() ? ThresholdRule::unweighted(o.C, dir)
                                      : ThresholdRule::weighted(o.C, to_number(o.p, "--p"), dir);
        const auto best = optimal_tcl(m, rule);
        rows.push_back(optimal_row(rule.p ? "TCL_p" : "TCL", posterior_expected_tcl(m, rule, best.values)));
        for (auto& r : tcl_regrets(m, rule, cands)) rows.push_back(std::move(r));
    } else if (loss == "rcl") {
        const RankRule rule{o.gamma};
        rule.validate();
        const auto best = optimal_rcl(m, rule);
        rows.push_back(optimal_row("RCL", posterior_expected_rcl(m, rule, best.percentiles)));
        for (auto& r : rcl_regrets(m, rule, cands)) rows.push_back(std::move(r));
    } else {
        fail(ErrorKind::validation, "unknown loss '" + o.loss + "'");
    }
    require(!(ropq_requested || dopq_requested) ||
                loss == "qrsel" || loss == "iqrsel" || loss == "dispersion",
            ErrorKind::validation, "RoPQ/DoPQ only apply to quartile-ratio losses");

    io::write_reports(o.out, rows);
    for (const auto& r : rows) {
        std::printf("%-10s %-16s %14.6g (%g%%)\n", r.loss_name.c_str(), r.rule.c_str(),
                    r.candidate_loss, r.percent_regret);
    }
    return 0;
}

struct ReportOpts {
    std::vector<std::string> inputs;  // [scenario/model=]path
    std::string out = "report.csv";
};

/// Combined table: one row per (scenario, model, estimator), optimal loss
/// first, regrets with percentages in parentheses on stdout.
inline int run_report(const ReportOpts& o) {
    require(!o.inputs.empty(), ErrorKind::validation, "report needs --inputs");
    std::string csv = "scenario,model,loss,rule,optimal_loss,regret,percent_regret\n";
    json arr = json::array();
    std::ostringstream text;
    for (const auto& spec : o.inputs) {
        std::string label;
        fs::path path = spec;
        if (auto eq = spec.find('='); eq != std::string::npos) {
            label = spec.substr(0, eq);
            path = spec.substr(eq + 1);
        } else {
            label = path.stem().string();
        }
        std::string scenario = label;
        std::string model;
        if (auto slash = label.find('/'); slash != std::string::npos) {
            scenario = label.substr(0, slash);
            model = label.substr(slash + 1);
        }
        const auto rows = io::read_reports(path);
        for (const auto& r : rows) {
            // percentages are re-derived so the table is internally consistent
            const double pct = percent_of(r.regret, r.optimal_loss);
            csv += scenario + "," + model + "," + r.loss_name + "," + r.rule + "," +
                   io::format_double(r.optimal_loss) + "," + io::format_double(r.regret) + "," +
                   io::format_double(pct) + "\n";
            arr.push_back({{"scenario", scenario},
                           {"model", model},
                           {"loss", r.loss_name},
                           {"rule", r.rule},
                           {"optimal_loss", r.optimal_loss},
                           {"regret", r.regret},
                           {"percent_regret", std::isfinite(pct) ? json(pct) : json("inf")}});
        }
        text << scenario << (model.empty() ? "" : " " + model);
        if (!rows.empty()) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "  %s optimal %.4g", rows.front().loss_name.c_str(),
                          rows.front().optimal_loss);
            text << buf;
        }
        for (const auto& r : rows) {
            if (r.rule == "optimal") continue;
            char buf[96];
            std::snprintf(buf, sizeof buf, "  %s %.4g (%.0f)", r.rule.c_str(), r.regret,
                          percent_of(r.regret, r.optimal_loss));
            text << buf;
        }
        text << "\n";
    }
    io::write_text_atomic(o.out, csv);
    fs::path jpath = o.out;
    jpath.replace_extension(".json");
    io::write_text_atomic(jpath, arr.dump(2) + "\n");
    std::cout << text.str();
    return 0;
}

// ------------------------------------------------------------------ main

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"ensemble decision toolkit: optimal ensemble estimates and posterior regret"};
    app.require_subcommand(1);

    SimulateOpts sim;
    auto* s = app.add_subcommand("simulate", "generate synthetic datasets");
    s->add_option("--scenario", sim.scenario, "nn | gig | sc1 | sc2 | sc3 | sc4");
    s->add_option("--n", sim.n, "units (non-spatial)");
    s->add_option("--rls", sim.rls, "sampling heterogeneity level: 1, 20 or 100");
    s->add_option("--cl", sim.cl, "log-uniform half-width (overrides --rls)");
    s->add_option("--reps", sim.reps, "replicates");
    s->add_option("--seed", sim.seed);
    s->add_option("--out", sim.out, "output directory");
    s->add_option("--level", sim.level, "low | med | high (spatial)");
    s->add_option("--sf", sim.sf, "expected-count scaling factor");
    s->add_option("--lattice", sim.lattice, "lattice side k (k*k areas)");
    s->add_option("--param", sim.param, "override LR / sigma / beta");
    s->add_option("--phi", sim.phi, "Matern range for SC3");
    s->add_option("--counts", sim.counts, "auto | multinomial | poisson");

    FitOpts fit;
    auto* f = app.add_subcommand("fit", "draw from a posterior");
    f->add_option("--model", fit.model, "nn | gig | pln | bym");
    f->add_option("--data", fit.data, "dataset or counts CSV")->required();
    f->add_option("--adjacency", fit.adjacency);
    f->add_option("--out", fit.out);
    f->add_option("--draws", fit.draws, "exact draws (nn, gig)");
    f->add_option("--seed", fit.seed);
    f->add_option("--mu0", fit.mu0);
    f->add_option("--tau0sq", fit.tau0sq);
    f->add_option("--alpha0", fit.alpha0);
    f->add_option("--beta0", fit.beta0);
    f->add_option("--iters", fit.iters, "MCMC sweeps including burn-in");
    f->add_option("--burnin", fit.burnin);
    f->add_option("--thin", fit.thin);
    f->add_option("--proposal-sd", fit.proposal_sd);
    f->add_option("--alpha-proposal-sd", fit.alpha_proposal_sd);

    auto add_rule_opts = [](CLI::App* sub, RuleOptions& r, DataOptions& d) {
        sub->add_option("--a1", r.a1, "WRSEL a1");
        sub->add_option("--a2", r.a2, "WRSEL a2");
        sub->add_option("--harness", r.harness, "WRSEL defaults: nonspatial | spatial | none");
        sub->add_option("--data", d.data, "dataset/counts CSV for the MLE");
        sub->add_option("--model", d.model, "model for the MLE: nn | gig | pln");
    };

    EstimateOpts est;
    auto* e = app.add_subcommand("estimate", "compute estimator ensembles");
    e->add_option("--draws", est.draws)->required();
    e->add_option("--rules", est.rules, "e.g. ssel,med,quant:0.8,wrsel,cb,gr,mle");
    e->add_option("--out", est.out);
    add_rule_opts(e, est.rule_opts, est.data);

    ClassifyOpts cls;
    auto* c = app.add_subcommand("classify", "optimal threshold or rank classification");
    c->add_option("--draws", cls.draws)->required();
    c->add_option("--loss", cls.loss, "tcl | rcl");
    c->add_option("--C", cls.C, "threshold");
    c->add_option("--p", cls.p, "TCL false-positive weight; omit for unweighted");
    c->add_option("--direction", cls.direction, "above | below");
    c->add_option("--gamma", cls.gamma, "RCL percentile cut-off");
    c->add_option("--out", cls.out);

    RegretOpts reg;
    auto* r = app.add_subcommand("regret", "posterior regret of candidate ensembles");
    r->add_option("--draws", reg.draws)->required();
    r->add_option("--loss", reg.loss, "qsel | qrsel | iqrsel | dispersion | tcl | rcl");
    r->add_option("--p", reg.p, "Q-SEL probabilities (list) or TCL weight");
    r->add_option("--scale", reg.scale, "natural | log (Q-SEL)");
    r->add_option("--candidates", reg.candidates, "e.g. ssel,gr,cb,wrsel,mle,ropq");
    r->add_option("--estimates", reg.estimates, "estimates CSV with candidate columns");
    r->add_option("--C", reg.C);
    r->add_option("--direction", reg.direction);
    r->add_option("--gamma", reg.gamma);
    r->add_option("--out", reg.out);
    add_rule_opts(r, reg.rule_opts, reg.data);

    ReportOpts rep;
    auto* p = app.add_subcommand("report", "combine regret reports into one table");
    p->add_option("--inputs", rep.inputs, "[scenario/model=]report.csv ...")->delimiter(',');
    p->add_option("--out", rep.out);

    for (auto* sub : {s, f, e, c, r, p}) {
        sub->add_option("--config", "JSON file of option values");
    }

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        if (!args.empty()) {
            if (auto* sub = app.get_subcommand_no_throw(args.front())) {
                std::vector<std::string> rest(args.begin() + 1, args.end());
                rest = expand_config(*sub, std::move(rest));
                args.resize(1);
                args.insert(args.end(), rest.begin(), rest.end());
            }
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    } catch (const Error& err) {
        std::cerr << "error (" << to_string(err.kind()) << "): " << err.what() << "\n";
        return exit_code(err.kind());
    }

    try {
        if (s->parsed()) return run_simulate(sim);
        if (f->parsed()) return run_fit(fit);
        if (e->parsed()) return run_estimate(est);
        if (c->parsed()) return run_classify(cls);
        if (r->parsed()) return run_regret(reg);
        if (p->parsed()) return run_report(rep);
    } catch (const Error& err) {
        std::cerr << "error (" << to_string(err.kind()) << "): " << err.what() << "\n";
        return exit_code(err.kind());
    } catch (const fs::filesystem_error& err) {
        std::cerr << "error (io): " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace ed::cli
