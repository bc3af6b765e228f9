#include "ldp/message_passing.hpp"

#include "ldp/separation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ldp {

void validate_config(const SolverConfig& cfg)
{
    if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    if (cfg.sep_interval < 1) throw std::invalid_argument("sep_interval must be at least 1");
    if (cfg.primal_interval < 1) throw std::invalid_argument("primal_interval must be at least 1");
    if (!(cfg.sep_epsilon >= 0)) throw std::invalid_argument("sep_epsilon must be non-negative");
    if (!(cfg.max_new_factor_ratio >= 0)) throw std::invalid_argument("max_new_factor_ratio must be non-negative");
    if (!(cfg.damping > 0 && cfg.damping <= 1)) throw std::invalid_argument("damping must lie in (0, 1]");
    if (std::isnan(cfg.gap_tolerance)) throw std::invalid_argument("gap_tolerance must be a number");
    if (!(cfg.tau > 0 && cfg.tau <= 1)) throw std::invalid_argument("tau must lie in (0, 1]");
    if (cfg.cut_ends_budget < 0) throw std::invalid_argument("cut_ends_budget must be non-negative");
}

void flow_factor_pass(Decomposition& dec, NodeId v, Direction dir, double damping)
{
    const FlowFactor& f = dec.flow(dir, v);
    const FactorKind kind = dir == Direction::in ? FactorKind::inflow : FactorKind::outflow;
    const LiftedMarginals lifted = all_lifted_min_marginals(f);

    // single-variable marginals for every path/cut copy of our edges, on the current costs
    struct Send {
        std::size_t slot;
        Site to;
        double m;
    };
    std::vector<Send> sends;
    const FactorOptResult res = optimize(f);
    std::vector<std::size_t> lifted_with_sites;
    for (std::size_t j = 0; j < f.num_base(); ++j) {
        const auto& extra = dec.extra_sites(f.variable(f.base_slot(j)));
        if (extra.empty()) continue;
        const double m = base_min_marginal(f, res, j);
        for (const Site& s : extra) sends.push_back({f.base_slot(j), s, m});
    }
    for (std::size_t j = 0; j < f.num_lifted(); ++j)
        if (!dec.extra_sites(f.variable(f.lifted_slot(j))).empty()) lifted_with_sites.push_back(j);
    const std::vector<double> lm = lifted_min_marginals(f, lifted_with_sites);
    for (std::size_t k = 0; k < lifted_with_sites.size(); ++k) {
        const std::size_t slot = f.lifted_slot(lifted_with_sites[k]);
        for (const Site& s : dec.extra_sites(f.variable(slot))) sends.push_back({slot, s, lm[k]});
    }

    const double w = damping / static_cast<double>(1 + sends.size());
    for (std::size_t j = 0; j < f.num_lifted(); ++j) {
        const Variable var = f.variable(f.lifted_slot(j));
        const Site from{kind, v, f.lifted_slot(j)};
        const Site to = dir == Direction::in ? *dec.out_site(var) : *dec.in_site(var);
        apply_message(dec, from, to, w * lifted.value[j]);
    }
    for (const Send& s : sends) apply_message(dec, {kind, v, s.slot}, s.to, w * s.m);
}

void path_factor_pass(Decomposition& dec, std::size_t p, double damping)
{
    const PathFactor& f = dec.paths()[p];
    const std::vector<double> m = path_min_marginals(f);
    const double w = damping / (2.0 * static_cast<double>(f.size()));
    for (std::size_t k = 0; k < f.size(); ++k) {
        const Variable var = f.edge(k).var;
        const Site from{FactorKind::path, p, k};
        apply_message(dec, from, *dec.out_site(var), w * m[k]);
        apply_message(dec, from, *dec.in_site(var), w * m[k]);
    }
}

void cut_factor_pass(Decomposition& dec, std::size_t c, double damping)
{
    const CutFactor& f = dec.cuts()[c];
    const std::vector<double> m = cut_min_marginals(f);
    const double w = damping / (2.0 * static_cast<double>(f.num_cut()) + 2.0);
    for (std::size_t k = 0; k < f.num_slots(); ++k) {
        const Variable var = f.variable(k);
        const Site from{FactorKind::cut, c, k};
        apply_message(dec, from, *dec.out_site(var), w * m[k]);
        apply_message(dec, from, *dec.in_site(var), w * m[k]);
    }
}

void message_passing_iteration(Decomposition& dec, double damping)
{
    const auto& order = dec.instance().order();
    for (NodeId v : order) {
        flow_factor_pass(dec, v, Direction::in, damping);
        flow_factor_pass(dec, v, Direction::out, damping);
    }
    for (std::size_t p = 0; p < dec.paths().size(); ++p) path_factor_pass(dec, p, damping);
    for (std::size_t c = 0; c < dec.cuts().size(); ++c) cut_factor_pass(dec, c, damping);

    for (std::size_t c = dec.cuts().size(); c-- > 0;) cut_factor_pass(dec, c, damping);
    for (std::size_t p = dec.paths().size(); p-- > 0;) path_factor_pass(dec, p, damping);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        flow_factor_pass(dec, *it, Direction::out, damping);
        flow_factor_pass(dec, *it, Direction::in, damping);
    }
}

Solution primal_round(Decomposition& dec, const SolverConfig& cfg)
{
    const Instance& inst = dec.instance();
    const McfNetwork net = init_mcf(dec, cfg.exec);
    const McfResult res = solve_mcf(net);
    Solution sol = local_search(inst, adjust_lifted(inst, res.paths), {cfg.tau, cfg.cut_ends_budget});

    // The flow duals help only as a certificate. Otherwise they tend to make the factors
    // degenerate and starve separation, so they are rolled back.
    const double before = lower_bound(dec, cfg.exec).lower_bound;
    Decomposition saved = dec;
    if (reparametrize_by_mcf(dec, net, res)) {
        const double after = lower_bound(dec, cfg.exec).lower_bound;
        if (after < before - 1e-9 || after < sol.objective - 1e-9) dec = std::move(saved);
    }
    return sol;
}

SolverReport run(const Instance& inst, const SolverConfig& cfg)
{
    validate_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    Decomposition dec(inst);
    SolverReport rep;
    rep.solution = adjust_lifted(inst, {});
    const std::size_t base_factors = dec.num_factors();

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        message_passing_iteration(dec, cfg.damping);
        if (iter % cfg.sep_interval == 0) {
            const SeparationCosts costs = extract_separation_costs(dec, cfg.exec);
            const auto limit = static_cast<std::size_t>(cfg.max_new_factor_ratio * static_cast<double>(base_factors));
            install_candidates(dec, costs, separate(costs, inst, cfg.sep_epsilon, limit));
        }
        if (iter % cfg.primal_interval == 0) {
            Solution sol = primal_round(dec, cfg);
            if (sol.objective < rep.solution.objective) rep.solution = std::move(sol);
        }
        rep.lower_bound = lower_bound(dec, cfg.exec).lower_bound;
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rep.iterations.push_back({iter, rep.lower_bound, rep.solution.objective, elapsed, dec.num_factors()});
        if (cfg.verbose)
            std::fprintf(stderr, "iter=%d lb=%.10g ub=%.10g gap=%.3g factors=%zu\n", iter, rep.lower_bound,
                         rep.solution.objective, rep.solution.objective - rep.lower_bound, dec.num_factors());
        if (rep.solution.objective - rep.lower_bound <= cfg.gap_tolerance) break;
    }
    rep.gap = rep.solution.objective - rep.lower_bound;
    return rep;
}

std::string format_solution(const Solution& sol)
{
    std::ostringstream out;
    out.precision(17);
    out << "objective " << sol.objective << '\n';
    for (const auto& p : sol.paths) {
        for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << p[i];
        out << '\n';
    }
    return out.str();
}

std::string format_report(const SolverReport& rep)
{
    std::ostringstream out;
    out.precision(17);
    for (const auto& it : rep.iterations)
        out << "iter " << it.iter << " lb " << it.lower_bound << " ub " << it.best_primal << " factors " << it.factors
            << '\n';
    out << format_solution(rep.solution);
    out << "lb " << rep.lower_bound << "\nub " << rep.solution.objective << "\ngap " << rep.gap << '\n';
    return out.str();
}

} // namespace ldp
