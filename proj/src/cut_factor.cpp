#include "ldp/cut_factor.hpp"

#include "ldp/min_cost_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace ldp {

CutFactor::CutFactor(EdgeId lifted, NodeId u, NodeId v, std::vector<CutEdge> cut)
    : lifted_(lifted), u_(u), v_(v), cut_(std::move(cut))
{
    theta_.assign(cut_.size() + 1, 0.0);
    for (std::size_t k = 0; k < cut_.size(); ++k)
        if (cut_[k].tail == u_ && cut_[k].head == v_) uv_index_ = static_cast<int>(k);
}

Variable CutFactor::variable(std::size_t slot) const
{
    if (slot == cut_.size()) return {VarKind::lifted, lifted_};
    return {VarKind::base, cut_[slot].id};
}

std::optional<std::size_t> CutFactor::slot_of(Variable var) const
{
    if (var.kind == VarKind::lifted) {
        if (var.id == lifted_) return lifted_slot();
        return std::nullopt;
    }
    if (var.kind != VarKind::base) return std::nullopt;
    for (std::size_t k = 0; k < cut_.size(); ++k)
        if (cut_[k].id == var.id) return k;
    return std::nullopt;
}

double CutFactor::opt() const
{
    if (!cached_opt_) cached_opt_ = optimize_cut(*this);
    return *cached_opt_;
}

std::vector<std::pair<int, std::size_t>> CutFactor::key() const
{
    std::vector<std::pair<int, std::size_t>> k;
    for (const CutEdge& e : cut_) k.emplace_back(0, e.id);
    std::sort(k.begin(), k.end());
    k.emplace_back(1, lifted_);
    return k;
}

MatchingResult solve_partial_matching(const std::vector<MatchingEntry>& entries)
{
    std::map<std::size_t, std::size_t> rows, cols;
    for (const auto& e : entries) {
        rows.emplace(e.row, rows.size());
        cols.emplace(e.col, cols.size());
    }
    MinCostFlow mcf(rows.size() + cols.size() + 2);
    const std::size_t s = rows.size() + cols.size(), t = s + 1;
    for (std::size_t r = 0; r < rows.size(); ++r) mcf.add_arc(s, r, 1, 0.0);
    for (std::size_t c = 0; c < cols.size(); ++c) mcf.add_arc(rows.size() + c, t, 1, 0.0);
    std::vector<std::size_t> arc(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        arc[i] = mcf.add_arc(rows.at(entries[i].row), rows.size() + cols.at(entries[i].col), 1, entries[i].cost);
    mcf.solve(s, t);
    MatchingResult res;
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (mcf.flow(arc[i]) > 0) {
            res.chosen.push_back(i);
            res.value += entries[i].cost;
        }
    return res;
}

namespace {

struct CutSolution {
    double value;
    std::vector<bool> y;   // over slots
};

CutSolution solve_cut(const CutFactor& f, const std::vector<double>& theta)
{
    const std::size_t m = f.num_cut();
    const double lifted = theta[m];
    std::vector<MatchingEntry> entries;
    for (std::size_t k = 0; k < m; ++k) {
        double psi = theta[k];
        if (static_cast<int>(k) == f.uv_index() && lifted > 0) psi += lifted;
        entries.push_back({f.cut_edge(k).tail, f.cut_edge(k).head, psi});
    }
    const MatchingResult match = solve_partial_matching(entries);
    CutSolution sol{match.value, std::vector<bool>(m + 1, false)};
    for (std::size_t i : match.chosen) sol.y[i] = true;
    if (f.uv_index() >= 0 && sol.y[f.uv_index()]) sol.y[m] = true;
    if (lifted >= 0) return sol;
    if (!match.chosen.empty()) {
        sol.value += lifted;
        sol.y[m] = true;
        return sol;
    }
    // nothing matched: activate the cheapest cut edge together with the lifted edge if it pays off
    std::size_t cheapest = 0;
    for (std::size_t k = 1; k < m; ++k)
        if (theta[k] < theta[cheapest]) cheapest = k;
    if (m > 0 && -lifted > theta[cheapest]) {
        sol.value = lifted + theta[cheapest];
        sol.y[cheapest] = true;
        sol.y[m] = true;
    }
    return sol;
}

} // namespace

double optimize_cut(const CutFactor& f, const std::vector<double>& theta)
{
    return solve_cut(f, theta).value;
}

double optimize_cut(const CutFactor& f)
{
    return optimize_cut(f, f.thetas());
}

std::vector<bool> optimal_cut_labeling(const CutFactor& f)
{
    return solve_cut(f, f.thetas()).y;
}

double cut_min_marginal(const CutFactor& f, std::size_t slot)
{
    double big = 1;
    for (double t : f.thetas()) big += 2 * std::abs(t);
    auto theta = f.thetas();
    theta[slot] = f.theta(slot) - big;
    const double one = optimize_cut(f, theta) + big;
    theta[slot] = f.theta(slot) + big;
    const double zero = optimize_cut(f, theta);
    return one - zero;
}

std::vector<double> cut_min_marginals(const CutFactor& f)
{
    std::vector<double> m(f.num_slots());
    for (std::size_t k = 0; k < f.num_slots(); ++k) m[k] = cut_min_marginal(f, k);
    return m;
}

} // namespace ldp
