#include "ldp/decomposition.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace ldp {

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
const std::vector<Site> no_sites;
} // namespace

Decomposition::Decomposition(const Instance& inst) : inst_(&inst)
{
    const std::size_t n = inst.num_nodes();
    const int gap = inst.max_edge_gap();
    inflow_.reserve(n);
    outflow_.reserve(n);
    for (NodeId v = 0; v < n; ++v) {
        inflow_.emplace_back(inst, v, Direction::in, gap);
        outflow_.emplace_back(inst, v, Direction::out, gap);
    }
    base_out_slot_.assign(inst.base_edges().size(), npos);
    base_in_slot_.assign(inst.base_edges().size(), npos);
    lifted_out_slot_.assign(inst.lifted_edges().size(), npos);
    lifted_in_slot_.assign(inst.lifted_edges().size(), npos);
    base_extra_.assign(inst.base_edges().size(), {});
    lifted_extra_.assign(inst.lifted_edges().size(), {});

    for (NodeId v = 0; v < n; ++v) {
        FlowFactor& in = inflow_[v];
        FlowFactor& out = outflow_[v];
        in.set_theta(0, 0.5 * inst.node_cost(v));
        out.set_theta(0, 0.5 * inst.node_cost(v));
        for (std::size_t j = 0; j < out.num_base(); ++j) {
            const EdgeId e = out.base_edge(j);
            base_out_slot_[e] = out.base_slot(j);
            out.set_theta(out.base_slot(j), inst.base(e).head == inst.sink() ? inst.base(e).cost : 0.5 * inst.base(e).cost);
        }
        for (std::size_t j = 0; j < in.num_base(); ++j) {
            const EdgeId e = in.base_edge(j);
            base_in_slot_[e] = in.base_slot(j);
            in.set_theta(in.base_slot(j), inst.base(e).tail == inst.source() ? inst.base(e).cost : 0.5 * inst.base(e).cost);
        }
        for (std::size_t j = 0; j < out.num_lifted(); ++j) {
            lifted_out_slot_[out.lifted_edge(j)] = out.lifted_slot(j);
            out.set_theta(out.lifted_slot(j), 0.5 * inst.lifted(out.lifted_edge(j)).cost);
        }
        for (std::size_t j = 0; j < in.num_lifted(); ++j) {
            lifted_in_slot_[in.lifted_edge(j)] = in.lifted_slot(j);
            in.set_theta(in.lifted_slot(j), 0.5 * inst.lifted(in.lifted_edge(j)).cost);
        }
    }
    for (EdgeId e = 0; e < lifted_out_slot_.size(); ++e)
        assert(lifted_out_slot_[e] != npos && lifted_in_slot_[e] != npos);
}

double Decomposition::theta(Site s) const
{
    switch (s.kind) {
    case FactorKind::inflow: return inflow_[s.factor].theta(s.slot);
    case FactorKind::outflow: return outflow_[s.factor].theta(s.slot);
    case FactorKind::path: return paths_[s.factor].theta(s.slot);
    case FactorKind::cut: return cuts_[s.factor].theta(s.slot);
    }
    return 0;
}

void Decomposition::add_theta(Site s, double delta)
{
    switch (s.kind) {
    case FactorKind::inflow: inflow_[s.factor].add_theta(s.slot, delta); break;
    case FactorKind::outflow: outflow_[s.factor].add_theta(s.slot, delta); break;
    case FactorKind::path: paths_[s.factor].add_theta(s.slot, delta); break;
    case FactorKind::cut: cuts_[s.factor].add_theta(s.slot, delta); break;
    }
}

Variable Decomposition::variable(Site s) const
{
    switch (s.kind) {
    case FactorKind::inflow: return inflow_[s.factor].variable(s.slot);
    case FactorKind::outflow: return outflow_[s.factor].variable(s.slot);
    case FactorKind::path: return paths_[s.factor].edge(s.slot).var;
    case FactorKind::cut: return cuts_[s.factor].variable(s.slot);
    }
    return {};
}

std::optional<Site> Decomposition::out_site(Variable var) const
{
    switch (var.kind) {
    case VarKind::node: return Site{FactorKind::outflow, var.id, 0};
    case VarKind::base:
        if (base_out_slot_[var.id] == npos) return std::nullopt;
        return Site{FactorKind::outflow, inst_->base(var.id).tail, base_out_slot_[var.id]};
    case VarKind::lifted:
        return Site{FactorKind::outflow, inst_->lifted(var.id).tail, lifted_out_slot_[var.id]};
    }
    return std::nullopt;
}

std::optional<Site> Decomposition::in_site(Variable var) const
{
    switch (var.kind) {
    case VarKind::node: return Site{FactorKind::inflow, var.id, 0};
    case VarKind::base:
        if (base_in_slot_[var.id] == npos) return std::nullopt;
        return Site{FactorKind::inflow, inst_->base(var.id).head, base_in_slot_[var.id]};
    case VarKind::lifted:
        return Site{FactorKind::inflow, inst_->lifted(var.id).head, lifted_in_slot_[var.id]};
    }
    return std::nullopt;
}

const std::vector<Site>& Decomposition::extra_sites(Variable var) const
{
    if (var.kind == VarKind::base) return base_extra_[var.id];
    if (var.kind == VarKind::lifted) return lifted_extra_[var.id];
    return no_sites;
}

std::vector<Site>& Decomposition::extra(Variable var)
{
    assert(var.kind != VarKind::node);
    return var.kind == VarKind::base ? base_extra_[var.id] : lifted_extra_[var.id];
}

std::vector<Site> Decomposition::sites(Variable var) const
{
    std::vector<Site> out;
    if (auto s = out_site(var)) out.push_back(*s);
    if (auto s = in_site(var)) out.push_back(*s);
    const auto& more = extra_sites(var);
    out.insert(out.end(), more.begin(), more.end());
    return out;
}

bool Decomposition::add_path(PathFactor f)
{
    if (!path_keys_.insert(f.key()).second) return false;
    const std::size_t idx = paths_.size();
    for (std::size_t k = 0; k < f.size(); ++k) extra(f.edge(k).var).push_back({FactorKind::path, idx, k});
    paths_.push_back(std::move(f));
    return true;
}

bool Decomposition::add_cut(CutFactor f)
{
    if (!cut_keys_.insert(f.key()).second) return false;
    const std::size_t idx = cuts_.size();
    for (std::size_t k = 0; k < f.num_slots(); ++k) extra(f.variable(k)).push_back({FactorKind::cut, idx, k});
    cuts_.push_back(std::move(f));
    return true;
}

double Decomposition::original_cost(Variable var) const
{
    switch (var.kind) {
    case VarKind::node: return inst_->node_cost(var.id);
    case VarKind::base: return inst_->base(var.id).cost;
    case VarKind::lifted: return inst_->lifted(var.id).cost;
    }
    return 0;
}

double Decomposition::conservation_residual() const
{
    double worst = 0;
    auto check = [&](Variable var) {
        double sum = 0;
        for (const Site& s : sites(var)) sum += theta(s);
        worst = std::max(worst, std::abs(sum - original_cost(var)));
    };
    for (NodeId v = 0; v < num_nodes(); ++v) check({VarKind::node, v});
    for (EdgeId e = 0; e < inst_->base_edges().size(); ++e) check({VarKind::base, e});
    for (EdgeId e = 0; e < inst_->lifted_edges().size(); ++e) check({VarKind::lifted, e});
    return worst;
}

namespace {

double factor_opt(const Decomposition& dec, std::size_t i)
{
    const std::size_t n = dec.num_nodes();
    if (i < n) return dec.inflow(i).opt();
    if (i < 2 * n) return dec.outflow(i - n).opt();
    i -= 2 * n;
    if (i < dec.paths().size()) return dec.paths()[i].opt();
    return dec.cuts()[i - dec.paths().size()].opt();
}

} // namespace

DualReport lower_bound(const Decomposition& dec, Execution exec)
{
    if (exec == Execution::serial) return lower_bound_serial(dec);
    DualReport rep;
    const std::size_t total = dec.num_factors();
    rep.per_factor.assign(total, 0.0);
    const long count = static_cast<long>(total);
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < count; ++i) rep.per_factor[i] = factor_opt(dec, static_cast<std::size_t>(i));
    // fixed summation order keeps the result identical to the serial one
    for (double x : rep.per_factor) rep.lower_bound += x;
    return rep;
}

DualReport lower_bound_serial(const Decomposition& dec)
{
    DualReport rep;
    rep.per_factor.reserve(dec.num_factors());
    for (std::size_t i = 0; i < dec.num_factors(); ++i) rep.per_factor.push_back(factor_opt(dec, i));
    for (double x : rep.per_factor) rep.lower_bound += x;
    return rep;
}

void apply_message(Decomposition& dec, Site from, Site to, double amount)
{
    assert(dec.variable(from) == dec.variable(to));
    if (amount == 0) return;
    dec.add_theta(from, -amount);
    dec.add_theta(to, amount);
}

} // namespace ldp
