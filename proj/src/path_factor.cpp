#include "ldp/path_factor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace ldp {

PathFactor::PathFactor(std::vector<PathEdge> path, PathEdge closing) : edges_(std::move(path))
{
    assert(!edges_.empty());
    assert(edges_.front().tail == closing.tail && edges_.back().head == closing.head);
    for (std::size_t i = 1; i < edges_.size(); ++i) assert(edges_[i - 1].head == edges_[i].tail);
    edges_.push_back(closing);
    theta_.assign(edges_.size(), 0.0);
}

std::optional<std::size_t> PathFactor::slot_of(Variable var) const
{
    for (std::size_t k = 0; k < edges_.size(); ++k)
        if (edges_[k].var == var) return k;
    return std::nullopt;
}

double PathFactor::opt() const
{
    if (!cached_opt_) cached_opt_ = optimize_path(*this);
    return *cached_opt_;
}

std::vector<std::pair<int, std::size_t>> PathFactor::key() const
{
    std::vector<std::pair<int, std::size_t>> k;
    for (const PathEdge& e : edges_) k.emplace_back(e.var.kind == VarKind::base ? 0 : 1, e.var.id);
    std::sort(k.begin(), k.end());
    return k;
}

namespace {

// Index of the single positive constrained edge when that case applies, else -1.
int lone_positive(const std::vector<double>& theta, const std::vector<bool>& constrained)
{
    int positive = -1;
    for (std::size_t k = 0; k < theta.size(); ++k)
        if (theta[k] > 0) {
            if (positive >= 0) return -1;
            positive = static_cast<int>(k);
        }
    if (positive < 0 || !constrained[positive]) return -1;
    return positive;
}

std::vector<bool> constrained_flags(const PathFactor& f)
{
    std::vector<bool> c(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) c[k] = f.edge(k).constrained;
    return c;
}

} // namespace

double optimize_path(const std::vector<double>& theta, const std::vector<bool>& constrained)
{
    double negative = 0;
    for (double t : theta)
        if (t <= 0) negative += t;
    const int kl = lone_positive(theta, constrained);
    if (kl < 0) return negative;
    // either switch the positive edge on or switch off the cheapest other edge
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < theta.size(); ++k)
        if (static_cast<int>(k) != kl) alpha = std::min(alpha, std::abs(theta[k]));
    const double beta = theta[kl];
    return negative + std::min(alpha, beta);
}

double optimize_path(const PathFactor& f)
{
    return optimize_path(f.thetas(), constrained_flags(f));
}

std::vector<bool> optimal_path_labeling(const PathFactor& f)
{
    const auto& theta = f.thetas();
    std::vector<bool> y(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) y[k] = theta[k] <= 0;
    const int kl = lone_positive(theta, constrained_flags(f));
    if (kl < 0) return y;
    int cheapest = -1;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (static_cast<int>(k) != kl && (cheapest < 0 || std::abs(theta[k]) < std::abs(theta[cheapest])))
            cheapest = static_cast<int>(k);
    if (cheapest >= 0 && std::abs(theta[cheapest]) < theta[kl]) y[cheapest] = false;
    else y[kl] = true;
    return y;
}

double path_min_marginal(const PathFactor& f, std::size_t slot)
{
    const auto constrained = constrained_flags(f);
    double big = 1;
    for (double t : f.thetas()) big += 2 * std::abs(t);
    auto theta = f.thetas();
    theta[slot] = f.theta(slot) - big;
    const double one = optimize_path(theta, constrained) + big;
    theta[slot] = f.theta(slot) + big;
    const double zero = optimize_path(theta, constrained);
    return one - zero;
}

std::vector<double> path_min_marginals(const PathFactor& f)
{
    std::vector<double> m(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) m[k] = path_min_marginal(f, k);
    return m;
}

} // namespace ldp
