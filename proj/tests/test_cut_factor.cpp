#include "ldp/cut_factor.hpp"
#include "ldp/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>

using namespace ldp;
using ldp::test::Rng;

namespace {

std::vector<MatchingEntry> grid(const std::vector<std::vector<double>>& c)
{
    std::vector<MatchingEntry> out;
    for (std::size_t r = 0; r < c.size(); ++r)
        for (std::size_t k = 0; k < c[r].size(); ++k) out.push_back({r, k, c[r][k]});
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> pairs(const std::vector<MatchingEntry>& e, const MatchingResult& m)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i : m.chosen) out.push_back({e[i].row, e[i].col});
    std::sort(out.begin(), out.end());
    return out;
}

// brute force over all subsets of entries
double matching_oracle(const std::vector<MatchingEntry>& e)
{
    double best = 0;
    for (std::uint32_t mask = 0; mask < (1u << e.size()); ++mask) {
        std::vector<std::size_t> rows, cols;
        double value = 0;
        bool ok = true;
        for (std::size_t i = 0; i < e.size() && ok; ++i) {
            if (!(mask >> i & 1)) continue;
            ok = std::find(rows.begin(), rows.end(), e[i].row) == rows.end() &&
                 std::find(cols.begin(), cols.end(), e[i].col) == cols.end();
            rows.push_back(e[i].row);
            cols.push_back(e[i].col);
            value += e[i].cost;
        }
        if (ok) best = std::min(best, value);
    }
    return best;
}

CutFactor single_uv(double base, double lifted)
{
    CutFactor f(0, 0, 1, {{0, 0, 1}});
    f.set_theta(0, base);
    f.set_theta(f.lifted_slot(), lifted);
    return f;
}

double restricted(const CutFactor& f, std::size_t slot, bool value)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : enumerate_cut_factor(f))
        if (l.y[slot] == value) best = std::min(best, l.value);
    return best;
}

} // namespace

TEST_CASE("partial matching examples")
{
    const auto pos = grid({{1, 2}, {3, 4}});
    const MatchingResult p = solve_partial_matching(pos);
    CHECK(p.chosen.empty());
    CHECK(p.value == 0.0);

    const auto a = grid({{-2, -1}, {-1, -3}});
    const MatchingResult ra = solve_partial_matching(a);
    CHECK(ra.value == -5.0);
    CHECK(pairs(a, ra) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});

    const auto b = grid({{-2, -3}, {-4, 1}});
    const MatchingResult rb = solve_partial_matching(b);
    CHECK(rb.value == -7.0);
    CHECK(pairs(b, rb) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}});
}

TEST_CASE("partial matching matches brute force and is permutation invariant")
{
    Rng rng(41);
    for (int k = 0; k < 200; ++k) {
        std::vector<MatchingEntry> e;
        const int rows = rng.integer(1, 4), cols = rng.integer(1, 4);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                if (rng.coin(0.6)) e.push_back({std::size_t(r), std::size_t(c), rng.cost(-2, 1)});
        if (e.size() > 12) e.resize(12);
        const MatchingResult m = solve_partial_matching(e);
        CHECK(m.value == doctest::Approx(matching_oracle(e)).epsilon(1e-12));
        for (std::size_t i : m.chosen) CHECK(e[i].cost < 0);

        std::vector<MatchingEntry> perm = e;
        for (auto& x : perm) { x.row = rows - 1 - x.row; x.col = (x.col + 1) % cols; }
        std::shuffle(perm.begin(), perm.end(), rng.engine());
        CHECK(solve_partial_matching(perm).value == doctest::Approx(m.value).epsilon(1e-12));
    }
}

TEST_CASE("cut optimization examples")
{
    CHECK(optimize_cut(single_uv(1, -2)) == -1.0);
    CHECK(optimize_cut(single_uv(1, -0.5)) == 0.0);
    CHECK(optimize_cut(single_uv(1, 2)) == 0.0);
    CHECK(optimize_cut(single_uv(-1, 2)) == 0.0);
    CHECK(optimize_cut(single_uv(-3, 2)) == -1.0);
}

TEST_CASE("cut min-marginal examples")
{
    const CutFactor f = single_uv(1, -2);
    CHECK(cut_min_marginal(f, f.lifted_slot()) == -1.0);
    CHECK(cut_min_marginal(single_uv(0, 0), 0) == 0.0);

    CutFactor g(0, 0, 1, {{0, 0, 5}, {1, 2, 1}});
    g.set_theta(0, 1);
    g.set_theta(1, 3);
    g.set_theta(2, -2);
    CHECK(cut_min_marginal(g, 0) == restricted(g, 0, true) - restricted(g, 0, false));
    CHECK(cut_min_marginal(g, 0) == -1.0);
}

TEST_CASE("cut factors match enumeration")
{
    Rng rng(42);
    for (int k = 0; k < 300; ++k) {
        const CutFactor f = test::random_cut_factor(rng, rng.integer(1, 6));
        double best = std::numeric_limits<double>::infinity();
        for (const auto& l : enumerate_cut_factor(f)) best = std::min(best, l.value);
        CHECK(optimize_cut(f) == doctest::Approx(best).epsilon(1e-12));

        const auto y = optimal_cut_labeling(f);
        CHECK(cut_labeling_feasible(f, y));
        double value = 0;
        for (std::size_t s = 0; s < f.num_slots(); ++s)
            if (y[s]) value += f.theta(s);
        CHECK(value == doctest::Approx(best).epsilon(1e-12));

        const auto mm = cut_min_marginals(f);
        for (std::size_t s = 0; s < f.num_slots(); ++s)
            CHECK(mm[s] == doctest::Approx(restricted(f, s, true) - restricted(f, s, false)).epsilon(1e-12));
    }
}

TEST_CASE("all-zeros labeling is feasible")
{
    Rng rng(43);
    for (int k = 0; k < 30; ++k) {
        const CutFactor f = test::random_cut_factor(rng, rng.integer(1, 6));
        CHECK(cut_labeling_feasible(f, std::vector<bool>(f.num_slots(), false)));
    }
}
