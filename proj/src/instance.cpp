#include "ldp/instance.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace ldp {

InstanceError::InstanceError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), message(what), line_(line) {}

namespace {

std::string edge_name(const Instance& inst, NodeId tail, NodeId head)
{
    auto name = [&](NodeId v) {
        if (v == inst.source()) return std::string("S");
        if (v == inst.sink()) return std::string("T");
        return std::to_string(v);
    };
    return name(tail) + "->" + name(head);
}

InstanceError edge_error(const std::string& what, bool lifted, std::size_t index)
{
    InstanceError err(what);
    err.edge = InstanceError::EdgeRef{lifted, index};
    return err;
}

std::string format_double(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace

Instance Instance::build(std::vector<int> frames, std::vector<double> node_costs,
                         std::vector<Edge> base, std::vector<Edge> lifted)
{
    Instance inst;
    const std::size_t n = frames.size();
    if (node_costs.size() != n) throw InstanceError("node cost count does not match node count");
    for (NodeId v = 0; v < n; ++v)
        if (frames[v] < 1) throw InstanceError("frame of node " + std::to_string(v) + " must be positive");
    inst.frames_ = std::move(frames);
    inst.node_costs_ = std::move(node_costs);
    const NodeId s = n, t = n + 1;

    // normalize S/T edges, reject everything malformed
    std::vector<std::optional<std::size_t>> s_edge(n), t_edge(n);
    std::map<std::pair<NodeId, NodeId>, std::size_t> seen;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const Edge& e = base[i];
        if (e.tail == t || e.head == s || (e.tail == s && e.head == t) || e.tail > t || e.head > t)
            throw edge_error("invalid base edge " + edge_name(inst, e.tail, e.head), false, i);
        if (e.tail == s) {
            if (s_edge[e.head]) { inst.base_[*s_edge[e.head]].cost += e.cost; continue; }
            s_edge[e.head] = inst.base_.size();
        } else if (e.head == t) {
            if (t_edge[e.tail]) { inst.base_[*t_edge[e.tail]].cost += e.cost; continue; }
            t_edge[e.tail] = inst.base_.size();
        } else {
            if (e.tail == e.head) throw edge_error("self loop " + edge_name(inst, e.tail, e.head), false, i);
            if (inst.frames_[e.tail] >= inst.frames_[e.head])
                throw edge_error("backward edge " + edge_name(inst, e.tail, e.head), false, i);
            if (!seen.emplace(std::make_pair(e.tail, e.head), inst.base_.size()).second)
                throw edge_error("duplicate edge " + edge_name(inst, e.tail, e.head), false, i);
        }
        inst.base_.push_back(e);
    }
    for (NodeId v = 0; v < n; ++v)
        if (!s_edge[v]) { s_edge[v] = inst.base_.size(); inst.base_.push_back({s, v, 0.0}); }
    for (NodeId v = 0; v < n; ++v)
        if (!t_edge[v]) { t_edge[v] = inst.base_.size(); inst.base_.push_back({v, t, 0.0}); }

    inst.out_base_.assign(n + 2, {});
    inst.in_base_.assign(n + 2, {});
    inst.out_lifted_.assign(n + 2, {});
    inst.in_lifted_.assign(n + 2, {});
    for (EdgeId e = 0; e < inst.base_.size(); ++e) {
        inst.out_base_[inst.base_[e].tail].push_back(e);
        inst.in_base_[inst.base_[e].head].push_back(e);
    }
    inst.source_edge_.resize(n);
    inst.sink_edge_.resize(n);
    for (NodeId v = 0; v < n; ++v) {
        inst.source_edge_[v] = *s_edge[v];
        inst.sink_edge_[v] = *t_edge[v];
    }
    auto by_head = [&](EdgeId a, EdgeId b) { return inst.base_[a].head < inst.base_[b].head; };
    auto by_tail = [&](EdgeId a, EdgeId b) { return inst.base_[a].tail < inst.base_[b].tail; };
    for (auto& l : inst.out_base_) std::sort(l.begin(), l.end(), by_head);
    for (auto& l : inst.in_base_) std::sort(l.begin(), l.end(), by_tail);

    inst.order_.resize(n);
    std::iota(inst.order_.begin(), inst.order_.end(), NodeId{0});
    std::sort(inst.order_.begin(), inst.order_.end(), [&](NodeId a, NodeId b) {
        return std::make_pair(inst.frames_[a], a) < std::make_pair(inst.frames_[b], b);
    });
    if (n > 0) {
        inst.min_frame_ = inst.frames_[inst.order_.front()];
        inst.max_frame_ = inst.frames_[inst.order_.back()];
    }
    inst.max_edge_gap_ = 1;
    for (const Edge& e : inst.base_)
        if (e.tail < n && e.head < n)
            inst.max_edge_gap_ = std::max(inst.max_edge_gap_, inst.frames_[e.head] - inst.frames_[e.tail]);

    // lifted edges need base reachability
    Reachability reach = full_reachability(inst);
    std::map<std::pair<NodeId, NodeId>, std::size_t> seen_lifted;
    for (std::size_t i = 0; i < lifted.size(); ++i) {
        const Edge& e = lifted[i];
        const std::string name = "lifted edge " + edge_name(inst, e.tail, e.head);
        if (e.tail >= n || e.head >= n) throw edge_error(name + " must join inner nodes", true, i);
        if (e.tail == e.head) throw edge_error("self loop " + edge_name(inst, e.tail, e.head), true, i);
        if (!seen_lifted.emplace(std::make_pair(e.tail, e.head), inst.lifted_.size()).second)
            throw edge_error("duplicate " + name, true, i);
        if (!reach(e.tail, e.head)) throw edge_error(name + " without base reachability", true, i);
        inst.lifted_.push_back(e);
        inst.max_edge_gap_ = std::max(inst.max_edge_gap_, inst.frames_[e.head] - inst.frames_[e.tail]);
    }
    for (EdgeId e = 0; e < inst.lifted_.size(); ++e) {
        inst.out_lifted_[inst.lifted_[e].tail].push_back(e);
        inst.in_lifted_[inst.lifted_[e].head].push_back(e);
    }
    auto lby_head = [&](EdgeId a, EdgeId b) { return inst.lifted_[a].head < inst.lifted_[b].head; };
    auto lby_tail = [&](EdgeId a, EdgeId b) { return inst.lifted_[a].tail < inst.lifted_[b].tail; };
    for (auto& l : inst.out_lifted_) std::sort(l.begin(), l.end(), lby_head);
    for (auto& l : inst.in_lifted_) std::sort(l.begin(), l.end(), lby_tail);
    return inst;
}

std::optional<EdgeId> Instance::find_base(NodeId tail, NodeId head) const
{
    if (tail >= out_base_.size()) return std::nullopt;
    const auto& l = out_base_[tail];
    auto it = std::lower_bound(l.begin(), l.end(), head,
                               [&](EdgeId e, NodeId h) { return base_[e].head < h; });
    if (it != l.end() && base_[*it].head == head) return *it;
    return std::nullopt;
}

std::optional<EdgeId> Instance::find_lifted(NodeId tail, NodeId head) const
{
    if (tail >= out_lifted_.size()) return std::nullopt;
    const auto& l = out_lifted_[tail];
    auto it = std::lower_bound(l.begin(), l.end(), head,
                               [&](EdgeId e, NodeId h) { return lifted_[e].head < h; });
    if (it != l.end() && lifted_[*it].head == head) return *it;
    return std::nullopt;
}

bool Instance::operator==(const Instance& o) const
{
    auto same = [](const std::vector<Edge>& a, const std::vector<Edge>& b) {
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].tail != b[i].tail || a[i].head != b[i].head || a[i].cost != b[i].cost) return false;
        return true;
    };
    return frames_ == o.frames_ && node_costs_ == o.node_costs_ && same(base_, o.base_) && same(lifted_, o.lifted_);
}

// ---- text format

Instance load_instance(std::istream& in)
{
    std::optional<std::size_t> n;
    std::vector<int> frames;
    std::vector<double> costs;
    std::vector<bool> declared;
    std::vector<Edge> base, lifted;
    std::vector<std::size_t> base_line, lifted_line;
    std::string line;
    std::size_t lineno = 0;

    auto node_of = [&](const std::string& tok, std::size_t ln) -> NodeId {
        if (!n) throw InstanceError("`nodes` must come first", ln);
        if (tok == "S") return *n;
        if (tok == "T") return *n + 1;
        NodeId v = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v >= *n)
            throw InstanceError("bad node id '" + tok + "'", ln);
        return v;
    };
    auto number = [](const std::string& tok, std::size_t ln) {
        double x = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw InstanceError("bad number '" + tok + "'", ln);
        return x;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        const std::string& kw = tok[0];
        if (kw == "nodes") {
            if (tok.size() != 2) throw InstanceError("expected `nodes <n>`", lineno);
            if (n) throw InstanceError("`nodes` given twice", lineno);
            std::size_t count = 0;
            auto res = std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), count);
            if (res.ec != std::errc() || res.ptr != tok[1].data() + tok[1].size())
                throw InstanceError("bad node count", lineno);
            n = count;
            frames.assign(count, 0);
            costs.assign(count, 0.0);
            declared.assign(count, false);
        } else if (kw == "node") {
            if (tok.size() != 4) throw InstanceError("expected `node <id> <frame> <cost>`", lineno);
            NodeId v = node_of(tok[1], lineno);
            if (v >= *n) throw InstanceError("bad node id '" + tok[1] + "'", lineno);
            if (declared[v]) throw InstanceError("node " + tok[1] + " declared twice", lineno);
            int f = 0;
            auto res = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), f);
            if (res.ec != std::errc() || res.ptr != tok[2].data() + tok[2].size() || f < 1)
                throw InstanceError("bad frame '" + tok[2] + "'", lineno);
            frames[v] = f;
            costs[v] = number(tok[3], lineno);
            declared[v] = true;
        } else if (kw == "base" || kw == "lifted") {
            if (tok.size() != 4) throw InstanceError("expected `" + kw + " <tail> <head> <cost>`", lineno);
            Edge e{node_of(tok[1], lineno), node_of(tok[2], lineno), number(tok[3], lineno)};
            if (kw == "base") { base.push_back(e); base_line.push_back(lineno); }
            else { lifted.push_back(e); lifted_line.push_back(lineno); }
        } else {
            throw InstanceError("unknown keyword '" + kw + "'", lineno);
        }
    }
    if (!n) throw InstanceError("missing `nodes` line", lineno);
    for (NodeId v = 0; v < *n; ++v)
        if (!declared[v]) throw InstanceError("node " + std::to_string(v) + " never declared");

    try {
        return Instance::build(std::move(frames), std::move(costs), std::move(base), std::move(lifted));
    } catch (const InstanceError& err) {
        if (!err.edge) throw;
        const auto& lines = err.edge->lifted ? lifted_line : base_line;
        InstanceError located(err.message, lines[err.edge->index]);
        located.edge = err.edge;
        throw located;
    }
}

Instance parse_instance(const std::string& text)
{
    std::istringstream in(text);
    return load_instance(in);
}

Instance load_instance_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InstanceError("cannot open " + path);
    return load_instance(in);
}

void save_instance(const Instance& inst, std::ostream& out)
{
    const std::size_t n = inst.num_nodes();
    out << "nodes " << n << '\n';
    for (NodeId v = 0; v < n; ++v)
        out << "node " << v << ' ' << inst.frame(v) << ' ' << format_double(inst.node_cost(v)) << '\n';
    auto name = [&](NodeId v) {
        if (v == inst.source()) return std::string("S");
        if (v == inst.sink()) return std::string("T");
        return std::to_string(v);
    };
    for (const Edge& e : inst.base_edges())
        out << "base " << name(e.tail) << ' ' << name(e.head) << ' ' << format_double(e.cost) << '\n';
    for (const Edge& e : inst.lifted_edges())
        out << "lifted " << e.tail << ' ' << e.head << ' ' << format_double(e.cost) << '\n';
}

std::string format_instance(const Instance& inst)
{
    std::ostringstream out;
    save_instance(inst, out);
    return out.str();
}

// ---- reachability

Reachability::Reachability(const Instance& inst, int max_frame_gap)
    : n_(inst.num_nodes()), gap_(max_frame_gap)
{
    if (max_frame_gap < 1) throw InstanceError("max_frame_gap must be at least 1");
    const auto& order = inst.order();
    pos_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) pos_[order[i]] = i;
    window_.resize(n_);
    bits_.resize(n_);
    // window of v: positions [pos(v), end) with frame <= frame(v) + gap
    for (std::size_t i = n_; i-- > 0;) {
        NodeId v = order[i];
        const long limit = static_cast<long>(inst.frame(v)) + gap_;
        std::size_t e = i + 1;
        while (e < n_ && inst.frame(order[e]) <= limit) ++e;
        window_[v] = e - i;
        bits_[v].assign((window_[v] + 63) / 64, 0);
        bits_[v][0] |= 1;
        for (EdgeId id : inst.out_base(v)) {
            NodeId x = inst.base(id).head;
            if (!inst.is_inner(x) || inst.frame(x) > limit) continue;
            const std::size_t off = pos_[x] - i;
            const auto& src = bits_[x];
            for (std::size_t b = 0; b < window_[x] && off + b < window_[v]; ++b)
                if (src[b / 64] >> (b % 64) & 1) bits_[v][(off + b) / 64] |= std::uint64_t{1} << ((off + b) % 64);
        }
    }
}

bool Reachability::operator()(NodeId v, NodeId w) const
{
    const NodeId s = n_, t = n_ + 1;
    if (v == t || w == s) return false;
    if (v == s || w == t) return true;
    if (pos_[w] < pos_[v]) return false;
    const std::size_t off = pos_[w] - pos_[v];
    if (off >= window_[v]) return false;
    return bits_[v][off / 64] >> (off % 64) & 1;
}

Reachability compute_reachability(const Instance& inst, int max_frame_gap)
{
    return Reachability(inst, max_frame_gap);
}

Reachability full_reachability(const Instance& inst)
{
    return Reachability(inst, std::max(1, inst.max_frame() - inst.min_frame()));
}

// ---- strong edges

std::size_t StrongBaseEdges::size() const
{
    return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), true));
}

StrongBaseEdges compute_strong_edges(const Instance& inst, const Reachability& full)
{
    std::vector<bool> strong(inst.base_edges().size(), false);
    for (EdgeId e = 0; e < strong.size(); ++e) {
        const Edge& edge = inst.base(e);
        // only edges between inner nodes can enter path factors
        if (!inst.is_inner(edge.tail) || !inst.is_inner(edge.head)) continue;
        bool other = false;
        for (EdgeId f : inst.out_base(edge.tail)) {
            NodeId x = inst.base(f).head;
            if (f == e || x == inst.sink()) continue;
            if (full(x, edge.head)) { other = true; break; }
        }
        strong[e] = !other;
    }
    return StrongBaseEdges(std::move(strong));
}

StrongBaseEdges compute_strong_edges(const Instance& inst)
{
    return compute_strong_edges(inst, full_reachability(inst));
}

// ---- generator

GeneratedInstance generate_instance(const GeneratorConfig& cfg)
{
    if (cfg.frames < 1 || cfg.detections_per_frame < 1 || cfg.trajectories < 0
        || cfg.trajectories > cfg.detections_per_frame || cfg.max_frame_gap < 1 || cfg.noise < 0)
        throw InstanceError("invalid generator parameters");
    std::mt19937_64 rng(cfg.seed);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto noisy = [&](double x) { return x + cfg.noise * (2.0 * uniform() - 1.0); };

    const int D = cfg.detections_per_frame;
    const std::size_t n = static_cast<std::size_t>(cfg.frames) * D;
    std::vector<int> frames(n);
    std::vector<double> node_costs(n, 0.0);
    // label[v] = planted trajectory of v or -1 for clutter
    std::vector<int> label(n, -1);
    GeneratedInstance out;
    out.trajectories.assign(cfg.trajectories, {});
    for (int f = 0; f < cfg.frames; ++f) {
        std::vector<int> slot(D);
        std::iota(slot.begin(), slot.end(), 0);
        for (int i = D - 1; i > 0; --i) std::swap(slot[i], slot[rng() % (i + 1)]);
        for (int d = 0; d < D; ++d) {
            NodeId v = static_cast<NodeId>(f) * D + d;
            frames[v] = f + 1;
            if (slot[d] < cfg.trajectories) label[v] = slot[d];
        }
        for (int d = 0; d < D; ++d) {
            NodeId v = static_cast<NodeId>(f) * D + d;
            if (label[v] >= 0) out.trajectories[label[v]].push_back(v);
        }
    }
    std::vector<Edge> base, lifted;
    for (NodeId v = 0; v < n; ++v)
        for (NodeId w = 0; w < n; ++w) {
            const int gap = frames[w] - frames[v];
            if (gap < 1 || gap > cfg.max_frame_gap) continue;
            const bool same = label[v] >= 0 && label[v] == label[w];
            base.push_back({v, w, noisy(same ? -1.0 : 1.0)});
            if (gap >= 2) lifted.push_back({v, w, noisy(same ? -1.0 : 1.0)});
        }
    out.instance = Instance::build(std::move(frames), std::move(node_costs), std::move(base), std::move(lifted));
    return out;
}

GeneratedInstance generate_instance(int frames, int detections_per_frame, int trajectories, double noise,
                                    std::uint64_t seed)
{
    GeneratorConfig cfg;
    cfg.frames = frames;
    cfg.detections_per_frame = detections_per_frame;
    cfg.trajectories = trajectories;
    cfg.noise = noise;
    cfg.seed = seed;
    return generate_instance(cfg);
}

} // namespace ldp
