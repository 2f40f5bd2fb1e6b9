#include "steinerwl/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

namespace steinerwl {

namespace {

struct EdgeKey {
    Length length;
    std::uint32_t lo;
    std::uint32_t hi;

    friend constexpr auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

EdgeKey key_of(std::span<const Point> pts, std::uint32_t a, std::uint32_t b) {
    return {l1_distance(pts[a], pts[b]), std::min(a, b), std::max(a, b)};
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0u);
    }
    std::uint32_t find(std::uint32_t a) {
        while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
        return a;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[a] = b;
        return true;
    }

private:
    std::vector<std::uint32_t> parent_;
};

void check_distinct(std::span<const Point> points) {
    std::vector<Point> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DuplicatePointError("rectilinear_mst: duplicate point");
    }
}

}  // namespace

RectTree rectilinear_mst(std::span<const Point> points) {
    if (points.empty()) throw std::invalid_argument("rectilinear_mst: empty point set");
    check_distinct(points);

    const auto n = static_cast<std::uint32_t>(points.size());
    RectTree tree;
    tree.points.assign(points.begin(), points.end());
    tree.edges.reserve(n - 1);

    constexpr EdgeKey kNone{std::numeric_limits<Length>::max(), 0, 0};
    std::vector<EdgeKey> best(n, kNone);
    std::vector<char> in_tree(n, 0);
    in_tree[0] = 1;
    for (std::uint32_t v = 1; v < n; ++v) {
        best[v] = key_of(points, 0, v);
    }
    for (std::uint32_t step = 1; step < n; ++step) {
        std::uint32_t pick = 0;
        EdgeKey pick_key = kNone;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (!in_tree[v] && best[v] < pick_key) {
                pick_key = best[v];
                pick = v;
            }
        }
        in_tree[pick] = 1;
        tree.edges.push_back({pick_key.lo, pick_key.hi});
        tree.total_length += pick_key.length;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const EdgeKey k = key_of(points, pick, v);
            if (k < best[v]) best[v] = k;
        }
    }
    return tree;
}

Length mst_length(std::span<const Point> points) {
    const std::size_t n = points.size();
    if (n < 2) return 0;
    // Nodes outside the tree occupy [1, remaining]; picked nodes are swap-removed.
    thread_local std::vector<Point> pts;
    thread_local std::vector<Length> best;
    pts.assign(points.begin(), points.end());
    best.resize(n);
    for (std::size_t v = 1; v < n; ++v) best[v] = l1_distance(pts[0], pts[v]);
    Length total = 0;
    std::size_t remaining = n - 1;
    while (remaining > 0) {
        std::size_t pick = 1;
        for (std::size_t v = 2; v <= remaining; ++v) {
            if (best[v] < best[pick]) pick = v;
        }
        total += best[pick];
        const Point p = pts[pick];
        pts[pick] = pts[remaining];
        best[pick] = best[remaining];
        --remaining;
        for (std::size_t v = 1; v <= remaining; ++v) {
            const Length d = l1_distance(p, pts[v]);
            if (d < best[v]) best[v] = d;
        }
    }
    return total;
}

namespace {

template <bool BuildTree>
std::pair<Length, std::vector<Edge>> kruskal_with_point(const RectTree& tree, const Point& extra) {
    const auto n = static_cast<std::uint32_t>(tree.points.size());
    std::vector<Point> pts(tree.points);
    pts.push_back(extra);
    std::vector<EdgeKey> keys;
    keys.reserve(2 * n);
    for (const Edge& e : tree.edges) keys.push_back(key_of(pts, e.u, e.v));
    for (std::uint32_t v = 0; v < n; ++v) keys.push_back(key_of(pts, v, n));
    std::sort(keys.begin(), keys.end());

    DisjointSets sets(n + 1);
    Length total = 0;
    std::vector<Edge> edges;
    if constexpr (BuildTree) edges.reserve(n);
    std::uint32_t added = 0;
    for (const EdgeKey& k : keys) {
        if (!sets.unite(k.lo, k.hi)) continue;
        total += k.length;
        if constexpr (BuildTree) edges.push_back({k.lo, k.hi});
        if (++added == n) break;
    }
    return {total, std::move(edges)};
}

}  // namespace

RectTree mst_with_point(const RectTree& tree, const Point& extra) {
    auto [total, edges] = kruskal_with_point<true>(tree, extra);
    RectTree out;
    out.points = tree.points;
    out.points.push_back(extra);
    out.edges = std::move(edges);
    out.total_length = total;
    return out;
}

Length mst_length_with_point(const RectTree& tree, const Point& extra) {
    return kruskal_with_point<false>(tree, extra).first;
}

std::vector<std::size_t> tree_degrees(const RectTree& tree) {
    std::vector<std::size_t> deg(tree.points.size(), 0);
    for (const Edge& e : tree.edges) {
        ++deg[e.u];
        ++deg[e.v];
    }
    return deg;
}

RectTree prune_steiner(const RectTree& tree, std::span<const Point> pins) {
    const std::set<Point> pin_set(pins.begin(), pins.end());
    const std::size_t n = tree.points.size();

    std::vector<std::set<std::uint32_t>> adj(n);
    for (const Edge& e : tree.edges) {
        adj[e.u].insert(e.v);
        adj[e.v].insert(e.u);
    }
    std::vector<char> alive(n, 1);
    std::vector<char> is_pin(n, 0);
    for (std::size_t i = 0; i < n; ++i) is_pin[i] = pin_set.count(tree.points[i]) ? 1 : 0;

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::uint32_t i = 0; i < n; ++i) {
            if (!alive[i] || is_pin[i]) continue;
            if (adj[i].size() <= 1) {
                for (std::uint32_t j : adj[i]) adj[j].erase(i);
                adj[i].clear();
                alive[i] = 0;
                changed = true;
            } else if (adj[i].size() == 2) {
                const std::uint32_t a = *adj[i].begin();
                const std::uint32_t b = *std::next(adj[i].begin());
                adj[a].erase(i);
                adj[b].erase(i);
                adj[a].insert(b);
                adj[b].insert(a);
                adj[i].clear();
                alive[i] = 0;
                changed = true;
            }
        }
    }

    RectTree out;
    std::vector<std::uint32_t> remap(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        remap[i] = static_cast<std::uint32_t>(out.points.size());
        out.points.push_back(tree.points[i]);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        for (std::uint32_t j : adj[i]) {
            if (i < j) out.edges.push_back({remap[i], remap[j]});
        }
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.total_length = out.recompute_length();
    return out;
}

std::vector<Point> steiner_points_of(const RectTree& tree, std::span<const Point> pins) {
    const std::set<Point> pin_set(pins.begin(), pins.end());
    std::vector<Point> out;
    for (const Point& p : tree.points) {
        if (!pin_set.count(p)) out.push_back(p);
    }
    return out;
}

}  // namespace steinerwl
