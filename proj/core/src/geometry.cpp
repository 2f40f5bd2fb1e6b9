#include "steinerwl/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace steinerwl {

std::vector<Point> dedupe_pins(std::span<const Point> raw) {
    std::vector<Point> out;
    out.reserve(raw.size());
    std::set<Point> seen;
    for (const Point& p : raw) {
        if (seen.insert(p).second) out.push_back(p);
    }
    if (out.size() < 2) {
        throw DegenerateNetError("degenerate net: " + std::to_string(out.size()) +
                                 " distinct pin(s), need at least 2");
    }
    return out;
}

Net::Net(std::string net_id, std::span<const Point> raw)
    : id(std::move(net_id)), pins(dedupe_pins(raw)) {}

BoundingBox bounding_box(std::span<const Point> points) {
    BoundingBox box;
    if (points.empty()) return box;
    box.min_x = box.max_x = points.front().x;
    box.min_y = box.max_y = points.front().y;
    for (const Point& p : points) {
        box.min_x = std::min(box.min_x, p.x);
        box.max_x = std::max(box.max_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_y = std::max(box.max_y, p.y);
    }
    return box;
}

Length bbox_half_perimeter(std::span<const Point> points) {
    const BoundingBox box = bounding_box(points);
    return (box.max_x - box.min_x) + (box.max_y - box.min_y);
}

Length bbox_half_perimeter(const Net& net) { return bbox_half_perimeter(net.pins); }

Length RectTree::recompute_length() const {
    Length total = 0;
    for (const Edge& e : edges) total += l1_distance(points[e.u], points[e.v]);
    return total;
}

bool RectTree::is_spanning_tree() const {
    const std::size_t n = points.size();
    if (n == 0) return edges.empty();
    if (edges.size() != n - 1) return false;
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (const Edge& e : edges) {
        if (e.u >= n || e.v >= n) return false;
        const auto ru = find(e.u);
        const auto rv = find(e.v);
        if (ru == rv) return false;
        parent[ru] = rv;
    }
    return true;
}

}  // namespace steinerwl
