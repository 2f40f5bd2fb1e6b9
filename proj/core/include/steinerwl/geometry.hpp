#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace steinerwl {

using Coord = std::int64_t;
using Length = std::int64_t;

struct Point {
    Coord x = 0;
    Coord y = 0;

    friend constexpr auto operator<=>(const Point&, const Point&) = default;
};

// Row-major (y, x) order used for Hanan node enumeration.
struct RowMajorLess {
    constexpr bool operator()(const Point& a, const Point& b) const {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    }
};

constexpr Length l1_distance(const Point& a, const Point& b) {
    const Coord dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    const Coord dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx + dy;
}

class DegenerateNetError : public std::runtime_error {
public:
    explicit DegenerateNetError(const std::string& what) : std::runtime_error(what) {}
};

// Removes duplicate points, keeping the first occurrence of each.
// Throws DegenerateNetError when fewer than two distinct points remain.
std::vector<Point> dedupe_pins(std::span<const Point> raw);

struct Net {
    std::string id;
    std::vector<Point> pins;

    Net() = default;
    // Deduplicates `raw`; throws DegenerateNetError on < 2 distinct pins.
    Net(std::string net_id, std::span<const Point> raw);

    std::size_t degree() const { return pins.size(); }
};

struct BoundingBox {
    Coord min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};

BoundingBox bounding_box(std::span<const Point> points);

Length bbox_half_perimeter(const Net& net);
Length bbox_half_perimeter(std::span<const Point> points);

struct Edge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;

    friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

// A tree over `points`; `total_length` caches the exact sum of L1 edge lengths.
struct RectTree {
    std::vector<Point> points;
    std::vector<Edge> edges;
    Length total_length = 0;

    bool is_spanning_tree() const;
    Length recompute_length() const;
};

}  // namespace steinerwl
