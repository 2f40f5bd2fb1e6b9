#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "steinerwl/geometry.hpp"

namespace steinerwl {

class DuplicatePointError : public std::invalid_argument {
public:
    explicit DuplicatePointError(const std::string& what) : std::invalid_argument(what) {}
};

// Minimum spanning tree of the complete L1 graph over `points` (Prim, O(n^2)).
// Edges are ordered by the strict key (length, min index, max index), which
// makes the tree unique. Throws DuplicatePointError on repeated points.
RectTree rectilinear_mst(std::span<const Point> points);

// Length of the L1 minimum spanning tree; no duplicate check, no tree.
Length mst_length(std::span<const Point> points);

// MST over tree.points + {extra}, given that `tree` is already the MST of its
// points. Runs Kruskal over the tree edges plus the star of the new point.
RectTree mst_with_point(const RectTree& tree, const Point& extra);
Length mst_length_with_point(const RectTree& tree, const Point& extra);

inline Length wirelength(const RectTree& tree) { return tree.recompute_length(); }

// Repeatedly removes non-pin leaves and splices out non-pin nodes of degree 2.
// The result spans every pin and is never longer than the input.
RectTree prune_steiner(const RectTree& tree, std::span<const Point> pins);

// Points of `tree` that are not pins, in tree order.
std::vector<Point> steiner_points_of(const RectTree& tree, std::span<const Point> pins);

std::vector<std::size_t> tree_degrees(const RectTree& tree);

}  // namespace steinerwl
