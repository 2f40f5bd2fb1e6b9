#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "steinerwl/geometry.hpp"

namespace steinerwl {

inline constexpr std::size_t kDefaultHananNodeCap = 4096;

class HananCapExceeded : public std::runtime_error {
public:
    explicit HananCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Hanan grid of a net as a graph. Nodes are the pins in row-major (y, x)
// order followed by the non-pin grid intersections in row-major order.
// Adjacency joins grid-consecutive nodes on the same row or column.
struct HananGraph {
    std::vector<Point> nodes;
    std::vector<std::uint8_t> is_pin;
    std::vector<Edge> adjacency;  // undirected, u < v, sorted
    std::size_t n_pins = 0;
    std::size_t n_candidates = 0;

    std::vector<Coord> xs;  // distinct pin x coordinates, ascending
    std::vector<Coord> ys;  // distinct pin y coordinates, ascending
    // node index of grid cell (ix, iy) at grid_index[iy * xs.size() + ix]
    std::vector<std::uint32_t> grid_index;

    std::size_t size() const { return nodes.size(); }
    std::uint32_t node_at(std::size_t ix, std::size_t iy) const {
        return grid_index[iy * xs.size() + ix];
    }
    // Candidate k (0-based) is node n_pins + k.
    const Point& candidate(std::size_t k) const { return nodes[n_pins + k]; }
};

HananGraph build_hanan_graph(const Net& net, std::size_t node_cap = kDefaultHananNodeCap);

// A message edge delivering information from `neighbor` to `center`;
// `feature` is the normalized displacement center - neighbor.
struct DirectedEdge {
    std::uint32_t center = 0;
    std::uint32_t neighbor = 0;
    std::array<double, 2> feature{};
};

struct GraphFeatures {
    std::vector<std::array<double, 3>> nodes;  // (x_norm, y_norm, pin_flag)
    std::vector<DirectedEdge> edges;           // both directions of every adjacency edge
};

// Per-net min-max normalization of coordinates into [0, 1]; an axis with a
// single distinct coordinate maps to 0.5.
GraphFeatures featurize(const HananGraph& graph);

}  // namespace steinerwl
