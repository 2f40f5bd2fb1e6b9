#include "steinerwl/hanan.hpp"

#include <algorithm>
#include <string>

namespace steinerwl {

namespace {

std::vector<Coord> distinct_sorted(std::vector<Coord> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

std::size_t index_of(const std::vector<Coord>& sorted, Coord value) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), value) -
                                    sorted.begin());
}

}  // namespace

HananGraph build_hanan_graph(const Net& net, std::size_t node_cap) {
    if (net.pins.size() < 2) throw DegenerateNetError("degenerate net '" + net.id + "'");

    HananGraph g;
    std::vector<Coord> xs, ys;
    xs.reserve(net.pins.size());
    ys.reserve(net.pins.size());
    for (const Point& p : net.pins) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    g.xs = distinct_sorted(std::move(xs));
    g.ys = distinct_sorted(std::move(ys));

    const std::size_t nx = g.xs.size();
    const std::size_t ny = g.ys.size();
    const std::size_t total = nx * ny;
    if (total > node_cap) {
        throw HananCapExceeded("net '" + net.id + "' has " + std::to_string(total) +
                               " Hanan nodes, cap is " + std::to_string(node_cap));
    }

    std::vector<std::uint8_t> pin_cell(total, 0);
    for (const Point& p : net.pins) pin_cell[index_of(g.ys, p.y) * nx + index_of(g.xs, p.x)] = 1;

    g.nodes.reserve(total);
    g.is_pin.reserve(total);
    g.grid_index.assign(total, 0);
    for (int pass = 1; pass >= 0; --pass) {
        for (std::size_t iy = 0; iy < ny; ++iy) {
            for (std::size_t ix = 0; ix < nx; ++ix) {
                const std::size_t cell = iy * nx + ix;
                if (pin_cell[cell] != pass) continue;
                g.grid_index[cell] = static_cast<std::uint32_t>(g.nodes.size());
                g.nodes.push_back({g.xs[ix], g.ys[iy]});
                g.is_pin.push_back(static_cast<std::uint8_t>(pass));
            }
        }
    }
    g.n_pins = net.pins.size();
    g.n_candidates = total - g.n_pins;

    g.adjacency.reserve(2 * total);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::uint32_t a = g.node_at(ix, iy);
            if (ix + 1 < nx) {
                const std::uint32_t b = g.node_at(ix + 1, iy);
                g.adjacency.push_back({std::min(a, b), std::max(a, b)});
            }
            if (iy + 1 < ny) {
                const std::uint32_t b = g.node_at(ix, iy + 1);
                g.adjacency.push_back({std::min(a, b), std::max(a, b)});
            }
        }
    }
    std::sort(g.adjacency.begin(), g.adjacency.end());
    return g;
}

GraphFeatures featurize(const HananGraph& graph) {
    auto normalizer = [](const std::vector<Coord>& axis) {
        const double lo = static_cast<double>(axis.front());
        const double span = static_cast<double>(axis.back() - axis.front());
        return [lo, span](Coord c) {
            return span > 0 ? (static_cast<double>(c) - lo) / span : 0.5;
        };
    };
    const auto nx = normalizer(graph.xs);
    const auto ny = normalizer(graph.ys);

    GraphFeatures f;
    f.nodes.reserve(graph.size());
    for (std::size_t i = 0; i < graph.size(); ++i) {
        f.nodes.push_back({nx(graph.nodes[i].x), ny(graph.nodes[i].y),
                           graph.is_pin[i] ? 1.0 : 0.0});
    }
    f.edges.reserve(2 * graph.adjacency.size());
    for (const Edge& e : graph.adjacency) {
        const auto& a = f.nodes[e.u];
        const auto& b = f.nodes[e.v];
        f.edges.push_back({e.u, e.v, {a[0] - b[0], a[1] - b[1]}});
        f.edges.push_back({e.v, e.u, {b[0] - a[0], b[1] - a[1]}});
    }
    return f;
}

}  // namespace steinerwl
