#include "steinerwl/oracle.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <set>
#include <string>

#include "steinerwl/tree.hpp"

namespace steinerwl {

namespace {

constexpr Length kInf = std::numeric_limits<Length>::max() / 4;

// In-place L1 distance transform on the Hanan lattice:
// cell[c] <- min_u cell[u] + l1(u, c).
void distance_transform(std::span<Length> cell, const std::vector<Coord>& xs,
                        const std::vector<Coord>& ys) {
    const std::size_t nx = xs.size();
    const std::size_t ny = ys.size();
    for (std::size_t iy = 0; iy < ny; ++iy) {
        Length* row = cell.data() + iy * nx;
        for (std::size_t ix = 1; ix < nx; ++ix) {
            row[ix] = std::min(row[ix], row[ix - 1] + (xs[ix] - xs[ix - 1]));
        }
        for (std::size_t ix = nx - 1; ix-- > 0;) {
            row[ix] = std::min(row[ix], row[ix + 1] + (xs[ix + 1] - xs[ix]));
        }
    }
    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t iy = 1; iy < ny; ++iy) {
            Length& here = cell[iy * nx + ix];
            here = std::min(here, cell[(iy - 1) * nx + ix] + (ys[iy] - ys[iy - 1]));
        }
        for (std::size_t iy = ny - 1; iy-- > 0;) {
            Length& here = cell[iy * nx + ix];
            here = std::min(here, cell[(iy + 1) * nx + ix] + (ys[iy + 1] - ys[iy]));
        }
    }
}

// Dreyfus-Wagner over the Hanan lattice. Returns, for every grid cell c, the
// length of the shortest rectilinear Steiner tree spanning all pins and c.
std::vector<Length> steiner_tree_through_cells(const Net& net, const HananGraph& g) {
    const std::size_t k = net.pins.size();
    const std::size_t cells = g.xs.size() * g.ys.size();
    const std::size_t full = (std::size_t{1} << k) - 1;
    std::vector<Length> dp((full + 1) * cells, kInf);
    auto row = [&](std::size_t mask) { return std::span<Length>(dp.data() + mask * cells, cells); };

    for (std::size_t t = 0; t < k; ++t) {
        auto r = row(std::size_t{1} << t);
        for (std::size_t iy = 0; iy < g.ys.size(); ++iy) {
            for (std::size_t ix = 0; ix < g.xs.size(); ++ix) {
                r[iy * g.xs.size() + ix] = l1_distance(net.pins[t], {g.xs[ix], g.ys[iy]});
            }
        }
    }
    for (std::size_t mask = 3; mask <= full; ++mask) {
        if (std::popcount(mask) < 2) continue;
        auto target = row(mask);
        const std::size_t low = mask & (~mask + 1);
        for (std::size_t sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
            if (!(sub & low)) continue;
            const Length* a = dp.data() + sub * cells;
            const Length* b = dp.data() + (mask ^ sub) * cells;
            for (std::size_t c = 0; c < cells; ++c) target[c] = std::min(target[c], a[c] + b[c]);
        }
        distance_transform(target, g.xs, g.ys);
    }
    auto last = row(full);
    return {last.begin(), last.end()};
}

// Rebuilds the MST over pins + steiner and prunes until no Steiner point of
// degree <= 2 remains. Length never increases.
RectTree canonical_tree(std::span<const Point> pins, std::vector<Point>& steiner) {
    for (;;) {
        std::sort(steiner.begin(), steiner.end());
        std::vector<Point> all(pins.begin(), pins.end());
        all.insert(all.end(), steiner.begin(), steiner.end());
        RectTree tree = rectilinear_mst(all);
        const RectTree pruned = prune_steiner(tree, pins);
        if (pruned.points.size() == tree.points.size()) return tree;
        steiner = steiner_points_of(pruned, pins);
    }
}

}  // namespace

Length exact_rsmt_length(const Net& net, std::size_t max_degree) {
    if (net.degree() > max_degree) {
        throw BudgetExceeded("exact_rsmt: degree " + std::to_string(net.degree()) +
                             " exceeds budget " + std::to_string(max_degree));
    }
    const HananGraph g = build_hanan_graph(net);
    const auto through = steiner_tree_through_cells(net, g);
    return *std::min_element(through.begin(), through.end());
}

RsmtSolution exact_rsmt(const Net& net, const ExactBudget& budget) {
    const std::size_t d = net.degree();
    if (d > budget.max_degree) {
        throw BudgetExceeded("exact_rsmt: degree " + std::to_string(d) + " exceeds budget " +
                             std::to_string(budget.max_degree));
    }
    const HananGraph g = build_hanan_graph(net);
    const auto through = steiner_tree_through_cells(net, g);
    const Length optimum = *std::min_element(through.begin(), through.end());

    // Only grid nodes lying on some optimal tree can belong to an optimal set.
    std::vector<Point> pool;
    const std::size_t nx = g.xs.size();
    for (std::size_t c = 0; c < through.size(); ++c) {
        if (through[c] != optimum) continue;
        const std::uint32_t node = g.grid_index[c];
        if (!g.is_pin[node]) pool.push_back({g.xs[c % nx], g.ys[c / nx]});
    }
    std::sort(pool.begin(), pool.end());

    std::vector<Point> pts(net.pins);
    std::uint64_t examined = 0;
    const std::size_t max_k = std::min(d >= 2 ? d - 2 : 0, pool.size());
    std::vector<Point> chosen;
    bool found = false;
    for (std::size_t k = 0; k <= max_k && !found; ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        for (;;) {
            if (++examined > budget.max_subsets) {
                throw BudgetExceeded("exact_rsmt: subset budget exhausted for net '" + net.id + "'");
            }
            pts.resize(d);
            for (std::size_t i : idx) pts.push_back(pool[i]);
            if (mst_length(pts) == optimum) {
                for (std::size_t i : idx) chosen.push_back(pool[i]);
                found = true;
                break;
            }
            // next combination in lexicographic order
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == pool.size() - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    if (!found) {
        throw std::logic_error("exact_rsmt: no Hanan Steiner set attains the optimum for net '" +
                               net.id + "'");
    }

    RsmtSolution sol;
    sol.tree = canonical_tree(net.pins, chosen);
    sol.steiner_points = std::move(chosen);
    sol.wl = sol.tree.total_length;
    sol.exact = true;
    return sol;
}

RsmtSolution iterated_one_steiner(const Net& net) {
    const HananGraph g = build_hanan_graph(net);
    const std::set<Point> pins(net.pins.begin(), net.pins.end());

    std::vector<Point> steiner;
    RectTree tree = rectilinear_mst(net.pins);
    for (;;) {
        const std::set<Point> used(steiner.begin(), steiner.end());
        Length best = tree.total_length;
        const Point* pick = nullptr;
        for (std::size_t c = 0; c < g.n_candidates; ++c) {
            const Point& cand = g.candidate(c);
            if (used.count(cand)) continue;
            const Length len = mst_length_with_point(tree, cand);
            if (len < best) {
                best = len;
                pick = &cand;
            }
        }
        if (pick == nullptr) break;
        tree = mst_with_point(tree, *pick);
        steiner.push_back(*pick);

        for (;;) {
            const auto deg = tree_degrees(tree);
            std::vector<Point> keep;
            for (std::size_t i = 0; i < tree.points.size(); ++i) {
                if (!pins.count(tree.points[i]) && deg[i] > 2) keep.push_back(tree.points[i]);
            }
            if (keep.size() == steiner.size()) break;
            steiner = keep;
            std::vector<Point> all(net.pins);
            all.insert(all.end(), steiner.begin(), steiner.end());
            tree = rectilinear_mst(all);
        }
    }

    RsmtSolution sol;
    sol.tree = canonical_tree(net.pins, steiner);
    sol.steiner_points = std::move(steiner);
    sol.wl = sol.tree.total_length;
    sol.exact = false;
    return sol;
}

const char* to_string(LabelProvenance p) {
    return p == LabelProvenance::exact ? "exact" : "heuristic";
}

LabelProvenance provenance_from_string(const std::string& s) {
    if (s == "exact") return LabelProvenance::exact;
    if (s == "heuristic") return LabelProvenance::heuristic;
    throw std::invalid_argument("unknown label provenance '" + s + "'");
}

std::vector<std::uint8_t> labels_from_points(const HananGraph& graph,
                                             const std::vector<Point>& steiner) {
    std::vector<std::uint8_t> labels(graph.n_candidates, 0);
    for (const Point& p : steiner) {
        const auto ix = std::lower_bound(graph.xs.begin(), graph.xs.end(), p.x) - graph.xs.begin();
        const auto iy = std::lower_bound(graph.ys.begin(), graph.ys.end(), p.y) - graph.ys.begin();
        if (static_cast<std::size_t>(ix) >= graph.xs.size() ||
            static_cast<std::size_t>(iy) >= graph.ys.size() || graph.xs[ix] != p.x ||
            graph.ys[iy] != p.y) {
            throw std::invalid_argument("Steiner point is not on the Hanan grid");
        }
        const std::uint32_t node = graph.node_at(ix, iy);
        if (graph.is_pin[node]) throw std::invalid_argument("Steiner point coincides with a pin");
        labels[node - graph.n_pins] = 1;
    }
    return labels;
}

LabeledSample label_sample(const Net& net, const ExactBudget& budget) {
    LabeledSample s;
    s.net = net;
    s.graph = build_hanan_graph(net);
    RsmtSolution sol;
    try {
        sol = exact_rsmt(net, budget);
        s.labels.provenance = LabelProvenance::exact;
    } catch (const BudgetExceeded&) {
        sol = iterated_one_steiner(net);
        s.labels.provenance = LabelProvenance::heuristic;
    }
    s.labels.labels = labels_from_points(s.graph, sol.steiner_points);
    s.labels.wl_opt = sol.wl;
    return s;
}

}  // namespace steinerwl
