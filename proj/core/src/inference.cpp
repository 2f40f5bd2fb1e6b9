#include "steinerwl/inference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

#include "steinerwl/parallel.hpp"
#include "steinerwl/tree.hpp"

namespace steinerwl {

std::vector<Point> select_candidates(const HananGraph& graph, const Logits<float>& logits,
                                     double threshold) {
    std::vector<Point> out;
    for (std::size_t k = 0; k < graph.n_candidates; ++k) {
        const std::size_t node = graph.n_pins + k;
        if (sigmoid(static_cast<double>(logits(static_cast<Eigen::Index>(node)))) > threshold) {
            out.push_back(graph.nodes[node]);
        }
    }
    return out;
}

std::vector<Point> predict_steiner(const Net& net, const ModelParams<float>& params, double threshold) {
    const HananGraph graph = build_hanan_graph(net);
    if (graph.n_candidates == 0) return {};
    const GraphFeatures features = featurize(graph);
    const auto batch = make_batch<float>(features);
    return select_candidates(graph, forward(params, batch), threshold);
}

WlEstimate estimate_wl_from_points(const Net& net, const std::vector<Point>& predicted) {
    WlEstimate est;
    est.predicted = predicted.size();
    const RectTree pins_only = rectilinear_mst(net.pins);
    if (predicted.empty()) {
        est.tree = pins_only;
        est.wl = est.wl_unpruned = pins_only.total_length;
        return est;
    }

    std::set<Point> seen(net.pins.begin(), net.pins.end());
    std::vector<Point> steiner;
    for (const Point& p : predicted) {
        if (seen.insert(p).second) steiner.push_back(p);
    }
    auto build = [&](const std::vector<Point>& extra) {
        std::vector<Point> all(net.pins);
        all.insert(all.end(), extra.begin(), extra.end());
        return rectilinear_mst(all);
    };

    RectTree tree = build(steiner);
    est.wl_unpruned = tree.total_length;
    // Structural pruning, then drop any point whose removal does not lengthen
    // the tree, until neither changes anything.
    for (;;) {
        const RectTree pruned = prune_steiner(tree, net.pins);
        if (pruned.points.size() != tree.points.size()) {
            steiner = steiner_points_of(pruned, net.pins);
            tree = build(steiner);
            continue;
        }
        bool removed = false;
        for (std::size_t i = 0; i < steiner.size(); ++i) {
            std::vector<Point> without(steiner);
            without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
            RectTree candidate = build(without);
            if (candidate.total_length <= tree.total_length) {
                steiner = std::move(without);
                tree = std::move(candidate);
                removed = true;
                break;
            }
        }
        if (!removed) break;
    }
    if (tree.total_length > pins_only.total_length) {
        tree = pins_only;
        steiner.clear();
    }
    est.kept = steiner.size();
    est.wl = tree.total_length;
    est.tree = std::move(tree);
    return est;
}

WlEstimate estimate_wl(const Net& net, const ModelParams<float>& params, double threshold) {
    if (net.degree() <= 2) {
        WlEstimate est;
        est.tree = rectilinear_mst(net.pins);
        est.wl = est.wl_unpruned = bbox_half_perimeter(net);
        return est;
    }
    return estimate_wl_from_points(net, predict_steiner(net, params, threshold));
}

InferenceResult infer_many(const std::vector<Net>& nets, const ModelParams<float>& params,
                           const InferenceOptions& options, ThreadPool* pool) {
    const std::size_t n = nets.size();
    InferenceResult result;
    result.steiner.assign(n, {});
    result.estimates.assign(n, {});

    std::vector<HananGraph> graphs(n);
    std::vector<GraphFeatures> features(n);
    std::vector<std::size_t> model_nets;
    for (std::size_t i = 0; i < n; ++i) {
        graphs[i] = build_hanan_graph(nets[i]);
        if (nets[i].degree() > 2 && graphs[i].n_candidates > 0) {
            features[i] = featurize(graphs[i]);
            model_nets.push_back(i);
        }
    }
    std::stable_sort(model_nets.begin(), model_nets.end(), [&](std::size_t a, std::size_t b) {
        return graphs[a].size() < graphs[b].size();
    });

    // Batches never straddle a size-bucket boundary.
    std::vector<std::vector<std::size_t>> batches;
    const std::size_t buckets = std::max<std::size_t>(1, options.buckets);
    const std::size_t per_batch = std::max<std::size_t>(1, options.batch_size);
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t begin = model_nets.size() * b / buckets;
        const std::size_t end = model_nets.size() * (b + 1) / buckets;
        for (std::size_t s = begin; s < end; s += per_batch) {
            batches.emplace_back(model_nets.begin() + static_cast<std::ptrdiff_t>(s),
                                 model_nets.begin() + static_cast<std::ptrdiff_t>(std::min(end, s + per_batch)));
        }
    }
    std::vector<GraphBatch<float>> prepared(batches.size());
    for (std::size_t b = 0; b < batches.size(); ++b) {
        std::vector<const GraphFeatures*> items;
        for (std::size_t i : batches[b]) items.push_back(&features[i]);
        prepared[b] = make_batch<float>(items);
    }

    const auto start = std::chrono::steady_clock::now();
    auto run_batch = [&](std::size_t b) {
        const Logits<float> logits = forward(params, prepared[b]);
        std::size_t offset = 0;
        for (std::size_t i : batches[b]) {
            const auto size = static_cast<Eigen::Index>(graphs[i].size());
            result.steiner[i] = select_candidates(graphs[i], logits.segment(offset, size), options.threshold);
            offset += graphs[i].size();
        }
    };
    auto run_tree = [&](std::size_t i) {
        if (nets[i].degree() <= 2) {
            result.estimates[i].tree = rectilinear_mst(nets[i].pins);
            result.estimates[i].wl = result.estimates[i].wl_unpruned = bbox_half_perimeter(nets[i]);
        } else {
            result.estimates[i] = estimate_wl_from_points(nets[i], result.steiner[i]);
        }
    };
    if (pool) {
        pool->parallel_for(batches.size(), run_batch);
        pool->parallel_for(n, run_tree);
    } else {
        for (std::size_t b = 0; b < batches.size(); ++b) run_batch(b);
        for (std::size_t i = 0; i < n; ++i) run_tree(i);
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace steinerwl
