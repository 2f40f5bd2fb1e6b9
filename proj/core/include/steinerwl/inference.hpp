#pragma once

#include <vector>

#include "steinerwl/geometry.hpp"
#include "steinerwl/hanan.hpp"
#include "steinerwl/model.hpp"

namespace steinerwl {

class ThreadPool;

inline constexpr double kDefaultThreshold = 0.3;

// Candidates whose sigmoid(logit) exceeds `threshold`, in graph node order.
std::vector<Point> select_candidates(const HananGraph& graph, const Logits<float>& logits,
                                     double threshold);

// One-net prediction. Nets without Hanan candidates bypass the model.
std::vector<Point> predict_steiner(const Net& net, const ModelParams<float>& params,
                                   double threshold = kDefaultThreshold);

struct WlEstimate {
    Length wl = 0;
    RectTree tree;
    Length wl_unpruned = 0;  // MST over pins and every predicted point
    std::size_t predicted = 0;
    std::size_t kept = 0;    // Steiner points surviving pruning
};

// MST over pins plus `steiner`, pruned of useless points. Every surviving
// Steiner point has tree degree >= 3 and strictly shortens the tree, and the
// result is never longer than the MST over the pins alone.
WlEstimate estimate_wl_from_points(const Net& net, const std::vector<Point>& steiner);

WlEstimate estimate_wl(const Net& net, const ModelParams<float>& params,
                       double threshold = kDefaultThreshold);

struct InferenceOptions {
    double threshold = kDefaultThreshold;
    std::size_t batch_size = 16;
    std::size_t buckets = 5;  // size groups used to form batches of similar nets
};

struct InferenceResult {
    std::vector<std::vector<Point>> steiner;
    std::vector<WlEstimate> estimates;
    double seconds = 0;  // forward passes + MST construction, preprocessing excluded
};

// Batched inference: nets are sorted by Hanan size, split into `buckets`
// groups, and each group is run in stacked batches of `batch_size` nets.
InferenceResult infer_many(const std::vector<Net>& nets, const ModelParams<float>& params,
                           const InferenceOptions& options, ThreadPool* pool = nullptr);

}  // namespace steinerwl
