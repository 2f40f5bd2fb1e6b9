#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "steinerwl/geometry.hpp"
#include "steinerwl/hanan.hpp"

namespace steinerwl {

class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct RsmtSolution {
    std::vector<Point> steiner_points;  // sorted by Point ordering
    RectTree tree;                      // spans pins followed by steiner_points
    Length wl = 0;
    bool exact = false;
};

struct ExactBudget {
    std::size_t max_degree = 8;
    // Upper bound on Steiner-set candidates examined while selecting the
    // canonical optimal set.
    std::uint64_t max_subsets = 5'000'000;
};

// Optimal rectilinear Steiner tree restricted to the Hanan grid.
//
// The optimal length comes from a Dreyfus-Wagner dynamic program over the
// Hanan grid graph; the same table yields every grid node that lies on some
// optimal tree. The returned Steiner set is the canonical optimum among all
// subsets S of Hanan candidates with |S| <= d - 2: smallest wirelength, then
// fewest points, then the lexicographically smallest sorted point list.
// Throws BudgetExceeded when the degree or the subset budget is exceeded.
RsmtSolution exact_rsmt(const Net& net, const ExactBudget& budget = {});

// Optimal length only (the dynamic program without Steiner-set selection).
Length exact_rsmt_length(const Net& net, std::size_t max_degree = 12);

// Greedy iterated 1-Steiner: add the Hanan candidate with the largest MST
// gain, drop Steiner points whose tree degree fell to <= 2, repeat while the
// gain is positive.
RsmtSolution iterated_one_steiner(const Net& net);

enum class LabelProvenance { exact, heuristic };

const char* to_string(LabelProvenance p);
LabelProvenance provenance_from_string(const std::string& s);

struct SteinerLabels {
    std::vector<std::uint8_t> labels;  // one per Hanan candidate, graph order
    Length wl_opt = 0;
    LabelProvenance provenance = LabelProvenance::exact;
};

struct LabeledSample {
    Net net;
    HananGraph graph;
    SteinerLabels labels;
};

// Labels with exact_rsmt within budget, iterated_one_steiner otherwise.
LabeledSample label_sample(const Net& net, const ExactBudget& budget = {});

// Marks the candidates of `graph` that appear in `steiner`.
std::vector<std::uint8_t> labels_from_points(const HananGraph& graph,
                                             const std::vector<Point>& steiner);

}  // namespace steinerwl
