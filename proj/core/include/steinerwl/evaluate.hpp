#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "steinerwl/inference.hpp"
#include "steinerwl/oracle.hpp"

namespace steinerwl {

class ThreadPool;

enum class Method { mst, i1s, exact, model };

inline constexpr std::array<Method, 4> kAllMethods{Method::mst, Method::i1s, Method::exact, Method::model};

const char* to_string(Method m);
Method method_from_string(const std::string& s);
// Comma-separated list, e.g. "mst,exact".
std::vector<Method> parse_methods(const std::string& list);

struct DegreeBucket {
    std::size_t lo, hi;
};
// Degree groups of the per-degree report: 3-9, 10-19, ..., 50-59, 60-64.
inline constexpr std::array<DegreeBucket, 7> kDegreeBuckets{{
    {3, 9}, {10, 19}, {20, 29}, {30, 39}, {40, 49}, {50, 59}, {60, 64}}};
std::optional<std::size_t> degree_bucket(std::size_t degree);
std::string bucket_label(const DegreeBucket& b);

// A net with its reference wirelength: the exact optimum when available,
// otherwise the iterated 1-Steiner length (ref_exact = false).
struct ReferencedNet {
    std::string netlist;
    Net net;
    Length wl_ref = 0;
    bool ref_exact = true;
};

std::vector<ReferencedNet> compute_references(const std::string& netlist, const std::vector<Net>& nets,
                                              const ExactBudget& budget, ThreadPool* pool = nullptr);

double error_pct(Length wl, Length ref);

struct NetResult {
    std::string netlist;
    std::string id;
    std::size_t degree = 0;
    Length wl_ref = 0;
    bool ref_exact = true;
    std::array<std::optional<Length>, 4> wl;         // indexed by Method
    std::optional<Length> wl_model_unpruned;
    std::array<double, 4> runtime_us{};              // per method, this net
};

struct EvalOptions {
    std::vector<Method> methods{Method::mst, Method::exact};
    InferenceOptions inference;
    ExactBudget budget;
};

struct WlReport {
    std::vector<Method> methods;
    std::vector<NetResult> nets;
    std::array<double, 4> total_seconds{};

    struct Aggregate {
        std::string scope;  // overall | netlist | degree
        std::string key;
        Method method;
        std::size_t count = 0;
        double mean_error_pct = 0;
    };
    // Overall, per-netlist (first-seen order), then all seven degree buckets.
    std::vector<Aggregate> aggregates() const;
    double mean_error(Method m) const;

    void write_nets_csv(std::ostream& out) const;
    void write_summary_csv(std::ostream& out) const;
    void write_runtime_csv(std::ostream& out) const;

    // Rebuilds a report (without runtimes) from write_nets_csv output.
    static WlReport read_nets_csv(std::istream& in);
};

WlReport evaluate(const std::vector<ReferencedNet>& nets, const EvalOptions& options,
                  const ModelParams<float>* model, ThreadPool* pool = nullptr);

struct SweepRow {
    std::string label;
    std::size_t layers = 0;
    std::size_t parameters = 0;
    double threshold = kDefaultThreshold;
    std::size_t batch_size = 0;
    std::size_t nets = 0;
    double mean_error_pct = 0;
    double total_seconds = 0;
    double mean_us_per_net = 0;
};

SweepRow run_sweep_point(const std::string& label, const std::vector<ReferencedNet>& nets,
                         const ModelParams<float>& params, const InferenceOptions& options,
                         ThreadPool* pool = nullptr, std::size_t repeats = 1);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace steinerwl
