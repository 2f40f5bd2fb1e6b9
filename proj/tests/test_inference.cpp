#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "steinerwl/dataset.hpp"
#include "steinerwl/evaluate.hpp"
#include "steinerwl/inference.hpp"
#include "steinerwl/oracle.hpp"
#include "steinerwl/parallel.hpp"
#include "steinerwl/random.hpp"
#include "steinerwl/tree.hpp"

using namespace steinerwl;

namespace {

ModelConfig small_config() {
    ModelConfig c;
    c.layers = 2;
    c.hidden = 8;
    c.mlp_hidden = 8;
    c.seed = 5;
    return c;
}

std::vector<Net> random_nets(std::size_t n, DegreeRange degrees, std::uint64_t seed) {
    SyntheticOptions o;
    o.degrees = degrees;
    std::vector<Net> nets;
    for (std::size_t i = 0; i < n; ++i) {
        nets.push_back(sample_synthetic_net(derive_seed(seed, i), o, "n" + std::to_string(i)));
    }
    return nets;
}

}  // namespace

TEST_CASE("all-zero model selects every candidate, threshold 1 selects none") {
    const auto zero = zero_params<float>(small_config());
    for (const Net& net : random_nets(10, {3, 9}, 1)) {
        const HananGraph g = build_hanan_graph(net);
        const auto all = predict_steiner(net, zero, 0.3);
        CHECK(all.size() == g.n_candidates);
        CHECK(std::equal(all.begin(), all.end(), g.nodes.begin() + static_cast<std::ptrdiff_t>(g.n_pins)));
        CHECK(predict_steiner(net, zero, 1.0).empty());
        CHECK(predict_steiner(net, zero, 0.5).empty());
    }
}

TEST_CASE("two-pin nets bypass the model") {
    auto params = init_params<float>(small_config());
    const std::vector<Point> two{{0, 0}, {7, 3}};
    const Net net("two", two);
    const auto est = estimate_wl(net, params);
    CHECK(est.wl == 10);
    CHECK(est.predicted == 0);
    const auto many = infer_many({net}, params, {});
    CHECK(many.estimates[0].wl == 10);
    CHECK(many.steiner[0].empty());
}

TEST_CASE("wirelength from point sets") {
    for (const Net& net : random_nets(40, {3, 8}, 2)) {
        const Length mst = mst_length(net.pins);
        CHECK(estimate_wl_from_points(net, {}).wl == mst);

        const auto exact = exact_rsmt(net);
        REQUIRE(exact.exact);
        const auto with_oracle = estimate_wl_from_points(net, exact.steiner_points);
        CHECK(with_oracle.wl == exact.wl);

        const HananGraph g = build_hanan_graph(net);
        const std::vector<Point> everything(g.nodes.begin() + static_cast<std::ptrdiff_t>(g.n_pins), g.nodes.end());
        const auto full = estimate_wl_from_points(net, everything);
        CHECK(full.wl <= mst);
        CHECK(full.wl >= exact.wl);
        CHECK(full.predicted == everything.size());
        CHECK(full.kept <= net.degree() - 2);
        CHECK(full.tree.total_length == full.wl);
        for (std::size_t d : tree_degrees(full.tree)) CHECK(d >= 1);
    }
    // pins passed as predictions are ignored
    const std::vector<Point> three{{0, 0}, {4, 0}, {2, 3}};
    const Net net("p", three);
    CHECK(estimate_wl_from_points(net, {{0, 0}, {4, 0}}).wl == mst_length(net.pins));
}

TEST_CASE("batched inference matches per-net inference") {
    const auto params = init_params<float>(small_config());
    const auto nets = random_nets(37, {3, 14}, 3);
    for (std::size_t batch : {1, 4, 16}) {
        InferenceOptions o;
        o.batch_size = batch;
        o.threshold = 0.45;
        const auto r = infer_many(nets, params, o);
        ThreadPool pool(2);
        const auto rp = infer_many(nets, params, o, &pool);
        for (std::size_t i = 0; i < nets.size(); ++i) {
            const auto single = estimate_wl(nets[i], params, 0.45);
            CHECK(r.estimates[i].wl == single.wl);
            CHECK(rp.estimates[i].wl == single.wl);
            CHECK(r.steiner[i] == rp.steiner[i]);
        }
    }
}

TEST_CASE("degree buckets") {
    CHECK(!degree_bucket(2));
    CHECK(degree_bucket(3) == 0u);
    CHECK(degree_bucket(9) == 0u);
    CHECK(degree_bucket(10) == 1u);
    CHECK(degree_bucket(59) == 5u);
    CHECK(degree_bucket(64) == 6u);
    CHECK(!degree_bucket(65));
    CHECK(bucket_label(kDegreeBuckets[0]) == "3-9");
    CHECK(bucket_label(kDegreeBuckets[6]) == "60-64");
    CHECK(error_pct(110, 100) == doctest::Approx(10.0));
    CHECK(parse_methods("mst,exact,model") == std::vector<Method>{Method::mst, Method::exact, Method::model});
    CHECK_THROWS(parse_methods("mst,flute"));
}

TEST_CASE("evaluation reports") {
    auto nets = random_nets(30, {3, 8}, 4);
    auto big = random_nets(4, {20, 45}, 5);
    auto refs = compute_references("synA", nets, {});
    const auto refs_big = compute_references("synB", big, {});
    for (const auto& r : refs) CHECK(r.ref_exact);
    for (const auto& r : refs_big) CHECK(!r.ref_exact);
    refs.insert(refs.end(), refs_big.begin(), refs_big.end());

    EvalOptions o;
    o.methods = {Method::mst, Method::i1s, Method::exact, Method::model};
    CHECK_THROWS_AS(evaluate(refs, o, nullptr), std::invalid_argument);
    const auto params = init_params<float>(small_config());
    const WlReport rep = evaluate(refs, o, &params);
    REQUIRE(rep.nets.size() == refs.size());
    for (std::size_t i = 0; i < 30; ++i) {
        const auto& n = rep.nets[i];
        REQUIRE(n.wl[static_cast<std::size_t>(Method::exact)]);
        CHECK(error_pct(*n.wl[static_cast<std::size_t>(Method::exact)], n.wl_ref) == 0.0);
        CHECK(*n.wl[static_cast<std::size_t>(Method::model)] >= n.wl_ref);
        CHECK(*n.wl[static_cast<std::size_t>(Method::model)] <= *n.wl[static_cast<std::size_t>(Method::mst)]);
        CHECK(*n.wl[static_cast<std::size_t>(Method::model)] <= *n.wl_model_unpruned);
    }
    for (std::size_t i = 30; i < rep.nets.size(); ++i) CHECK(!rep.nets[i].wl[static_cast<std::size_t>(Method::exact)]);

    EvalOptions exact_only;
    exact_only.methods = {Method::exact};
    const WlReport ex = evaluate({refs.begin(), refs.begin() + 30}, exact_only, nullptr);
    CHECK(ex.mean_error(Method::exact) == 0.0);

    const auto agg = rep.aggregates();
    std::size_t degree_rows = 0, netlist_rows = 0;
    for (const auto& a : agg) {
        if (a.scope == "degree") ++degree_rows;
        if (a.scope == "netlist") ++netlist_rows;
    }
    CHECK(degree_rows == 7 * 4);
    CHECK(netlist_rows == 2 * 4);
    CHECK(agg.front().scope == "overall");

    std::ostringstream a, b;
    rep.write_nets_csv(a);
    const WlReport again = evaluate(refs, o, &params);
    again.write_nets_csv(b);
    CHECK(a.str() == b.str());
    CHECK(a.str().starts_with("netlist,net,degree,ref,wl_ref,wl_mst,wl_i1s,wl_exact,wl_model,wl_model_unpruned,"));

    std::istringstream in(a.str());
    const WlReport back = WlReport::read_nets_csv(in);
    CHECK(back.methods == rep.methods);
    REQUIRE(back.nets.size() == rep.nets.size());
    std::ostringstream s1, s2;
    rep.write_summary_csv(s1);
    back.write_summary_csv(s2);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().starts_with("scope,key,method,nets,mean_error_pct\n"));

    std::ostringstream rt;
    rep.write_runtime_csv(rt);
    CHECK(rt.str().starts_with("method,nets,total_seconds,mean_us_per_net\n"));
}

TEST_CASE("sweep point produces one row") {
    const auto refs = compute_references("s", random_nets(12, {4, 7}, 6), {});
    const auto params = init_params<float>(small_config());
    InferenceOptions o;
    o.batch_size = 4;
    const SweepRow row = run_sweep_point("L2", refs, params, o, nullptr, 2);
    CHECK(row.label == "L2");
    CHECK(row.layers == 2);
    CHECK(row.parameters == params.parameter_count());
    CHECK(row.nets == 12);
    CHECK(row.batch_size == 4);
    CHECK(row.total_seconds > 0);
    std::ostringstream out;
    write_sweep_csv(out, {row});
    const std::string text = out.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.starts_with("label,layers,parameters,threshold,batch_size,nets,mean_error_pct,total_seconds,mean_us_per_net\n"));
}
