#include "steinerwl/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "steinerwl/parallel.hpp"
#include "steinerwl/tree.hpp"

namespace steinerwl {

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::size_t index_of(Method m) { return static_cast<std::size_t>(m); }

void run_parallel(ThreadPool* pool, std::size_t n, const std::function<void(std::size_t)>& f) {
    if (pool) {
        pool->parallel_for(n, f);
    } else {
        for (std::size_t i = 0; i < n; ++i) f(i);
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

const char* to_string(Method m) {
    switch (m) {
        case Method::mst: return "mst";
        case Method::i1s: return "i1s";
        case Method::exact: return "exact";
        case Method::model: return "model";
    }
    return "?";
}

Method method_from_string(const std::string& s) {
    for (Method m : kAllMethods) {
        if (s == to_string(m)) return m;
    }
    throw std::invalid_argument("unknown method '" + s + "' (expected mst, i1s, exact, model)");
}

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> out;
    std::istringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const Method m = method_from_string(item);
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    if (out.empty()) throw std::invalid_argument("empty method list");
    return out;
}

std::optional<std::size_t> degree_bucket(std::size_t degree) {
    for (std::size_t b = 0; b < kDegreeBuckets.size(); ++b) {
        if (degree >= kDegreeBuckets[b].lo && degree <= kDegreeBuckets[b].hi) return b;
    }
    return std::nullopt;
}

std::string bucket_label(const DegreeBucket& b) {
    return std::to_string(b.lo) + "-" + std::to_string(b.hi);
}

double error_pct(Length wl, Length ref) {
    return 100.0 * static_cast<double>(wl - ref) / static_cast<double>(ref);
}

std::vector<ReferencedNet> compute_references(const std::string& netlist, const std::vector<Net>& nets,
                                              const ExactBudget& budget, ThreadPool* pool) {
    std::vector<ReferencedNet> out(nets.size());
    run_parallel(pool, nets.size(), [&](std::size_t i) {
        ReferencedNet& r = out[i];
        r.netlist = netlist;
        r.net = nets[i];
        try {
            r.wl_ref = exact_rsmt(nets[i], budget).wl;
            r.ref_exact = true;
        } catch (const BudgetExceeded&) {
            r.wl_ref = iterated_one_steiner(nets[i]).wl;
            r.ref_exact = false;
        }
    });
    return out;
}

WlReport evaluate(const std::vector<ReferencedNet>& nets, const EvalOptions& options,
                  const ModelParams<float>* model, ThreadPool* pool) {
    const bool want_model =
        std::find(options.methods.begin(), options.methods.end(), Method::model) != options.methods.end();
    if (want_model && model == nullptr) throw std::invalid_argument("evaluate: method 'model' needs a checkpoint");

    WlReport report;
    report.methods = options.methods;
    report.nets.resize(nets.size());
    for (std::size_t i = 0; i < nets.size(); ++i) {
        auto& r = report.nets[i];
        r.netlist = nets[i].netlist;
        r.id = nets[i].net.id;
        r.degree = nets[i].net.degree();
        r.wl_ref = nets[i].wl_ref;
        r.ref_exact = nets[i].ref_exact;
    }

    for (Method m : options.methods) {
        if (m == Method::model) continue;
        const auto start = Clock::now();
        run_parallel(pool, nets.size(), [&](std::size_t i) {
            const Net& net = nets[i].net;
            auto& r = report.nets[i];
            const auto t0 = Clock::now();
            switch (m) {
                case Method::mst:
                    r.wl[index_of(m)] = rectilinear_mst(net.pins).total_length;
                    break;
                case Method::i1s:
                    r.wl[index_of(m)] = iterated_one_steiner(net).wl;
                    break;
                case Method::exact:
                    try {
                        r.wl[index_of(m)] = exact_rsmt(net, options.budget).wl;
                    } catch (const BudgetExceeded&) {
                        r.wl[index_of(m)] = std::nullopt;
                    }
                    break;
                case Method::model:
                    break;
            }
            r.runtime_us[index_of(m)] = micros_since(t0);
        });
        report.total_seconds[index_of(m)] = micros_since(start) * 1e-6;
    }

    if (want_model) {
        std::vector<Net> plain;
        plain.reserve(nets.size());
        for (const auto& n : nets) plain.push_back(n.net);
        const InferenceResult inf = infer_many(plain, *model, options.inference, pool);
        const double per_net = nets.empty() ? 0.0 : inf.seconds * 1e6 / static_cast<double>(nets.size());
        for (std::size_t i = 0; i < nets.size(); ++i) {
            auto& r = report.nets[i];
            r.wl[index_of(Method::model)] = inf.estimates[i].wl;
            r.wl_model_unpruned = inf.estimates[i].wl_unpruned;
            r.runtime_us[index_of(Method::model)] = per_net;
        }
        report.total_seconds[index_of(Method::model)] = inf.seconds;
    }
    return report;
}

double WlReport::mean_error(Method m) const {
    double sum = 0;
    std::size_t count = 0;
    for (const auto& r : nets) {
        const auto& wl = r.wl[index_of(m)];
        if (!wl) continue;
        sum += error_pct(*wl, r.wl_ref);
        ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

std::vector<WlReport::Aggregate> WlReport::aggregates() const {
    std::vector<Aggregate> out;
    std::vector<std::string> netlists;
    for (const auto& r : nets) {
        if (std::find(netlists.begin(), netlists.end(), r.netlist) == netlists.end()) {
            netlists.push_back(r.netlist);
        }
    }
    auto collect = [&](const std::string& scope, const std::string& key, Method m, auto&& include) {
        Aggregate a{scope, key, m, 0, 0.0};
        for (const auto& r : nets) {
            const auto& wl = r.wl[index_of(m)];
            if (!wl || !include(r)) continue;
            a.mean_error_pct += error_pct(*wl, r.wl_ref);
            ++a.count;
        }
        if (a.count) a.mean_error_pct /= static_cast<double>(a.count);
        out.push_back(a);
    };
    for (Method m : methods) collect("overall", "all", m, [](const NetResult&) { return true; });
    for (const auto& nl : netlists) {
        for (Method m : methods) {
            collect("netlist", nl, m, [&](const NetResult& r) { return r.netlist == nl; });
        }
    }
    for (std::size_t b = 0; b < kDegreeBuckets.size(); ++b) {
        for (Method m : methods) {
            collect("degree", bucket_label(kDegreeBuckets[b]), m,
                    [&](const NetResult& r) { return degree_bucket(r.degree) == b; });
        }
    }
    return out;
}

void WlReport::write_nets_csv(std::ostream& out) const {
    const bool has_model = std::find(methods.begin(), methods.end(), Method::model) != methods.end();
    out << "netlist,net,degree,ref,wl_ref";
    for (Method m : methods) out << ",wl_" << to_string(m);
    if (has_model) out << ",wl_model_unpruned";
    for (Method m : methods) out << ",err_" << to_string(m);
    out << '\n';
    for (const auto& r : nets) {
        out << r.netlist << ',' << r.id << ',' << r.degree << ',' << (r.ref_exact ? "exact" : "i1s")
            << ',' << r.wl_ref;
        for (Method m : methods) {
            out << ',';
            if (const auto& wl = r.wl[index_of(m)]) out << *wl;
        }
        if (has_model) {
            out << ',';
            if (r.wl_model_unpruned) out << *r.wl_model_unpruned;
        }
        for (Method m : methods) {
            out << ',';
            if (const auto& wl = r.wl[index_of(m)]) out << fixed6(error_pct(*wl, r.wl_ref));
        }
        out << '\n';
    }
}

void WlReport::write_summary_csv(std::ostream& out) const {
    out << "scope,key,method,nets,mean_error_pct\n";
    for (const auto& a : aggregates()) {
        out << a.scope << ',' << a.key << ',' << to_string(a.method) << ',' << a.count << ','
            << fixed6(a.mean_error_pct) << '\n';
    }
}

void WlReport::write_runtime_csv(std::ostream& out) const {
    out << "method,nets,total_seconds,mean_us_per_net\n";
    for (Method m : methods) {
        const double total = total_seconds[index_of(m)];
        const double mean = nets.empty() ? 0.0 : total * 1e6 / static_cast<double>(nets.size());
        out << to_string(m) << ',' << nets.size() << ',' << fixed6(total) << ',' << fixed6(mean) << '\n';
    }
}

WlReport WlReport::read_nets_csv(std::istream& in) {
    WlReport report;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("report: empty CSV");
    const auto header = split_csv(line);
    if (header.size() < 5 || header[0] != "netlist" || header[4] != "wl_ref") {
        throw std::invalid_argument("report: unexpected CSV header");
    }
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < header.size(); ++i) {
        column[header[i]] = i;
        if (header[i].starts_with("wl_") && header[i] != "wl_ref" && header[i] != "wl_model_unpruned") {
            report.methods.push_back(method_from_string(header[i].substr(3)));
        }
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw std::invalid_argument("report: line " + std::to_string(line_no) + " has " +
                                        std::to_string(cells.size()) + " fields, expected " +
                                        std::to_string(header.size()));
        }
        NetResult r;
        r.netlist = cells[0];
        r.id = cells[1];
        r.degree = std::stoul(cells[2]);
        r.ref_exact = cells[3] == "exact";
        r.wl_ref = std::stoll(cells[4]);
        for (Method m : report.methods) {
            const auto& cell = cells[column.at(std::string("wl_") + to_string(m))];
            if (!cell.empty()) r.wl[index_of(m)] = std::stoll(cell);
        }
        if (auto it = column.find("wl_model_unpruned"); it != column.end() && !cells[it->second].empty()) {
            r.wl_model_unpruned = std::stoll(cells[it->second]);
        }
        report.nets.push_back(std::move(r));
    }
    return report;
}

SweepRow run_sweep_point(const std::string& label, const std::vector<ReferencedNet>& nets,
                         const ModelParams<float>& params, const InferenceOptions& options,
                         ThreadPool* pool, std::size_t repeats) {
    std::vector<Net> plain;
    plain.reserve(nets.size());
    for (const auto& n : nets) plain.push_back(n.net);
    SweepRow row;
    row.label = label;
    row.layers = static_cast<std::size_t>(params.config.layers);
    row.parameters = params.parameter_count();
    row.threshold = options.threshold;
    row.batch_size = options.batch_size;
    row.nets = nets.size();
    double best = -1;
    InferenceResult inf;
    for (std::size_t rep = 0; rep < std::max<std::size_t>(1, repeats); ++rep) {
        inf = infer_many(plain, params, options, pool);
        if (best < 0 || inf.seconds < best) best = inf.seconds;
    }
    double sum = 0;
    for (std::size_t i = 0; i < nets.size(); ++i) sum += error_pct(inf.estimates[i].wl, nets[i].wl_ref);
    row.mean_error_pct = nets.empty() ? 0.0 : sum / static_cast<double>(nets.size());
    row.total_seconds = best;
    row.mean_us_per_net = nets.empty() ? 0.0 : best * 1e6 / static_cast<double>(nets.size());
    return row;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "label,layers,parameters,threshold,batch_size,nets,mean_error_pct,total_seconds,mean_us_per_net\n";
    for (const auto& r : rows) {
        out << r.label << ',' << r.layers << ',' << r.parameters << ',' << fixed6(r.threshold) << ','
            << r.batch_size << ',' << r.nets << ',' << fixed6(r.mean_error_pct) << ','
            << fixed6(r.total_seconds) << ',' << fixed6(r.mean_us_per_net) << '\n';
    }
}

}  // namespace steinerwl
