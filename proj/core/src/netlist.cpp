#include "steinerwl/netlist.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "steinerwl/dataset.hpp"

namespace steinerwl {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool is_header(const std::string& line) {
    return line.starts_with("UCLA") || line.starts_with("NumNets") ||
           line.starts_with("NumPins") || line.starts_with("NumNodes") ||
           line.starts_with("NumTerminals");
}

[[noreturn]] void fail(const std::filesystem::path& file, std::size_t line, const std::string& what) {
    throw DataError(file.string() + ":" + std::to_string(line) + ": " + what);
}

void admit(ParsedNetlist& out, const std::string& id, const std::vector<Point>& raw,
           const DegreeFilter& filter) {
    ++out.total_nets;
    std::vector<Point> pins;
    try {
        pins = dedupe_pins(raw);
    } catch (const DegenerateNetError&) {
        ++out.excluded_small;
        return;
    }
    if (pins.size() < filter.min_degree) {
        ++out.excluded_small;
    } else if (pins.size() > filter.max_degree) {
        ++out.excluded_large;
    } else {
        Net net;
        net.id = id;
        net.pins = std::move(pins);
        out.nets.push_back(std::move(net));
    }
}

}  // namespace

ParsedNetlist parse_bookshelf(const std::filesystem::path& nets_file,
                              const std::filesystem::path& pl_file, const DegreeFilter& filter) {
    std::unordered_map<std::string, std::pair<double, double>> where;
    {
        std::ifstream pl(pl_file);
        if (!pl) throw DataError("cannot open '" + pl_file.string() + "'");
        std::string raw;
        std::size_t no = 0;
        while (std::getline(pl, raw)) {
            ++no;
            const std::string line = trim(raw);
            if (line.empty() || line[0] == '#' || is_header(line)) continue;
            std::istringstream in(line);
            std::string name;
            double x, y;
            if (!(in >> name >> x >> y)) fail(pl_file, no, "expected '<node> <x> <y>'");
            where[name] = {x, y};
        }
    }

    ParsedNetlist out;
    out.name = nets_file.stem().string();
    std::ifstream nf(nets_file);
    if (!nf) throw DataError("cannot open '" + nets_file.string() + "'");
    std::string raw;
    std::size_t no = 0;
    std::string net_name;
    std::size_t expected = 0;
    std::vector<Point> pins;
    std::size_t net_index = 0;
    while (std::getline(nf, raw)) {
        ++no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || is_header(line)) continue;
        if (line.starts_with("NetDegree")) {
            if (expected != pins.size()) fail(nets_file, no, "net '" + net_name + "' has too few pins");
            if (!net_name.empty()) admit(out, net_name, pins, filter);
            std::istringstream in(line);
            std::string keyword, colon;
            if (!(in >> keyword >> colon >> expected) || colon != ":") {
                fail(nets_file, no, "expected 'NetDegree : <k> [name]'");
            }
            if (!(in >> net_name)) net_name = "net" + std::to_string(net_index);
            ++net_index;
            pins.clear();
            continue;
        }
        if (net_name.empty()) fail(nets_file, no, "pin line outside of a net");
        if (pins.size() == expected) fail(nets_file, no, "net '" + net_name + "' has too many pins");
        std::istringstream in(line);
        std::string node;
        in >> node;
        double dx = 0, dy = 0;
        std::string tok;
        while (in >> tok) {
            if (tok == ":") {
                if (!(in >> dx >> dy)) fail(nets_file, no, "expected pin offsets after ':'");
                break;
            }
        }
        const auto it = where.find(node);
        if (it == where.end()) {
            fail(nets_file, no, "net '" + net_name + "' references unknown node '" + node + "'");
        }
        pins.push_back({static_cast<Coord>(std::llround(it->second.first + dx)),
                        static_cast<Coord>(std::llround(it->second.second + dy))});
    }
    if (!net_name.empty()) {
        if (expected != pins.size()) fail(nets_file, no, "net '" + net_name + "' has too few pins");
        admit(out, net_name, pins, filter);
    }
    return out;
}

ParsedNetlist parse_nets_jsonl(const std::filesystem::path& path, const DegreeFilter& filter) {
    ParsedNetlist out;
    out.name = path.stem().string();
    std::ifstream f(path);
    if (!f) throw DataError("cannot open '" + path.string() + "'");
    std::string line;
    std::size_t no = 0;
    while (std::getline(f, line)) {
        ++no;
        if (line.empty() || line[0] == '#') continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            std::vector<Point> pins;
            for (const auto& p : j.at("pins")) pins.push_back({p.at(0).get<Coord>(), p.at(1).get<Coord>()});
            admit(out, j.at("id").get<std::string>(), pins, filter);
        } catch (const nlohmann::json::exception& e) {
            fail(path, no, std::string("malformed net record: ") + e.what());
        }
    }
    return out;
}

ParsedNetlist parse_netlist(const std::vector<std::filesystem::path>& paths, const DegreeFilter& filter) {
    if (paths.size() == 1 && paths[0].extension() == ".jsonl") return parse_nets_jsonl(paths[0], filter);
    if (paths.size() == 2) {
        const auto& a = paths[0];
        const auto& b = paths[1];
        if (a.extension() == ".nets" && b.extension() == ".pl") return parse_bookshelf(a, b, filter);
        if (a.extension() == ".pl" && b.extension() == ".nets") return parse_bookshelf(b, a, filter);
    }
    throw DataError("expected one .jsonl file or a .nets/.pl pair");
}

void write_nets_jsonl(const std::filesystem::path& path, const std::vector<Net>& nets) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot open '" + path.string() + "' for writing");
    for (const Net& n : nets) {
        nlohmann::ordered_json j;
        j["schema"] = kDatasetSchema;
        j["id"] = n.id;
        nlohmann::ordered_json pins = nlohmann::ordered_json::array();
        for (const Point& p : n.pins) pins.push_back({p.x, p.y});
        j["pins"] = std::move(pins);
        f << j.dump() << '\n';
    }
    if (!f) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace steinerwl
