#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "steinerwl/geometry.hpp"

namespace steinerwl {

struct DegreeFilter {
    std::size_t min_degree = 3;
    std::size_t max_degree = 64;
};

struct ParsedNetlist {
    std::string name;  // file stem, used to group evaluation results
    std::vector<Net> nets;
    std::size_t total_nets = 0;
    std::size_t excluded_small = 0;  // fewer than min_degree distinct pins
    std::size_t excluded_large = 0;  // more than max_degree distinct pins
};

// Minimal Bookshelf subset. The .nets file lists "NetDegree : k [name]"
// headers followed by k pin lines "node [I|O|B] [: dx dy]"; the .pl file lists
// "node x y [: orient] [/FIXED]". A pin sits at the node location plus its
// offset, rounded to the nearest integer. Header lines (UCLA, NumNets, NumPins)
// and '#' comments are skipped.
ParsedNetlist parse_bookshelf(const std::filesystem::path& nets_file,
                              const std::filesystem::path& pl_file,
                              const DegreeFilter& filter = {});

// Native JSON-lines nets: one {"schema":1,"id":...,"pins":[[x,y],...]} per
// line. Dataset files are accepted too (extra fields are ignored).
ParsedNetlist parse_nets_jsonl(const std::filesystem::path& path, const DegreeFilter& filter = {});

// Dispatches on extensions: one .jsonl file, or a .nets/.pl pair.
ParsedNetlist parse_netlist(const std::vector<std::filesystem::path>& paths,
                            const DegreeFilter& filter = {});

void write_nets_jsonl(const std::filesystem::path& path, const std::vector<Net>& nets);

}  // namespace steinerwl
