#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ramsey_forge/config.hpp"

namespace ramsey_forge {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Immutable-ish edge coloring of K_n: what the validator consumes and what
 * the coloring file stores. Colors are 0-based indices below `palette_size`.
 */
class Coloring {
public:
    Coloring() = default;
    Coloring(std::uint32_t n, std::uint32_t palette_size)
        : n_(n), palette_size_(palette_size), color_(static_cast<std::size_t>(n) * n, kUncolored) {}

    std::uint32_t n() const { return n_; }
    std::uint32_t palette_size() const { return palette_size_; }

    Color at(Vertex u, Vertex v) const { return color_[static_cast<std::size_t>(u) * n_ + v]; }
    bool is_colored(Vertex u, Vertex v) const { return at(u, v) != kUncolored; }

    void set(Vertex u, Vertex v, Color k) {
        color_[static_cast<std::size_t>(u) * n_ + v] = k;
        color_[static_cast<std::size_t>(v) * n_ + u] = k;
    }

    bool is_complete() const {
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v = u + 1; v < n_; ++v)
                if (!is_colored(u, v)) return false;
        return true;
    }

    bool operator==(const Coloring&) const = default;

private:
    std::uint32_t n_ = 0;
    std::uint32_t palette_size_ = 0;
    std::vector<Color> color_;
};

/// Header `n <n> colors <total>`, then `u v k` per colored edge with u < v,
/// in lexicographic order. Uncolored edges are omitted.
inline void write_coloring(std::ostream& out, const Coloring& c) {
    out << "n " << c.n() << " colors " << c.palette_size() << '\n';
    for (Vertex u = 0; u < c.n(); ++u)
        for (Vertex v = u + 1; v < c.n(); ++v)
            if (c.is_colored(u, v)) out << u << ' ' << v << ' ' << c.at(u, v) << '\n';
}

inline Coloring read_coloring(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty coloring file");
    std::istringstream header(line);
    std::string n_tag, colors_tag;
    long long n = -1, total = -1;
    if (!(header >> n_tag >> n >> colors_tag >> total) || n_tag != "n" || colors_tag != "colors" || n < 1 ||
        total < 0 || n > 65535)
        throw ParseError("malformed header: '" + line + "'");
    Coloring c(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(total));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        long long u = -1, v = -1, k = -1;
        std::string extra;
        if (!(row >> u >> v >> k) || (row >> extra))
            throw ParseError("line " + std::to_string(line_no) + ": expected 'u v k'");
        if (u < 0 || v < 0 || u >= n || v >= n || u == v)
            throw ParseError("line " + std::to_string(line_no) + ": invalid edge");
        if (k < 0 || k >= total) throw ParseError("line " + std::to_string(line_no) + ": color out of range");
        const auto a = static_cast<Vertex>(u), b = static_cast<Vertex>(v);
        if (c.is_colored(a, b)) throw ParseError("line " + std::to_string(line_no) + ": duplicate edge");
        c.set(a, b, static_cast<Color>(k));
    }
    return c;
}

inline void save_coloring(const std::string& path, const Coloring& c) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_coloring(out, c);
}

inline Coloring load_coloring(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_coloring(in);
}

}  // namespace ramsey_forge
