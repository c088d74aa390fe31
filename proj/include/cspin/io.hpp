#ifndef CSPIN_IO_HPP
#define CSPIN_IO_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace cspin {

// Shortest decimal representation that round-trips the double exactly.
inline std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw Error("bad numeric field: '" + s + "'");
    return x;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string serialize() const {
        std::ostringstream os;
        auto emit_line = [&os](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) os << ',';
                os << cells[i];
            }
            os << '\n';
        };
        emit_line(header);
        for (const auto& r : rows) emit_line(r);
        return os.str();
    }

    static CsvTable parse(const std::string& text) {
        CsvTable t;
        std::istringstream is(text);
        std::string line;
        bool first = true;
        while (std::getline(is, line)) {
            std::vector<std::string> cells;
            std::string cell;
            std::istringstream ls(line);
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            if (!line.empty() && line.back() == ',') cells.emplace_back();
            if (first) {
                t.header = cells;
                first = false;
            } else {
                t.rows.push_back(cells);
            }
        }
        return t;
    }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << content;
    if (!f) throw Error("write failed for " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

} // namespace cspin

#endif
