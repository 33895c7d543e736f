#include "dmimo/harness/table.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#ifndef DMIMO_BUILD_ID
#define DMIMO_BUILD_ID "unknown"
#endif

namespace dmimo::harness {

std::string_view build_id() { return DMIMO_BUILD_ID; }

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, r.ptr);
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

void Table::add(std::uint64_t seed, std::initializer_list<Field> fields) {
    if (fields.size() != columns.size()) {
        throw std::logic_error("Table::add: field count does not match the header");
    }
    std::vector<std::string> row;
    row.reserve(fields.size() + 2);
    row.push_back(std::to_string(seed));
    row.emplace_back(build_id());
    for (const auto& f : fields) row.push_back(f.text());
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const Table& table) {
    out << "seed,build_id";
    for (const auto& c : table.columns) out << ',' << csv_field(c);
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << csv_field(row[i]);
        }
        out << '\n';
    }
}

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

void write_gnuplot(std::ostream& out, const std::string& csv_name, const std::string& stem,
                   const std::vector<Plot>& plots) {
    out << "# gnuplot script; run with: gnuplot " << stem << ".gp\n";
    out << "set datafile separator ','\n";
    out << "set terminal pngcairo size 900,600\n";
    out << "set grid\n";
    out << "set key autotitle columnhead\n";
    out << "data = " << quoted(csv_name) << "\n\n";
    for (std::size_t p = 0; p < plots.size(); ++p) {
        const auto& pl = plots[p];
        out << "set output " << quoted(stem + "-" + std::to_string(p) + ".png") << "\n";
        out << "set title " << quoted(pl.title) << "\n";
        out << "set xlabel " << quoted(pl.xlabel.empty() ? pl.x : pl.xlabel) << "\n";
        out << "set ylabel " << quoted(pl.ylabel) << "\n";
        out << (pl.log_x ? "set logscale x\n" : "unset logscale x\n");
        out << "plot ";
        bool first = true;
        const std::vector<std::string> groups = pl.group.empty() ? std::vector<std::string>{""} : pl.group_values;
        for (const auto& g : groups) {
            for (const auto& y : pl.y) {
                if (!first) out << ", \\\n     ";
                first = false;
                auto conds = pl.where;
                if (!pl.group.empty()) conds.emplace_back(pl.group, g);
                out << "data using " << quoted(pl.x) << ":";
                if (conds.empty()) {
                    out << quoted(y);
                } else {
                    out << "(";
                    for (std::size_t c = 0; c < conds.size(); ++c) {
                        if (c) out << " && ";
                        out << "strcol(" << quoted(conds[c].first) << ") eq " << quoted(conds[c].second);
                    }
                    out << " ? column(" << quoted(y) << ") : NaN)";
                }
                std::string label = y;
                if (!pl.group.empty()) label += " " + pl.group + "=" + g;
                out << " with linespoints title " << quoted(label);
            }
        }
        out << "\n\n";
    }
    out << "unset output\n";
}

}  // namespace dmimo::harness
