#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dmimo::harness {

/// Build identifier baked in at configure time (git describe style).
std::string_view build_id();

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

/// Quotes a field when it holds a comma, quote, CR or LF; inner quotes are doubled.
std::string csv_field(std::string_view text);

class Field {
public:
    Field(double v) : text_(format_number(v)) {}
    Field(int v) : text_(std::to_string(v)) {}
    Field(long v) : text_(std::to_string(v)) {}
    Field(unsigned long v) : text_(std::to_string(v)) {}
    Field(unsigned long long v) : text_(std::to_string(v)) {}
    Field(bool v) : text_(v ? "true" : "false") {}
    Field(const char* v) : text_(v) {}
    Field(std::string v) : text_(std::move(v)) {}

    const std::string& text() const { return text_; }

private:
    std::string text_;
};

/// One CSV file. The seed and build_id columns are prepended to every row.
struct Table {
    std::string suffix;  // empty for the main table, otherwise "<name>-<suffix>.csv"
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    bool reproducible = true;  // false for wall-clock tables

    void add(std::uint64_t seed, std::initializer_list<Field> fields);
};

void write_csv(std::ostream& out, const Table& table);

/// One gnuplot panel drawn from the main table.
struct Plot {
    std::string title;
    std::string x;
    std::vector<std::string> y;
    std::string xlabel;
    std::string ylabel;
    bool log_x = false;
    std::string group;  // one curve per distinct value of this column, if set
    std::vector<std::string> group_values;
    std::vector<std::pair<std::string, std::string>> where;  // column == value, all must hold
};

void write_gnuplot(std::ostream& out, const std::string& csv_name, const std::string& stem,
                   const std::vector<Plot>& plots);

}  // namespace dmimo::harness
