#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace lockbom::lockfile {

// The TOML subset that Cargo.lock and poetry.lock are written in: tables,
// arrays of tables, dotted headers, strings (basic, literal, multiline
// basic), integers, booleans, arrays and inline tables. Anything outside
// that subset is rejected; lock files are machine-generated, so a parse
// failure means the input is not a lock file we understand.
struct TomlValue {
    enum class Kind { string, integer, boolean, array, table };

    Kind kind = Kind::table;
    std::string str;
    std::int64_t integer = 0;
    bool boolean = false;
    std::vector<TomlValue> array;
    std::map<std::string, TomlValue> table;

    bool is_string() const { return kind == Kind::string; }
    bool is_table() const { return kind == Kind::table; }
    bool is_array() const { return kind == Kind::array; }

    // Table member access; null when absent or not a table.
    const TomlValue* get(std::string_view key) const;
    // String member or fallback; throws when present with a non-string type.
    std::string get_string_or(std::string_view key, std::string_view fallback) const;
};

// Throws Error(malformed_lockfile) with a line-numbered message.
TomlValue parse_toml(std::string_view text);

} // namespace lockbom::lockfile
