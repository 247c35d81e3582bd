#include "lockbom/lockfile/toml_lite.hpp"

#include <cctype>

#include "lockbom/error.hpp"

namespace lockbom::lockfile {

const TomlValue* TomlValue::get(std::string_view key) const {
    if (kind != Kind::table) {
        return nullptr;
    }
    auto it = table.find(std::string(key));
    return it == table.end() ? nullptr : &it->second;
}

std::string TomlValue::get_string_or(std::string_view key, std::string_view fallback) const {
    const TomlValue* v = get(key);
    if (v == nullptr) {
        return std::string(fallback);
    }
    if (!v->is_string()) {
        throw Error(ErrorCode::malformed_lockfile,
                    "expected string for key '" + std::string(key) + "'");
    }
    return v->str;
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    TomlValue parse() {
        TomlValue root;
        TomlValue* current = &root;
        while (!at_end()) {
            skip_ws_and_comments();
            if (at_end()) {
                break;
            }
            if (peek() == '[') {
                current = header(root);
            } else {
                key_value(*current);
            }
            end_of_line();
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) {
        throw Error(ErrorCode::malformed_lockfile,
                    "line " + std::to_string(line_) + ": " + what);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    char take() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
        }
        return c;
    }

    // whitespace, newlines and comments between top-level items
    void skip_ws_and_comments() {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else if (c == '#') {
                skip_comment();
            } else {
                break;
            }
        }
    }

    void skip_comment() {
        while (!at_end() && peek() != '\n') {
            take();
        }
    }

    // spaces and tabs only
    void skip_inline_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) {
            take();
        }
    }

    void end_of_line() {
        skip_inline_ws();
        if (!at_end() && peek() == '#') {
            skip_comment();
        }
        if (at_end()) {
            return;
        }
        if (peek() == '\r') {
            take();
        }
        if (at_end()) {
            return;
        }
        if (take() != '\n') {
            fail("expected end of line");
        }
    }

    static bool is_bare_key_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    }

    std::string key_name() {
        if (peek() == '"' || peek() == '\'') {
            TomlValue v = string_value();
            return v.str;
        }
        std::string out;
        while (!at_end() && is_bare_key_char(peek())) {
            out += take();
        }
        if (out.empty()) {
            fail("expected key");
        }
        return out;
    }

    // [table.path] or [[array.path]]; navigates dotted segments, descending
    // into the last element when a segment is an array of tables.
    TomlValue* header(TomlValue& root) {
        take(); // '['
        const bool is_array = !at_end() && peek() == '[';
        if (is_array) {
            take();
        }
        std::vector<std::string> path;
        for (;;) {
            skip_inline_ws();
            path.push_back(key_name());
            skip_inline_ws();
            if (at_end()) {
                fail("unterminated table header");
            }
            if (peek() == '.') {
                take();
                continue;
            }
            break;
        }
        if (take() != ']') {
            fail("expected ']' in table header");
        }
        if (is_array && (at_end() || take() != ']')) {
            fail("expected ']]' in array-of-tables header");
        }

        TomlValue* node = &root;
        for (std::size_t i = 0; i < path.size(); ++i) {
            const bool last = i + 1 == path.size();
            TomlValue& slot = node->table[path[i]];
            if (last && is_array) {
                if (slot.kind == TomlValue::Kind::table && slot.table.empty() &&
                    slot.array.empty()) {
                    slot.kind = TomlValue::Kind::array;
                }
                if (slot.kind != TomlValue::Kind::array) {
                    fail("'" + path[i] + "' redefined as array of tables");
                }
                slot.array.emplace_back();
                node = &slot.array.back();
            } else if (slot.kind == TomlValue::Kind::array) {
                if (slot.array.empty()) {
                    fail("empty array of tables '" + path[i] + "'");
                }
                node = &slot.array.back();
            } else if (slot.kind == TomlValue::Kind::table) {
                node = &slot;
            } else {
                fail("'" + path[i] + "' is not a table");
            }
        }
        return node;
    }

    void key_value(TomlValue& table) {
        std::string key = key_name();
        skip_inline_ws();
        if (at_end() || take() != '=') {
            fail("expected '=' after key '" + key + "'");
        }
        skip_inline_ws();
        TomlValue value = this->value();
        auto [it, inserted] = table.table.emplace(std::move(key), std::move(value));
        if (!inserted) {
            fail("duplicate key '" + it->first + "'");
        }
    }

    TomlValue value() {
        if (at_end()) {
            fail("expected value");
        }
        char c = peek();
        if (c == '"' || c == '\'') {
            return string_value();
        }
        if (c == '[') {
            return array_value();
        }
        if (c == '{') {
            return inline_table();
        }
        if (c == 't' || c == 'f') {
            return boolean_value();
        }
        if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
            return integer_value();
        }
        fail("unsupported value syntax");
    }

    TomlValue string_value() {
        TomlValue out;
        out.kind = TomlValue::Kind::string;
        const char quote = take();
        const bool basic = quote == '"';

        // multiline form: three quotes
        if (pos_ + 1 < text_.size() && text_[pos_] == quote && text_[pos_ + 1] == quote) {
            take();
            take();
            // a newline immediately after the opening delimiter is trimmed
            if (!at_end() && peek() == '\r') {
                take();
            }
            if (!at_end() && peek() == '\n') {
                take();
            }
            for (;;) {
                if (at_end()) {
                    fail("unterminated multiline string");
                }
                if (peek() == quote && text_.substr(pos_, 3) == std::string(3, quote)) {
                    take();
                    take();
                    take();
                    return out;
                }
                if (basic && peek() == '\\') {
                    escape_into(out.str);
                } else {
                    out.str += take();
                }
            }
        }

        for (;;) {
            if (at_end() || peek() == '\n') {
                fail("unterminated string");
            }
            char ch = peek();
            if (ch == quote) {
                take();
                return out;
            }
            if (basic && ch == '\\') {
                escape_into(out.str);
            } else {
                out.str += take();
            }
        }
    }

    void escape_into(std::string& out) {
        take(); // backslash
        if (at_end()) {
            fail("dangling escape");
        }
        char c = take();
        switch (c) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'f': out += '\f'; break;
        case 'b': out += '\b'; break;
        case 'u': unicode_escape_into(out, 4); break;
        case 'U': unicode_escape_into(out, 8); break;
        case '\r':
        case '\n':
            // line-ending backslash in multiline strings: trim whitespace
            while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r' ||
                                 peek() == '\n')) {
                take();
            }
            break;
        default: fail(std::string("unknown escape '\\") + c + "'");
        }
    }

    void unicode_escape_into(std::string& out, int digits) {
        std::uint32_t cp = 0;
        for (int i = 0; i < digits; ++i) {
            if (at_end() || !std::isxdigit(static_cast<unsigned char>(peek()))) {
                fail("bad unicode escape");
            }
            char c = take();
            cp = cp * 16 + static_cast<std::uint32_t>(
                               std::isdigit(static_cast<unsigned char>(c))
                                   ? c - '0'
                                   : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
        }
        // UTF-8 encode
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    TomlValue boolean_value() {
        TomlValue out;
        out.kind = TomlValue::Kind::boolean;
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            out.boolean = true;
        } else if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            out.boolean = false;
        } else {
            fail("expected boolean");
        }
        return out;
    }

    TomlValue integer_value() {
        TomlValue out;
        out.kind = TomlValue::Kind::integer;
        std::string digits;
        if (peek() == '-' || peek() == '+') {
            digits += take();
        }
        while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_')) {
            char c = take();
            if (c != '_') {
                digits += c;
            }
        }
        if (digits.empty() || digits == "-" || digits == "+") {
            fail("expected integer");
        }
        if (!at_end() && (peek() == '.' || peek() == 'e' || peek() == 'E' || peek() == ':')) {
            fail("floats and dates are outside the lock-file subset");
        }
        out.integer = std::stoll(digits);
        return out;
    }

    TomlValue array_value() {
        TomlValue out;
        out.kind = TomlValue::Kind::array;
        take(); // '['
        for (;;) {
            skip_ws_and_comments();
            if (at_end()) {
                fail("unterminated array");
            }
            if (peek() == ']') {
                take();
                return out;
            }
            out.array.push_back(value());
            skip_ws_and_comments();
            if (at_end()) {
                fail("unterminated array");
            }
            if (peek() == ',') {
                take();
            } else if (peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    TomlValue inline_table() {
        TomlValue out;
        out.kind = TomlValue::Kind::table;
        take(); // '{'
        skip_inline_ws();
        if (!at_end() && peek() == '}') {
            take();
            return out;
        }
        for (;;) {
            skip_inline_ws();
            std::string key = key_name();
            skip_inline_ws();
            if (at_end() || take() != '=') {
                fail("expected '=' in inline table");
            }
            skip_inline_ws();
            auto [it, inserted] = out.table.emplace(std::move(key), value());
            if (!inserted) {
                fail("duplicate key '" + it->first + "' in inline table");
            }
            skip_inline_ws();
            if (at_end()) {
                fail("unterminated inline table");
            }
            char c = take();
            if (c == '}') {
                return out;
            }
            if (c != ',') {
                fail("expected ',' or '}' in inline table");
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

} // namespace

TomlValue parse_toml(std::string_view text) {
    return Parser(text).parse();
}

} // namespace lockbom::lockfile
