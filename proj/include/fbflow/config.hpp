#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fbflow {

/// Config parse failure with 1-based source position.
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, int col, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(col) +
                             ": " + message),
          line_(line),
          col_(col) {}

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int col() const noexcept { return col_; }

private:
    int line_;
    int col_;
};

struct IniValue {
    std::string value;
    int line = 0;
    int col = 0;
};

/// section -> key -> value. Keys outside any section land in "".
using IniFile = std::map<std::string, std::map<std::string, IniValue>>;

/// Flat INI: `[section]` headers, `key = value` lines, `#` or `;` comments.
/// Throws ConfigError with line/column on malformed input.
IniFile parse_ini(std::string_view text);

}  // namespace fbflow
