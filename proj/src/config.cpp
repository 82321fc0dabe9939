#include "fbflow/config.hpp"

#include <cctype>

namespace fbflow {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

IniFile parse_ini(std::string_view text) {
    IniFile file;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                              : eol - pos);
        ++line_no;
        const std::size_t line_start = pos;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        // Strip comments that start a token ('#' or ';').
        const std::size_t comment = raw.find_first_of("#;");
        if (comment != std::string_view::npos) raw = raw.substr(0, comment);
        const std::string_view line = trim(raw);
        if (line.empty()) continue;

        const auto column_of = [&](std::string_view token) {
            return static_cast<int>(token.data() - (text.data() + line_start)) + 1;
        };

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(line_no, column_of(line), "unterminated section header");
            }
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) {
                throw ConfigError(line_no, column_of(line), "empty section name");
            }
            section = std::string(name);
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(line_no, column_of(line), "expected key = value");
        }
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(line_no, column_of(line), "empty key");
        }
        auto& slot = file[section][std::string(key)];
        slot = IniValue{std::string(value), line_no, column_of(key)};
    }
    return file;
}

}  // namespace fbflow
