#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace decarb {

// Minimal CSV support for the plain numeric tables this project reads and
// writes: header row, comma separated, '.' decimal separator, no quoting.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

std::vector<std::string> split_csv_line(std::string_view line);

std::string join_csv(const std::vector<std::string>& fields);

} // namespace decarb
