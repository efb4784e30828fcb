#ifndef PANELCAST_CSV_HPP_
#define PANELCAST_CSV_HPP_

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small CSV helpers shared by the readers and writers in this library.
namespace panelcast::csv {

std::string_view trim(std::string_view s) noexcept;

/// Splits on commas. No quoting: none of the formats here need it.
std::vector<std::string_view> split(std::string_view line);

/// Full-field decimal parse; nullopt on any trailing junk or empty input.
std::optional<double> parse_double(std::string_view s) noexcept;
std::optional<long long> parse_int(std::string_view s) noexcept;

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Opens for writing or throws IoError.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace panelcast::csv

#endif  // PANELCAST_CSV_HPP_
