#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gevqmc {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data) noexcept;
std::string hex64(std::uint64_t value);

/// Writes to a temporary file in the same directory and renames it over
/// `path`. Throws std::runtime_error on I/O failure.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Shortest decimal form that round-trips.
std::string format_real(double value);

/// Comma- or whitespace-separated lists.
std::vector<double> parse_real_list(std::string_view text);
std::vector<std::int64_t> parse_int_list(std::string_view text);

}  // namespace gevqmc
