#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "errortree/error_tree.hpp"

namespace errortree {

inline constexpr std::uint16_t kFormatVersion = 1;

/// Byte image of an index. Identical indexes give identical bytes.
std::vector<std::uint8_t> serialize(const ErrorTree& index);
/// Throws FormatError (bad magic or malformed body), VersionError (newer
/// format) or ChecksumError (truncated or corrupted body).
ErrorTree deserialize(std::span<const std::uint8_t> bytes);

/// Writes the image; returns its size in bytes. IoError on failure.
std::size_t save(const ErrorTree& index, const std::filesystem::path& path);
ErrorTree load(const std::filesystem::path& path);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace errortree
