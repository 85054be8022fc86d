#ifndef HDX_PERSIST_HPP
#define HDX_PERSIST_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hdx/engine.hpp"

namespace hdx {

inline constexpr std::uint32_t kFormatVersion = 1;

struct SectionSizes {
  std::size_t header = 0;
  std::size_t text = 0;
  std::size_t tree = 0;  // nodes and leaf labels
  std::size_t inversions = 0;
  std::size_t total = 0;  // including the checksum
};

/// Little-endian image: header, text (optional), tree in preorder, one
/// section per path label, CRC-32 of everything before it.
std::vector<std::uint8_t> serialize(const MismatchIndex& index, bool include_text = true,
                                    SectionSizes* sizes = nullptr);

/// `text` is required when the image was written without one. Throws
/// CorruptIndex, UnsupportedVersion or InvalidArgument.
MismatchIndex deserialize(std::span<const std::uint8_t> bytes,
                          const std::vector<Symbol>* text = nullptr);

void save_index(const std::filesystem::path& path, const MismatchIndex& index,
                bool include_text = true);
/// Throws Io on unreadable files.
MismatchIndex load_index(const std::filesystem::path& path,
                         const std::vector<Symbol>* text = nullptr);

SectionSizes section_sizes(const MismatchIndex& index);

}  // namespace hdx

#endif  // HDX_PERSIST_HPP
