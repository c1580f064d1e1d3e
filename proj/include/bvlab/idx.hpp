#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bvlab/dataset.hpp"

namespace bvlab {

// IDX layout (big-endian): images are magic 0x00000803, then n, rows, cols as
// u32, then n*rows*cols unsigned bytes. Labels are magic 0x00000801, then n as
// u32, then n unsigned bytes. Nothing else is accepted.
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

enum class IdxErrorKind { io, bad_magic, truncated, trailing_data, count_mismatch };

class IdxError : public std::runtime_error {
public:
    IdxError(IdxErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    IdxErrorKind kind() const { return kind_; }

private:
    IdxErrorKind kind_;
};

struct IdxImages {
    std::uint32_t count = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image
};

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

/// Reads an image/label file pair. Pixels are scaled to [0, 1]; the class
/// count is one more than the largest label.
LabeledDataset load_idx(const std::filesystem::path& image_path, const std::filesystem::path& label_path);

}  // namespace bvlab
