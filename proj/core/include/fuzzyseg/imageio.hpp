#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fuzzyseg/core.hpp"
#include "fuzzyseg/metrics.hpp"

namespace fuzzyseg {

/// Hard segmentation rendered as one byte per pixel. cluster_count is needed
/// to map labels onto the gray ramp.
struct LabelImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t cluster_count = 1;
    std::vector<std::uint8_t> labels;

    LabelImage() = default;
    LabelImage(std::size_t w, std::size_t h, std::size_t c,
               std::vector<std::uint8_t> l);
};

/// Reads a binary PGM (P5, maxval 255) or an 8-bit grayscale PNG; dispatches
/// on the file's magic bytes. Intensities are divided by 255.
GrayImage read_gray(const std::filesystem::path& path);

/// Writes intensities quantized to 8 bits (round to nearest). Paths ending in
/// .png get a grayscale PNG, everything else a P5 PGM.
void write_gray(const GrayImage& image, const std::filesystem::path& path);

/// P5 PGM with label i mapped to gray floor(255*i / (c-1)); c = 1 maps to 0.
void write_labels(const LabelImage& labels, const std::filesystem::path& path);

/// P5 PGM mask: any value >= 128 reads as object.
BinaryMask read_mask(const std::filesystem::path& path);

/// P5 PGM with 0 = background, 255 = object.
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// CSV with header "pixel,c0,c1,..." and one row per pixel (column k of the
/// matrix); values printed with 9 significant digits.
void write_membership_csv(const Matrix& u, const std::filesystem::path& path);
void write_membership_csv(const MembershipMatrix& u,
                          const std::filesystem::path& path);

}  // namespace fuzzyseg
