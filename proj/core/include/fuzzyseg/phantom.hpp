#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fuzzyseg/core.hpp"
#include "fuzzyseg/metrics.hpp"

namespace fuzzyseg {

struct Disk {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 0.0;
};

struct RectShape {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
};

enum class NoiseKind { None, Gaussian, SaltPepper };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double sigma = 0.0;  // Gaussian std-dev on [0,1] intensities
    double prob = 0.0;   // per-pixel salt/pepper flip probability
};

/// Ground-truthed synthetic test image: object shapes at one intensity over a
/// uniform background, with optional noise applied to the image only.
struct PhantomSpec {
    std::size_t width = 128;
    std::size_t height = 128;
    double background_intensity = 0.25;
    double object_intensity = 0.75;
    std::vector<Disk> disks;
    std::vector<RectShape> rects;
    NoiseSpec noise;
    std::uint64_t seed = 1;

    void validate() const;
};

struct Phantom {
    GrayImage image;
    BinaryMask mask;
};

/// Rasterizes the spec (disks by the center-in-circle rule
/// (x-cx)^2 + (y-cy)^2 <= r^2, rectangles as half-open [x,x+w) x [y,y+h)),
/// then applies noise to the image only. Gaussian noise clamps to [0,1];
/// salt-pepper flips chosen pixels to 0 or 1 with equal probability.
/// Deterministic per seed.
Phantom generate(const PhantomSpec& spec);

/// Parses the flat key=value phantom description (one key per line, '#'
/// comments). Keys: width, height, background_intensity, object_intensity,
/// disk=cx,cy,r (repeatable), rect=x,y,w,h (repeatable),
/// noise=none|gaussian|salt_pepper, sigma, prob, seed.
PhantomSpec parse_phantom_spec(const std::string& text);

PhantomSpec load_phantom_spec(const std::filesystem::path& path);

}  // namespace fuzzyseg
