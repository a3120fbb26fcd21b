#include "fuzzyseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace fuzzyseg {

void PhantomSpec::validate() const {
    if (width < 1 || height < 1) {
        throw InvalidParameters("phantom dimensions must be at least 1x1");
    }
    auto in_range = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_range(background_intensity) || !in_range(object_intensity)) {
        throw InvalidParameters("intensities must lie in [0,1]");
    }
    if (background_intensity == object_intensity) {
        throw InvalidParameters("background and object intensities must differ");
    }
    for (const Disk& d : disks) {
        if (!(d.radius > 0.0)) throw InvalidParameters("disk radius must be > 0");
        if (d.center_x - d.radius < 0.0 || d.center_x + d.radius > double(width) - 1.0 ||
            d.center_y - d.radius < 0.0 || d.center_y + d.radius > double(height) - 1.0) {
            throw InvalidParameters("disk extends outside the image");
        }
    }
    for (const RectShape& r : rects) {
        if (!(r.w > 0.0) || !(r.h > 0.0)) {
            throw InvalidParameters("rectangle sides must be > 0");
        }
        if (r.x < 0.0 || r.y < 0.0 || r.x + r.w > double(width) ||
            r.y + r.h > double(height)) {
            throw InvalidParameters("rectangle extends outside the image");
        }
    }
    if (noise.kind == NoiseKind::Gaussian && !(noise.sigma >= 0.0)) {
        throw InvalidParameters("gaussian sigma must be >= 0");
    }
    if (noise.kind == NoiseKind::SaltPepper &&
        !(noise.prob >= 0.0 && noise.prob <= 1.0)) {
        throw InvalidParameters("salt-pepper probability must lie in [0,1]");
    }
}

Phantom generate(const PhantomSpec& spec) {
    spec.validate();
    const std::size_t n = spec.width * spec.height;
    std::vector<bool> bits(n, false);

    for (std::size_t y = 0; y < spec.height; ++y) {
        for (std::size_t x = 0; x < spec.width; ++x) {
            const double px = double(x);
            const double py = double(y);
            bool object = false;
            for (const Disk& d : spec.disks) {
                const double dx = px - d.center_x;
                const double dy = py - d.center_y;
                if (dx * dx + dy * dy <= d.radius * d.radius) {
                    object = true;
                    break;
                }
            }
            if (!object) {
                for (const RectShape& r : spec.rects) {
                    if (px >= r.x && px < r.x + r.w && py >= r.y && py < r.y + r.h) {
                        object = true;
                        break;
                    }
                }
            }
            bits[y * spec.width + x] = object;
        }
    }

    std::vector<double> intensities(n);
    for (std::size_t k = 0; k < n; ++k) {
        intensities[k] = bits[k] ? spec.object_intensity : spec.background_intensity;
    }

    // Noise touches the image only, never the mask.
    std::mt19937_64 rng(spec.seed);
    if (spec.noise.kind == NoiseKind::Gaussian && spec.noise.sigma > 0.0) {
        std::normal_distribution<double> gauss(0.0, spec.noise.sigma);
        for (double& v : intensities) {
            v = std::clamp(v + gauss(rng), 0.0, 1.0);
        }
    } else if (spec.noise.kind == NoiseKind::SaltPepper && spec.noise.prob > 0.0) {
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        for (double& v : intensities) {
            if (uniform(rng) < spec.noise.prob) {
                v = uniform(rng) < 0.5 ? 0.0 : 1.0;
            }
        }
    }

    return Phantom{GrayImage(spec.width, spec.height, std::move(intensities)),
                   BinaryMask(spec.width, spec.height, std::move(bits))};
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_numbers(const std::string& value, std::size_t expected,
                                  const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidParameters("bad number '" + item + "' for key " + key);
        }
    }
    if (out.size() != expected) {
        throw InvalidParameters("key " + key + " expects " +
                                std::to_string(expected) + " comma-separated values");
    }
    return out;
}

}  // namespace

PhantomSpec parse_phantom_spec(const std::string& text) {
    PhantomSpec spec;
    std::stringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidParameters("expected key=value, got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "width") {
            spec.width = std::size_t(parse_numbers(value, 1, key)[0]);
        } else if (key == "height") {
            spec.height = std::size_t(parse_numbers(value, 1, key)[0]);
        } else if (key == "background_intensity") {
            spec.background_intensity = parse_numbers(value, 1, key)[0];
        } else if (key == "object_intensity") {
            spec.object_intensity = parse_numbers(value, 1, key)[0];
        } else if (key == "disk") {
            const auto v = parse_numbers(value, 3, key);
            spec.disks.push_back({v[0], v[1], v[2]});
        } else if (key == "rect") {
            const auto v = parse_numbers(value, 4, key);
            spec.rects.push_back({v[0], v[1], v[2], v[3]});
        } else if (key == "noise") {
            if (value == "none") {
                spec.noise.kind = NoiseKind::None;
            } else if (value == "gaussian") {
                spec.noise.kind = NoiseKind::Gaussian;
            } else if (value == "salt_pepper") {
                spec.noise.kind = NoiseKind::SaltPepper;
            } else {
                throw InvalidParameters("unknown noise kind '" + value + "'");
            }
        } else if (key == "sigma") {
            spec.noise.sigma = parse_numbers(value, 1, key)[0];
        } else if (key == "prob") {
            spec.noise.prob = parse_numbers(value, 1, key)[0];
        } else if (key == "seed") {
            spec.seed = std::uint64_t(parse_numbers(value, 1, key)[0]);
        } else {
            throw InvalidParameters("unknown phantom key '" + key + "'");
        }
    }
    spec.validate();
    return spec;
}

PhantomSpec load_phantom_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open phantom spec " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_phantom_spec(buffer.str());
}

}  // namespace fuzzyseg
