#include "fuzzyseg/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fuzzyseg {

LabelImage::LabelImage(std::size_t w, std::size_t h, std::size_t c,
                       std::vector<std::uint8_t> l)
    : width(w), height(h), cluster_count(c), labels(std::move(l)) {
    if (width < 1 || height < 1) {
        throw InvalidParameters("label image dimensions must be at least 1x1");
    }
    if (labels.size() != width * height) {
        throw InvalidParameters("label buffer size does not match width*height");
    }
    if (cluster_count < 1 || cluster_count > 256) {
        throw InvalidParameters("cluster count must lie in [1,256]");
    }
    for (std::uint8_t v : labels) {
        if (v >= cluster_count) {
            throw InvalidParameters("label exceeds cluster count");
        }
    }
}

namespace {

constexpr unsigned char kPngSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw IoError("short write to " + path.string());
}

/// Reads the next PNM header token, skipping whitespace and '#' comments.
std::string next_pnm_token(const std::string& bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        const char ch = bytes[pos];
        if (ch == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(ch))) {
            ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() &&
           !std::isspace(static_cast<unsigned char>(bytes[pos])) &&
           bytes[pos] != '#') {
        ++pos;
    }
    if (start == pos) throw MalformedHeaderError("PGM header ended early");
    return bytes.substr(start, pos - start);
}

long parse_pnm_number(const std::string& token, const char* what) {
    for (char ch : token) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) {
            throw MalformedHeaderError(std::string("PGM ") + what +
                                       " is not a number: '" + token + "'");
        }
    }
    try {
        return std::stol(token);
    } catch (const std::exception&) {
        throw MalformedHeaderError(std::string("PGM ") + what + " out of range");
    }
}

struct PgmPayload {
    std::size_t width = 0;
    std::size_t height = 0;
    const unsigned char* pixels = nullptr;
};

/// Parses a P5 header with maxval 255 and locates the payload in `bytes`.
PgmPayload parse_pgm(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw UnsupportedFormatError("not a binary P5 PGM");
    }
    std::size_t pos = 2;
    const long width = parse_pnm_number(next_pnm_token(bytes, pos), "width");
    const long height = parse_pnm_number(next_pnm_token(bytes, pos), "height");
    const long maxval = parse_pnm_number(next_pnm_token(bytes, pos), "maxval");
    if (width < 1 || height < 1) {
        throw MalformedHeaderError("PGM dimensions must be positive");
    }
    if (maxval != 255) {
        throw UnsupportedFormatError("only maxval 255 PGMs are supported, got " +
                                     std::to_string(maxval));
    }
    if (pos >= bytes.size() ||
        !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        throw MalformedHeaderError("PGM header must end with a whitespace byte");
    }
    ++pos;  // exactly one whitespace separates header and payload
    const std::size_t expected = std::size_t(width) * std::size_t(height);
    if (bytes.size() - pos < expected) {
        throw TruncatedPayloadError("PGM payload has " +
                                    std::to_string(bytes.size() - pos) +
                                    " bytes, expected " + std::to_string(expected));
    }
    return {std::size_t(width), std::size_t(height),
            reinterpret_cast<const unsigned char*>(bytes.data() + pos)};
}

std::string encode_pgm(std::size_t width, std::size_t height,
                       const std::vector<std::uint8_t>& pixels) {
    std::string out = "P5\n" + std::to_string(width) + " " +
                      std::to_string(height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    return out;
}

std::uint8_t quantize(double v) {
    const double scaled = std::lround(v * 255.0);
    return std::uint8_t(std::min(255.0, std::max(0.0, scaled)));
}

// --- PNG helpers (libpng, full API so non 8-bit-gray inputs can be rejected).

struct PngReadState {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* file = nullptr;
    ~PngReadState() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (file) std::fclose(file);
    }
};

GrayImage read_png(const std::filesystem::path& path) {
    PngReadState state;
    state.file = std::fopen(path.string().c_str(), "rb");
    if (!state.file) throw IoError("cannot open " + path.string());

    state.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                       nullptr);
    if (!state.png) throw IoError("png_create_read_struct failed");
    state.info = png_create_info_struct(state.png);
    if (!state.info) throw IoError("png_create_info_struct failed");

    // libpng reports errors via longjmp; every failure past this point lands
    // here. No locals with destructors live between setjmp and the reads.
    if (setjmp(png_jmpbuf(state.png))) {
        throw MalformedHeaderError("corrupt PNG: " + path.string());
    }
    png_init_io(state.png, state.file);
    png_read_info(state.png, state.info);

    const png_byte color_type = png_get_color_type(state.png, state.info);
    const png_byte bit_depth = png_get_bit_depth(state.png, state.info);
    if (color_type != PNG_COLOR_TYPE_GRAY || bit_depth != 8) {
        throw UnsupportedFormatError(
            "only 8-bit grayscale PNGs are supported: " + path.string());
    }
    const std::size_t width = png_get_image_width(state.png, state.info);
    const std::size_t height = png_get_image_height(state.png, state.info);

    std::vector<std::uint8_t> pixels(width * height);
    std::vector<png_bytep> rows(height);
    for (std::size_t y = 0; y < height; ++y) rows[y] = pixels.data() + y * width;
    png_read_image(state.png, rows.data());
    png_read_end(state.png, nullptr);

    std::vector<double> intensities(pixels.size());
    for (std::size_t k = 0; k < pixels.size(); ++k) {
        intensities[k] = double(pixels[k]) / 255.0;
    }
    return GrayImage(width, height, std::move(intensities));
}

struct PngWriteState {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* file = nullptr;
    ~PngWriteState() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (file) std::fclose(file);
    }
};

void write_png(const std::filesystem::path& path, std::size_t width,
               std::size_t height, const std::vector<std::uint8_t>& pixels) {
    PngWriteState state;
    state.file = std::fopen(path.string().c_str(), "wb");
    if (!state.file) throw IoError("cannot open " + path.string() + " for writing");

    state.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                        nullptr);
    if (!state.png) throw IoError("png_create_write_struct failed");
    state.info = png_create_info_struct(state.png);
    if (!state.info) throw IoError("png_create_info_struct failed");

    if (setjmp(png_jmpbuf(state.png))) {
        throw IoError("PNG write failed: " + path.string());
    }
    png_init_io(state.png, state.file);
    png_set_IHDR(state.png, state.info, png_uint_32(width), png_uint_32(height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(state.png, state.info);
    for (std::size_t y = 0; y < height; ++y) {
        png_write_row(state.png,
                      const_cast<png_bytep>(pixels.data() + y * width));
    }
    png_write_end(state.png, nullptr);
}

bool has_png_signature(const std::string& bytes) {
    return bytes.size() >= 8 &&
           std::memcmp(bytes.data(), kPngSignature, 8) == 0;
}

bool has_png_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (char& ch : ext) ch = char(std::tolower(static_cast<unsigned char>(ch)));
    return ext == ".png";
}

}  // namespace

GrayImage read_gray(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (has_png_signature(bytes)) return read_png(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
        const PgmPayload pgm = parse_pgm(bytes);
        std::vector<double> intensities(pgm.width * pgm.height);
        for (std::size_t k = 0; k < intensities.size(); ++k) {
            intensities[k] = double(pgm.pixels[k]) / 255.0;
        }
        return GrayImage(pgm.width, pgm.height, std::move(intensities));
    }
    throw UnsupportedFormatError("unrecognized image format: " + path.string());
}

void write_gray(const GrayImage& image, const std::filesystem::path& path) {
    std::vector<std::uint8_t> pixels(image.pixel_count());
    for (std::size_t k = 0; k < pixels.size(); ++k) {
        pixels[k] = quantize(image.intensities[k]);
    }
    if (has_png_extension(path)) {
        write_png(path, image.width, image.height, pixels);
    } else {
        write_file(path, encode_pgm(image.width, image.height, pixels));
    }
}

void write_labels(const LabelImage& labels, const std::filesystem::path& path) {
    std::vector<std::uint8_t> pixels(labels.labels.size());
    const std::size_t c = labels.cluster_count;
    for (std::size_t k = 0; k < pixels.size(); ++k) {
        pixels[k] = c <= 1 ? 0
                           : std::uint8_t(255 * std::size_t(labels.labels[k]) /
                                          (c - 1));
    }
    write_file(path, encode_pgm(labels.width, labels.height, pixels));
}

BinaryMask read_mask(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    const PgmPayload pgm = parse_pgm(bytes);
    std::vector<bool> bits(pgm.width * pgm.height);
    for (std::size_t k = 0; k < bits.size(); ++k) {
        bits[k] = pgm.pixels[k] >= 128;
    }
    return BinaryMask(pgm.width, pgm.height, std::move(bits));
}

void write_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> pixels(mask.bits.size());
    for (std::size_t k = 0; k < pixels.size(); ++k) {
        pixels[k] = mask.bits[k] ? 255 : 0;
    }
    write_file(path, encode_pgm(mask.width, mask.height, pixels));
}

void write_membership_csv(const Matrix& u, const std::filesystem::path& path) {
    std::string out = "pixel";
    for (std::size_t i = 0; i < u.rows; ++i) {
        out += ",c" + std::to_string(i);
    }
    out += "\n";
    char buffer[64];
    for (std::size_t k = 0; k < u.cols; ++k) {
        out += std::to_string(k);
        for (std::size_t i = 0; i < u.rows; ++i) {
            std::snprintf(buffer, sizeof(buffer), ",%.9g", u.at(i, k));
            out += buffer;
        }
        out += "\n";
    }
    write_file(path, out);
}

void write_membership_csv(const MembershipMatrix& u,
                          const std::filesystem::path& path) {
    write_membership_csv(u.values, path);
}

}  // namespace fuzzyseg
