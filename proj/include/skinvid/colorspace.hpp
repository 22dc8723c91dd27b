#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace skinvid {

enum class ColorSpace : std::uint8_t { Rgb, YCbCr };

std::string_view to_string(ColorSpace space) noexcept;
ColorSpace parse_colorspace(std::string_view name);

/// Three 8-bit channel values in whatever space a classifier was trained on.
using Triplet = std::array<std::uint8_t, 3>;

struct RgbPixel {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    constexpr Triplet triplet() const noexcept { return {r, g, b}; }
    friend constexpr bool operator==(const RgbPixel&, const RgbPixel&) = default;
};

struct YCbCrPixel {
    std::uint8_t y = 0;
    std::uint8_t cb = 0;
    std::uint8_t cr = 0;

    constexpr Triplet triplet() const noexcept { return {y, cb, cr}; }
    friend constexpr bool operator==(const YCbCrPixel&, const YCbCrPixel&) = default;
};

/// Identifier of the transform below; persisted alongside every model.
inline constexpr std::string_view kYCbCrTransformId = "BT601-full-range";

/// Full-range BT.601 (JFIF) conversion:
///   Y  =       0.299    R + 0.587    G + 0.114    B
///   Cb = 128 - 0.168736 R - 0.331264 G + 0.5      B
///   Cr = 128 + 0.5      R - 0.418688 G - 0.081312 B
/// evaluated in double, rounded half away from zero and clamped to [0, 255].
YCbCrPixel rgb_to_ycbcr(RgbPixel p) noexcept;

/// Row-major image. Width and height are both at least 1.
template <typename Pixel>
class Image {
public:
    Image(std::size_t width, std::size_t height);
    Image(std::size_t width, std::size_t height, std::vector<Pixel> pixels);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    const Pixel& operator[](std::size_t i) const noexcept { return pixels_[i]; }
    Pixel& operator[](std::size_t i) noexcept { return pixels_[i]; }
    const Pixel& at(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }
    Pixel& at(std::size_t x, std::size_t y) noexcept { return pixels_[y * width_ + x]; }

    std::span<const Pixel> pixels() const noexcept { return pixels_; }
    std::span<Pixel> pixels() noexcept { return pixels_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<Pixel> pixels_;
};

using Frame = Image<RgbPixel>;
using YCbCrFrame = Image<YCbCrPixel>;
using GrayImage = Image<std::uint8_t>;

YCbCrFrame convert_frame(const Frame& f);

} // namespace skinvid
