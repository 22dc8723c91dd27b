#include "skinvid/colorspace.hpp"

#include "skinvid/error.hpp"

#include <cmath>
#include <string>

namespace skinvid {

std::string_view to_string(ColorSpace space) noexcept
{
    return space == ColorSpace::Rgb ? "RGB" : "YCbCr";
}

ColorSpace parse_colorspace(std::string_view name)
{
    if (name == "RGB" || name == "rgb")
        return ColorSpace::Rgb;
    if (name == "YCbCr" || name == "ycbcr")
        return ColorSpace::YCbCr;
    throw Error(ErrorCode::CorruptFile, "unknown colorspace '" + std::string(name) + "'");
}

namespace {

std::uint8_t round_clamp(double v) noexcept
{
    // std::round is half-away-from-zero.
    const double r = std::round(v);
    if (r <= 0.0)
        return 0;
    if (r >= 255.0)
        return 255;
    return static_cast<std::uint8_t>(r);
}

} // namespace

YCbCrPixel rgb_to_ycbcr(RgbPixel p) noexcept
{
    const double r = p.r;
    const double g = p.g;
    const double b = p.b;
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    const double cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b;
    const double cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b;
    return {round_clamp(y), round_clamp(cb), round_clamp(cr)};
}

template <typename Pixel>
Image<Pixel>::Image(std::size_t width, std::size_t height)
    : Image(width, height, std::vector<Pixel>(width * height))
{
}

template <typename Pixel>
Image<Pixel>::Image(std::size_t width, std::size_t height, std::vector<Pixel> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels))
{
    if (width_ == 0 || height_ == 0)
        throw Error(ErrorCode::InvalidFrame, "image dimensions must be positive");
    if (pixels_.size() != width_ * height_)
        throw Error(ErrorCode::InvalidFrame,
                    "pixel count " + std::to_string(pixels_.size()) + " does not match " +
                        std::to_string(width_) + "x" + std::to_string(height_));
}

template class Image<RgbPixel>;
template class Image<YCbCrPixel>;
template class Image<std::uint8_t>;

YCbCrFrame convert_frame(const Frame& f)
{
    std::vector<YCbCrPixel> out;
    out.reserve(f.size());
    for (const RgbPixel& p : f.pixels())
        out.push_back(rgb_to_ycbcr(p));
    return YCbCrFrame(f.width(), f.height(), std::move(out));
}

} // namespace skinvid
