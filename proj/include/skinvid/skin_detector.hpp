#pragma once

#include "skinvid/bayes_classifier.hpp"
#include "skinvid/colorspace.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace skinvid {

/// Per-pixel skin decisions for one frame, row-major; 1 = skin.
class SkinMask {
public:
    SkinMask(std::size_t width, std::size_t height);
    SkinMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
    void set(std::size_t i, bool skin) noexcept { bits_[i] = skin ? 1 : 0; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::span<std::uint8_t> bits() noexcept { return bits_; }

    std::size_t skin_count() const noexcept;

    friend bool operator==(const SkinMask&, const SkinMask&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<std::uint8_t> bits_;
};

/// Fraction of skin pixels, from the integer count over the pixel total.
double skin_fraction(const SkinMask& m) noexcept;

/// RGB classifier gates, YCbCr classifier confirms. Immutable once built.
class DetectorPipeline {
public:
    /// Throws ColorspaceMismatch unless the classifiers are tagged RGB and
    /// YCbCr respectively.
    DetectorPipeline(BayesClassifier rgb, BayesClassifier ycbcr);

    const BayesClassifier& rgb() const noexcept { return rgb_; }
    const BayesClassifier& ycbcr() const noexcept { return ycbcr_; }
    std::uint64_t hash() const noexcept { return hash_; }

    /// Both stages accept; the YCbCr stage only runs on RGB-accepted pixels.
    bool detect_pixel(RgbPixel px) const noexcept
    {
        return rgb_.classify(px.triplet()) && ycbcr_.classify(rgb_to_ycbcr(px).triplet());
    }

    /// `threads` > 1 splits the frame into row bands; the result does not
    /// depend on the split.
    SkinMask detect_frame(const Frame& f, unsigned threads = 1) const;

    /// Mask from the RGB stage alone.
    SkinMask detect_frame_rgb_only(const Frame& f) const;

private:
    BayesClassifier rgb_;
    BayesClassifier ycbcr_;
    std::uint64_t hash_;
};

std::string format_hash(std::uint64_t hash);
std::uint64_t parse_hash(const std::string& text);

/// Pipeline decision for every 24-bit RGB value, one bit per entry
/// (2 MiB), indexed by (r << 16) | (g << 8) | b.
class ClassificationLut {
public:
    static constexpr std::size_t kEntries = std::size_t{1} << 24;
    static constexpr std::size_t kBytes = kEntries / 8;

    /// Raw bitmap, bit (index % 8) of byte (index / 8).
    ClassificationLut(std::uint64_t pipeline_hash, std::vector<std::uint8_t> bitmap);

    static std::size_t index(RgbPixel p) noexcept
    {
        return (std::size_t{p.r} << 16) | (std::size_t{p.g} << 8) | std::size_t{p.b};
    }

    bool lookup(RgbPixel p) const noexcept
    {
        const std::size_t i = index(p);
        return (bitmap_[i >> 3] >> (i & 7)) & 1u;
    }

    std::uint64_t pipeline_hash() const noexcept { return hash_; }
    std::span<const std::uint8_t> bitmap() const noexcept { return bitmap_; }
    std::size_t skin_entries() const noexcept;

    friend bool operator==(const ClassificationLut&, const ClassificationLut&) = default;

private:
    std::uint64_t hash_;
    std::vector<std::uint8_t> bitmap_;
};

ClassificationLut build_lut(const DetectorPipeline& p, unsigned threads = 1);

/// Throws HashMismatch when `expected_hash` is not the hash the table was
/// built from.
SkinMask detect_frame_lut(const ClassificationLut& lut, const Frame& f, std::uint64_t expected_hash);

/// Number of worker threads to use when the caller asks for "auto" (0).
unsigned resolve_threads(unsigned requested) noexcept;

} // namespace skinvid
