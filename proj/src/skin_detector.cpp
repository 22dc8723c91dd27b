#include "skinvid/skin_detector.hpp"

#include "skinvid/error.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <thread>

namespace skinvid {

namespace {

// Runs body(begin, end) over [0, n) split into contiguous chunks.
template <typename Body>
void parallel_ranges(std::size_t n, unsigned threads, Body body)
{
    threads = std::max(1u, threads);
    if (threads == 1 || n < 2) {
        body(std::size_t{0}, n);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(threads, n);
    std::vector<std::thread> workers;
    workers.reserve(chunks);
    for (std::size_t t = 0; t < chunks; ++t) {
        const std::size_t begin = n * t / chunks;
        const std::size_t end = n * (t + 1) / chunks;
        workers.emplace_back([=] { body(begin, end); });
    }
    for (auto& w : workers)
        w.join();
}

} // namespace

unsigned resolve_threads(unsigned requested) noexcept
{
    if (requested != 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

SkinMask::SkinMask(std::size_t width, std::size_t height)
    : SkinMask(width, height, std::vector<std::uint8_t>(width * height, 0))
{
}

SkinMask::SkinMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits))
{
    if (width_ == 0 || height_ == 0 || bits_.size() != width_ * height_)
        throw Error(ErrorCode::InvalidFrame, "mask size does not match its dimensions");
}

std::size_t SkinMask::skin_count() const noexcept
{
    return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

double skin_fraction(const SkinMask& m) noexcept
{
    return static_cast<double>(m.skin_count()) / static_cast<double>(m.size());
}

DetectorPipeline::DetectorPipeline(BayesClassifier rgb, BayesClassifier ycbcr)
    : rgb_(std::move(rgb)), ycbcr_(std::move(ycbcr))
{
    if (rgb_.colorspace() != ColorSpace::Rgb)
        throw Error(ErrorCode::ColorspaceMismatch, "gating classifier must be trained in RGB");
    if (ycbcr_.colorspace() != ColorSpace::YCbCr)
        throw Error(ErrorCode::ColorspaceMismatch, "confirming classifier must be trained in YCbCr");
    // FNV-style mix of the two stage fingerprints, order-sensitive.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t part : {rgb_.fingerprint(), ycbcr_.fingerprint()}) {
        for (int i = 0; i < 8; ++i) {
            h ^= (part >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    }
    hash_ = h;
}

SkinMask DetectorPipeline::detect_frame(const Frame& f, unsigned threads) const
{
    SkinMask mask(f.width(), f.height());
    auto bits = mask.bits();
    const auto pixels = f.pixels();
    parallel_ranges(pixels.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            bits[i] = detect_pixel(pixels[i]) ? 1 : 0;
    });
    return mask;
}

SkinMask DetectorPipeline::detect_frame_rgb_only(const Frame& f) const
{
    SkinMask mask(f.width(), f.height());
    for (std::size_t i = 0; i < f.size(); ++i)
        mask.set(i, rgb_.classify(f[i].triplet()));
    return mask;
}

std::string format_hash(std::uint64_t hash)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::uint64_t parse_hash(const std::string& text)
{
    if (text.size() != 16 || text.find_first_not_of("0123456789abcdef") != std::string::npos)
        throw Error(ErrorCode::CorruptFile, "malformed pipeline hash '" + text + "'");
    return std::stoull(text, nullptr, 16);
}

ClassificationLut::ClassificationLut(std::uint64_t pipeline_hash, std::vector<std::uint8_t> bitmap)
    : hash_(pipeline_hash), bitmap_(std::move(bitmap))
{
    if (bitmap_.size() != kBytes)
        throw Error(ErrorCode::CorruptFile, "lookup table must hold exactly 2^24 bits");
}

std::size_t ClassificationLut::skin_entries() const noexcept
{
    std::size_t n = 0;
    for (std::uint8_t byte : bitmap_)
        n += static_cast<std::size_t>(std::popcount(byte));
    return n;
}

ClassificationLut build_lut(const DetectorPipeline& p, unsigned threads)
{
    std::vector<std::uint8_t> bitmap(ClassificationLut::kBytes, 0);
    // Each red plane covers 8192 whole bytes, so workers never share a byte.
    parallel_ranges(256, threads, [&](std::size_t r_begin, std::size_t r_end) {
        for (std::size_t r = r_begin; r < r_end; ++r)
            for (unsigned g = 0; g < 256; ++g)
                for (unsigned b = 0; b < 256; ++b) {
                    const RgbPixel px{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                      static_cast<std::uint8_t>(b)};
                    if (p.detect_pixel(px)) {
                        const std::size_t i = ClassificationLut::index(px);
                        bitmap[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
                    }
                }
    });
    return ClassificationLut(p.hash(), std::move(bitmap));
}

SkinMask detect_frame_lut(const ClassificationLut& lut, const Frame& f, std::uint64_t expected_hash)
{
    if (lut.pipeline_hash() != expected_hash)
        throw Error(ErrorCode::HashMismatch, "lookup table was built for pipeline " + format_hash(lut.pipeline_hash()) +
                                                 ", not " + format_hash(expected_hash));
    SkinMask mask(f.width(), f.height());
    auto bits = mask.bits();
    const auto pixels = f.pixels();
    for (std::size_t i = 0; i < pixels.size(); ++i)
        bits[i] = lut.lookup(pixels[i]) ? 1 : 0;
    return mask;
}

} // namespace skinvid
