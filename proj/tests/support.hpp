#pragma once

// Shared fixtures and oracles for the unit and acceptance suites. The
// oracles here deliberately avoid the library's log-space and
// message-passing code paths.

#include "skinvid/bayes_classifier.hpp"
#include "skinvid/colorspace.hpp"
#include "skinvid/skin_detector.hpp"
#include "skinvid/video_categorizer.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

namespace skinvid::testing {

class TempDir {
public:
    TempDir()
    {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = std::filesystem::temp_directory_path() /
                ("skinvid-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::uint8_t random_channel(std::mt19937_64& rng)
{
    return static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, 255)(rng));
}

inline RgbPixel random_pixel(std::mt19937_64& rng)
{
    return {random_channel(rng), random_channel(rng), random_channel(rng)};
}

inline Frame random_frame(std::size_t w, std::size_t h, std::mt19937_64& rng)
{
    Frame f(w, h);
    for (auto& p : f.pixels())
        p = random_pixel(rng);
    return f;
}

/// Skin-like tones (R > G > B, warm) versus uniformly random colors.
inline std::vector<std::pair<RgbPixel, SkinClass>> synthetic_skin_pixels(std::mt19937_64& rng, std::size_t skin,
                                                                         std::size_t nonskin)
{
    std::vector<std::pair<RgbPixel, SkinClass>> out;
    std::normal_distribution<double> r(200.0, 25.0), gr(0.72, 0.06), bg(0.80, 0.07);
    auto clamp = [](double v) { return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)); };
    for (std::size_t i = 0; i < skin; ++i) {
        const double red = r(rng);
        const double green = red * gr(rng);
        const double blue = green * bg(rng);
        out.push_back({{clamp(red), clamp(green), clamp(blue)}, SkinClass::Skin});
    }
    for (std::size_t i = 0; i < nonskin; ++i)
        out.push_back({random_pixel(rng), SkinClass::NonSkin});
    return out;
}

inline TrainingSet to_training_set(const std::vector<std::pair<RgbPixel, SkinClass>>& pixels, ColorSpace space)
{
    TrainingSet set;
    set.space = space;
    for (const auto& [p, label] : pixels)
        set.samples.push_back({space == ColorSpace::Rgb ? p.triplet() : rgb_to_ycbcr(p).triplet(), label});
    return set;
}

inline DetectorPipeline make_pipeline(std::uint64_t seed, bool tan = false, unsigned bins = 32)
{
    std::mt19937_64 rng(seed);
    const auto pixels = synthetic_skin_pixels(rng, 3000, 6000);
    auto fit = [&](ColorSpace space) {
        const auto data = to_training_set(pixels, space);
        return tan ? fit_tan(data, Discretizer(bins), 1.0) : fit_naive_bayes(data, Discretizer(bins), 1.0);
    };
    return DetectorPipeline(fit(ColorSpace::Rgb), fit(ColorSpace::YCbCr));
}

/// Small random training set with every channel drawn from [0, 256) and
/// labels correlated with the first channel, so the posterior is non-trivial.
inline TrainingSet random_small_dataset(std::mt19937_64& rng, std::size_t n, ColorSpace space = ColorSpace::Rgb)
{
    TrainingSet set;
    set.space = space;
    for (std::size_t i = 0; i < n; ++i) {
        Triplet t{random_channel(rng), random_channel(rng), random_channel(rng)};
        if (std::bernoulli_distribution(0.5)(rng))
            t[1] = t[0];
        const bool skin = std::bernoulli_distribution(t[0] > 128 ? 0.7 : 0.3)(rng);
        set.samples.push_back({t, skin ? SkinClass::Skin : SkinClass::NonSkin});
    }
    set.samples[0].label = SkinClass::Skin;
    set.samples[1].label = SkinClass::NonSkin;
    return set;
}

/// P(C | evidence) by enumerating the full joint table
/// P(C, A1, A2, A3) = P(C) * prod_i P(Ai | C, parent(Ai)) in linear space and
/// summing out every unobserved attribute.
inline Posterior brute_force_posterior(const BayesClassifier& clf, const Evidence& evidence)
{
    const unsigned b = clf.discretizer().bins();
    const Cpt& cpt = clf.cpt();
    std::array<double, 2> mass{0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
        const auto cls = static_cast<SkinClass>(c);
        for (unsigned x = 0; x < b; ++x)
            for (unsigned y = 0; y < b; ++y)
                for (unsigned z = 0; z < b; ++z) {
                    const BinTriplet v{x, y, z};
                    bool consistent = true;
                    for (std::size_t a = 0; a < 3; ++a)
                        consistent = consistent && (!evidence[a] || *evidence[a] == v[a]);
                    if (!consistent)
                        continue;
                    double p = cpt.prior(cls);
                    for (std::size_t a = 0; a < 3; ++a) {
                        const auto parent = clf.structure().parent(a);
                        p *= cpt.conditional(a, cls, parent ? v[*parent] : 0, v[a]);
                    }
                    mass[c] += p;
                }
    }
    const double total = mass[0] + mass[1];
    return {mass[0] / total, mass[1] / total};
}

inline double relative_error(double got, double want)
{
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Brute-force conditional mutual information straight from the sample
/// histogram: sum over (x, y, c) of p(x,y,c) log[p(x,y,c) p(c) / (p(x,c) p(y,c))].
inline double brute_force_cmi(const TrainingSet& data, const Discretizer& d, std::size_t i, std::size_t j)
{
    const double n = static_cast<double>(data.samples.size());
    auto prob = [&](auto pred) {
        double k = 0;
        for (const auto& s : data.samples)
            if (pred(s))
                ++k;
        return k / n;
    };
    double info = 0.0;
    for (int c = 0; c < 2; ++c)
        for (unsigned x = 0; x < d.bins(); ++x)
            for (unsigned y = 0; y < d.bins(); ++y) {
                const auto cls = static_cast<SkinClass>(c);
                const double pxyc = prob([&](const PixelSample& s) {
                    return s.label == cls && d.bin(s.attributes[i]) == x && d.bin(s.attributes[j]) == y;
                });
                if (pxyc == 0.0)
                    continue;
                const double pc = prob([&](const PixelSample& s) { return s.label == cls; });
                const double pxc =
                    prob([&](const PixelSample& s) { return s.label == cls && d.bin(s.attributes[i]) == x; });
                const double pyc =
                    prob([&](const PixelSample& s) { return s.label == cls && d.bin(s.attributes[j]) == y; });
                info += pxyc * std::log(pxyc * pc / (pxc * pyc));
            }
    return info;
}

struct ReferenceVideo {
    int video;
    VideoCategory truth;
    double skin_percent;
    VideoCategory result;
};

// Video #, ground truth, reported skin %, reported algorithm result.
inline const std::array<ReferenceVideo, 30>& reference_videos()
{
    using enum VideoCategory;
    static const std::array<ReferenceVideo, 30> rows{{
        {1, LSkin, 18.20, LSkin},  {2, LSkin, 16.05, LSkin},  {3, LSkin, 15.90, LSkin},
        {4, LSkin, 30.05, LSkin},  {5, LSkin, 20.50, LSkin},  {6, LSkin, 19.76, LSkin},
        {7, LSkin, 21.61, LSkin},  {8, LSkin, 26.10, LSkin},  {9, LSkin, 17.03, LSkin},
        {10, LSkin, 20.30, LSkin}, {11, LSkin, 25.80, LSkin}, {12, PSkin, 16.59, LSkin},
        {13, PSkin, 8.14, PSkin},  {14, PSkin, 7.65, PSkin},  {15, PSkin, 6.90, PSkin},
        {16, PSkin, 11.15, PSkin}, {17, PSkin, 10.87, PSkin}, {18, PSkin, 9.91, PSkin},
        {19, PSkin, 8.79, PSkin},  {20, PSkin, 7.69, PSkin},  {21, NSkin, 1.15, NSkin},
        {22, NSkin, 0.91, NSkin},  {23, NSkin, 2.10, NSkin},  {24, NSkin, 19.12, LSkin},
        {25, NSkin, 1.17, NSkin},  {26, NSkin, 2.01, NSkin},  {27, NSkin, 1.08, NSkin},
        {28, NSkin, 1.00, NSkin},  {29, NSkin, 1.22, NSkin},  {30, NSkin, 2.50, NSkin},
    }};
    return rows;
}

/// Pixels the pipeline accepts and rejects, found by scanning the LUT.
struct PixelPools {
    std::vector<RgbPixel> skin;
    std::vector<RgbPixel> nonskin;
};

inline PixelPools pools_from_lut(const ClassificationLut& lut, std::size_t per_pool, std::mt19937_64& rng)
{
    PixelPools pools;
    std::vector<RgbPixel> all_skin;
    for (std::size_t i = 0; i < ClassificationLut::kEntries; ++i) {
        const RgbPixel p{static_cast<std::uint8_t>(i >> 16), static_cast<std::uint8_t>(i >> 8),
                         static_cast<std::uint8_t>(i)};
        if (lut.lookup(p))
            all_skin.push_back(p);
    }
    std::uniform_int_distribution<std::size_t> pick(0, all_skin.empty() ? 0 : all_skin.size() - 1);
    while (!all_skin.empty() && pools.skin.size() < per_pool)
        pools.skin.push_back(all_skin[pick(rng)]);
    while (pools.nonskin.size() < per_pool) {
        const RgbPixel p = random_pixel(rng);
        if (!lut.lookup(p))
            pools.nonskin.push_back(p);
    }
    return pools;
}

/// A w x h frame with exactly `skin_pixels` accepted pixels, shuffled.
inline Frame frame_with_skin(std::size_t w, std::size_t h, std::size_t skin_pixels, const PixelPools& pools,
                             std::mt19937_64& rng)
{
    Frame f(w, h);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto& pool = i < skin_pixels ? pools.skin : pools.nonskin;
        f[i] = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    }
    std::shuffle(f.pixels().begin(), f.pixels().end(), rng);
    return f;
}

} // namespace skinvid::testing
