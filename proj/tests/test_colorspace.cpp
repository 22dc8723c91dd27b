#include "skinvid/colorspace.hpp"
#include "skinvid/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>

using namespace skinvid;

namespace {

// Exact evaluation in millionths: every coefficient has at most six
// decimals, so the matrix is integer arithmetic at that scale.
struct ExactChannel {
    std::uint8_t value;
    bool tie; // exactly halfway between two integers
};

ExactChannel exact_round(long long micro)
{
    const long long q = micro >= 0 ? (micro + 500000) / 1000000 : -((-micro + 500000) / 1000000);
    const bool tie = std::llabs(micro) % 1000000 == 500000;
    return {static_cast<std::uint8_t>(std::clamp(q, 0LL, 255LL)), tie};
}

std::array<ExactChannel, 3> exact_ycbcr(int r, int g, int b)
{
    return {exact_round(299000LL * r + 587000LL * g + 114000LL * b),
            exact_round(128000000LL - 168736LL * r - 331264LL * g + 500000LL * b),
            exact_round(128000000LL + 500000LL * r - 418688LL * g - 81312LL * b)};
}

bool agrees(const YCbCrPixel& got, int r, int g, int b)
{
    const auto want = exact_ycbcr(r, g, b);
    const std::array<std::uint8_t, 3> have{got.y, got.cb, got.cr};
    for (int k = 0; k < 3; ++k) {
        if (have[k] == want[k].value)
            continue;
        // Double rounding may land either side of an exact tie, never further.
        if (!want[k].tie || std::abs(int(have[k]) - int(want[k].value)) != 1)
            return false;
    }
    return true;
}

} // namespace

TEST_SUITE("colorspace")
{
    TEST_CASE("achromatic input maps to neutral chroma")
    {
        for (int v = 0; v < 256; ++v) {
            const auto u = static_cast<std::uint8_t>(v);
            CHECK(rgb_to_ycbcr({u, u, u}) == YCbCrPixel{u, 128, 128});
        }
        CHECK(rgb_to_ycbcr({0, 0, 0}) == YCbCrPixel{0, 128, 128});
        CHECK(rgb_to_ycbcr({128, 128, 128}) == YCbCrPixel{128, 128, 128});
    }

    TEST_CASE("pure red saturates Cr")
    {
        // Y = 76.245, Cb = 84.972, Cr = 255.5 -> clamped.
        const auto exact = exact_ycbcr(255, 0, 0);
        CHECK(exact[0].value == 76);
        CHECK(exact[1].value == 85);
        CHECK(exact[2].value == 255);
        CHECK(rgb_to_ycbcr({255, 0, 0}) == YCbCrPixel{76, 85, 255});
    }

    TEST_CASE("matches exact integer evaluation over every RGB value")
    {
        std::size_t mismatches = 0;
        std::size_t ties = 0;
        for (int r = 0; r < 256; ++r)
            for (int g = 0; g < 256; ++g)
                for (int b = 0; b < 256; ++b) {
                    const RgbPixel p{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                     static_cast<std::uint8_t>(b)};
                    const YCbCrPixel got = rgb_to_ycbcr(p);
                    if (!agrees(got, r, g, b))
                        ++mismatches;
                    const auto want = exact_ycbcr(r, g, b);
                    ties += !(got == YCbCrPixel{want[0].value, want[1].value, want[2].value});
                }
        CHECK(mismatches == 0);
        MESSAGE("outputs off by one at exact ties: " << ties);
    }

    TEST_CASE("luma is monotone in each channel")
    {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 2000; ++trial) {
            RgbPixel p = testing::random_pixel(rng);
            for (int channel = 0; channel < 3; ++channel) {
                RgbPixel q = p;
                auto& c = channel == 0 ? q.r : channel == 1 ? q.g : q.b;
                if (c == 255)
                    continue;
                ++c;
                CHECK(rgb_to_ycbcr(q).y >= rgb_to_ycbcr(p).y);
            }
        }
    }

    TEST_CASE("convert_frame is element-wise and shape preserving")
    {
        const Frame one(1, 1, {{255, 255, 255}});
        CHECK(convert_frame(one)[0] == YCbCrPixel{255, 128, 128});

        const Frame two(2, 1, {{0, 0, 0}, {10, 10, 10}});
        const auto c2 = convert_frame(two);
        CHECK(c2[0] == YCbCrPixel{0, 128, 128});
        CHECK(c2[1] == YCbCrPixel{10, 128, 128});

        std::mt19937_64 rng(5);
        const Frame f = testing::random_frame(17, 9, rng);
        const auto c = convert_frame(f);
        CHECK(c.width() == 17);
        CHECK(c.height() == 9);
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(c[i] == rgb_to_ycbcr(f[i]));
    }

    TEST_CASE("frames reject bad dimensions")
    {
        CHECK_THROWS_AS(Frame(0, 3), Error);
        CHECK_THROWS_AS(Frame(2, 2, std::vector<RgbPixel>(3)), Error);
    }
}
