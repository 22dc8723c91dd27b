#include "skinvid/error.hpp"
#include "skinvid/video_categorizer.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace skinvid;
using enum VideoCategory;

namespace {

struct Fixture {
    DetectorPipeline pipeline = testing::make_pipeline(42);
    ClassificationLut lut = build_lut(pipeline);
    testing::PixelPools pools;

    Fixture()
    {
        std::mt19937_64 rng(99);
        pools = testing::pools_from_lut(lut, 4096, rng);
    }
};

const Fixture& fixture()
{
    static const Fixture f;
    return f;
}

ErrorCode code_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::IoError;
}

} // namespace

TEST_SUITE("video_categorizer")
{
    TEST_CASE("aggregate is the frame mean in percent")
    {
        const std::vector<double> constant{0.2, 0.2, 0.2};
        CHECK(aggregate(constant) == doctest::Approx(20.0).epsilon(1e-12));
        const std::vector<double> ends{0.0, 1.0};
        CHECK(aggregate(ends) == 50.0);
        const std::vector<double> single{0.1820};
        CHECK(aggregate(single) == doctest::Approx(18.20).epsilon(1e-12));
        CHECK(code_of([] { aggregate(std::span<const double>{}); }) == ErrorCode::EmptySeries);
        CHECK(code_of([] { aggregate(SkinTimeSeries{}); }) == ErrorCode::EmptySeries);
    }

    TEST_CASE("aggregation strategies")
    {
        // A small frame with full skin and a large one with none.
        const SkinTimeSeries mixed{{{4, 4}, {0, 12}}};
        CHECK(aggregate(mixed, Aggregation::FrameMean) == 50.0);
        CHECK(aggregate(mixed, Aggregation::PixelPooled) == 25.0);
        const SkinTimeSeries even{{{1, 4}, {3, 4}}};
        CHECK(aggregate(even, Aggregation::FrameMean) == 50.0);
        CHECK(aggregate(even, Aggregation::PixelPooled) == 50.0);
    }

    TEST_CASE("aggregate does not depend on frame order")
    {
        std::mt19937_64 rng(6);
        for (int trial = 0; trial < 50; ++trial) {
            SkinTimeSeries s;
            for (int i = 0; i < 40; ++i) {
                const std::uint64_t total = std::uniform_int_distribution<std::uint64_t>(1, 5000)(rng);
                s.frames.push_back({std::uniform_int_distribution<std::uint64_t>(0, total)(rng), total});
            }
            const double reference = aggregate(s);
            std::shuffle(s.frames.begin(), s.frames.end(), rng);
            CHECK(aggregate(s) == reference);
            CHECK(reference >= 0.0);
            CHECK(reference <= 100.0);
        }
    }

    TEST_CASE("categorize follows the thresholds")
    {
        CHECK(categorize(18.20) == LSkin);
        CHECK(categorize(16.59) == LSkin);
        CHECK(categorize(8.14) == PSkin);
        CHECK(categorize(1.15) == NSkin);
        CHECK(categorize(15.0) == PSkin);
        CHECK(categorize(3.0) == NSkin);
        CHECK(categorize(std::nextafter(15.0, 16.0)) == LSkin);
        CHECK(categorize(std::nextafter(3.0, 4.0)) == PSkin);
        CHECK(categorize(0.0) == NSkin);
        CHECK(categorize(100.0) == LSkin);
        CHECK(categorize(30.0, {3.0, 50.0}) == PSkin);
        CHECK(code_of([] { categorize(-0.1); }) == ErrorCode::OutOfRange);
        CHECK(code_of([] { categorize(100.5); }) == ErrorCode::OutOfRange);
        CHECK(code_of([] { categorize(std::nan("")); }) == ErrorCode::OutOfRange);
        CHECK(code_of([] { categorize(5.0, {10.0, 5.0}); }) == ErrorCode::InvalidRule);
        CHECK(code_of([] { categorize(5.0, {0.0, 5.0}); }) == ErrorCode::InvalidRule);
    }

    TEST_CASE("rule is total and monotone")
    {
        VideoCategory previous = NSkin;
        for (int k = 0; k <= 100000; ++k) {
            const VideoCategory c = categorize(k / 1000.0);
            CHECK(static_cast<int>(c) >= static_cast<int>(previous));
            previous = c;
        }
        CHECK(previous == LSkin);
    }

    TEST_CASE("reported skin percentages replay to the reported results")
    {
        std::size_t matches = 0;
        for (const auto& row : testing::reference_videos())
            matches += categorize(row.skin_percent) == row.result;
        CHECK(matches == 30);
        CHECK(categorize(testing::reference_videos()[11].skin_percent) == LSkin);
        CHECK(categorize(testing::reference_videos()[23].skin_percent) == LSkin);
    }

    TEST_CASE("evaluate builds a confusion matrix")
    {
        std::vector<std::pair<VideoCategory, VideoCategory>> pairs;
        for (const auto& row : testing::reference_videos())
            pairs.emplace_back(row.result, row.truth);
        const auto s = evaluate(pairs);
        CHECK(s.total == 30);
        CHECK(s.correct == 28);
        CHECK(s.accuracy() == doctest::Approx(28.0 / 30.0).epsilon(1e-15));
        CHECK(s.truth_count(LSkin) == 11);
        CHECK(s.truth_count(PSkin) == 9);
        CHECK(s.truth_count(NSkin) == 10);
        CHECK(s.predicted_count(LSkin) == 13);
        CHECK(s.confusion[static_cast<int>(PSkin)][static_cast<int>(LSkin)] == 1);
        CHECK(s.confusion[static_cast<int>(NSkin)][static_cast<int>(LSkin)] == 1);

        const std::vector<std::pair<VideoCategory, VideoCategory>> right{{LSkin, LSkin}, {NSkin, NSkin}, {PSkin, PSkin}};
        const auto all = evaluate(right);
        CHECK(all.accuracy() == 1.0);
        for (int t = 0; t < 3; ++t)
            for (int p = 0; p < 3; ++p)
                CHECK(all.confusion[t][p] == (t == p ? 1u : 0u));

        const std::vector<std::pair<VideoCategory, VideoCategory>> wrong{{LSkin, PSkin}};
        const auto one = evaluate(wrong);
        CHECK(one.accuracy() == 0.0);
        CHECK(one.confusion[static_cast<int>(PSkin)][static_cast<int>(LSkin)] == 1);
        CHECK(code_of([] { evaluate({}); }) == ErrorCode::EmptyInput);
    }

    TEST_CASE("synthetic videos are categorized by construction")
    {
        const auto& fx = fixture();
        std::mt19937_64 rng(12);
        constexpr std::size_t w = 40, h = 25; // 1000 pixels

        std::vector<Frame> quarter;
        for (int i = 0; i < 6; ++i)
            quarter.push_back(testing::frame_with_skin(w, h, 250, fx.pools, rng));
        const auto r25 = categorize_video(fx.pipeline, quarter);
        CHECK(r25.category == LSkin);
        CHECK(r25.skin_percent == doctest::Approx(25.0).epsilon(1e-12));
        CHECK(r25.series.frames.size() == 6);
        CHECK(r25.pipeline_hash == fx.pipeline.hash());

        std::vector<Frame> none;
        for (int i = 0; i < 3; ++i)
            none.push_back(testing::frame_with_skin(w, h, 0, fx.pools, rng));
        const auto r0 = categorize_video(fx.pipeline, none);
        CHECK(r0.category == NSkin);
        CHECK(r0.skin_percent == 0.0);

        std::vector<Frame> alternating;
        for (int i = 0; i < 8; ++i)
            alternating.push_back(testing::frame_with_skin(w, h, i % 2 ? 100 : 0, fx.pools, rng));
        CategorizeOptions opts;
        opts.lut = &fx.lut;
        const auto r5 = categorize_video(fx.pipeline, alternating, opts);
        CHECK(r5.skin_percent == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(r5.category == PSkin);
        CHECK(r5 == categorize_video(fx.pipeline, alternating));

        CHECK(code_of([&] { categorize_video(fx.pipeline, std::span<const Frame>{}); }) == ErrorCode::EmptyVideo);
    }
}
