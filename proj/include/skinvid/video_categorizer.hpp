#pragma once

#include "skinvid/colorspace.hpp"
#include "skinvid/skin_detector.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace skinvid {

/// Ordered so that NSKIN < PSKIN < LSKIN.
enum class VideoCategory : std::uint8_t { NSkin = 0, PSkin = 1, LSkin = 2 };

inline constexpr std::array<VideoCategory, 3> kCategories{VideoCategory::LSkin, VideoCategory::PSkin,
                                                          VideoCategory::NSkin};

std::string_view to_string(VideoCategory c) noexcept;
/// Accepts LSKIN / PSKIN / NSKIN (case-insensitive); throws CorruptFile otherwise.
VideoCategory parse_category(std::string_view text);

/// Percent thresholds. LSKIN above `high`, PSKIN in (low, high], NSKIN at or
/// below `low`.
struct CategoryRule {
    double low = 3.0;
    double high = 15.0;

    /// Throws InvalidRule unless 0 < low < high < 100.
    void validate() const;
    friend bool operator==(const CategoryRule&, const CategoryRule&) = default;
};

VideoCategory categorize(double percent, const CategoryRule& rule = {});

struct FrameSkinCount {
    std::uint64_t skin_pixels = 0;
    std::uint64_t total_pixels = 1;

    double fraction() const noexcept
    {
        return static_cast<double>(skin_pixels) / static_cast<double>(total_pixels);
    }
    friend bool operator==(const FrameSkinCount&, const FrameSkinCount&) = default;
};

/// Per-frame skin counts in frame order (the "skin graph" of a video).
struct SkinTimeSeries {
    std::vector<FrameSkinCount> frames;

    std::vector<double> fractions() const;
    friend bool operator==(const SkinTimeSeries&, const SkinTimeSeries&) = default;
};

enum class Aggregation : std::uint8_t {
    /// Mean of per-frame fractions; every frame weighs the same.
    FrameMean,
    /// Total skin pixels over total pixels.
    PixelPooled,
};

std::string_view to_string(Aggregation a) noexcept;

/// Video skin percentage in [0, 100]. Throws EmptySeries.
double aggregate(const SkinTimeSeries& series, Aggregation how = Aggregation::FrameMean);
/// Mean of raw fractions times 100. Throws EmptySeries.
double aggregate(std::span<const double> fractions);

struct VideoReport {
    std::string video_id;
    SkinTimeSeries series;
    double skin_percent = 0.0;
    VideoCategory category = VideoCategory::NSkin;
    CategoryRule rule;
    Aggregation aggregation = Aggregation::FrameMean;
    std::uint64_t pipeline_hash = 0;

    friend bool operator==(const VideoReport&, const VideoReport&) = default;
};

struct CategorizeOptions {
    CategoryRule rule;
    Aggregation aggregation = Aggregation::FrameMean;
    unsigned threads = 1;
    /// When set, frames are classified through the table instead of the
    /// classifiers; the table must belong to the pipeline.
    const ClassificationLut* lut = nullptr;
};

/// Builds a report from already-computed per-frame counts.
VideoReport make_report(std::string video_id, SkinTimeSeries series, const CategorizeOptions& options,
                        std::uint64_t pipeline_hash);

/// Throws EmptyVideo when `frames` is empty.
VideoReport categorize_video(const DetectorPipeline& p, std::span<const Frame> frames,
                             const CategorizeOptions& options = {}, std::string video_id = "video");

struct EvaluationSummary {
    /// counts[truth][predicted], indexed by the VideoCategory value.
    std::array<std::array<std::size_t, 3>, 3> confusion{};
    std::size_t total = 0;
    std::size_t correct = 0;

    double accuracy() const noexcept { return static_cast<double>(correct) / static_cast<double>(total); }
    std::size_t truth_count(VideoCategory c) const noexcept;
    std::size_t predicted_count(VideoCategory c) const noexcept;
};

/// Pairs are (predicted, ground truth). Throws EmptyInput.
EvaluationSummary evaluate(std::span<const std::pair<VideoCategory, VideoCategory>> predictions);

} // namespace skinvid
