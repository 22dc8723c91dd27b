#include "skinvid/video_categorizer.hpp"

#include "skinvid/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace skinvid {

std::string_view to_string(VideoCategory c) noexcept
{
    switch (c) {
    case VideoCategory::LSkin: return "LSKIN";
    case VideoCategory::PSkin: return "PSKIN";
    case VideoCategory::NSkin: return "NSKIN";
    }
    return "NSKIN";
}

VideoCategory parse_category(std::string_view text)
{
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    for (VideoCategory c : kCategories)
        if (upper == to_string(c))
            return c;
    throw Error(ErrorCode::CorruptFile, "unknown video category '" + std::string(text) + "'");
}

std::string_view to_string(Aggregation a) noexcept
{
    return a == Aggregation::FrameMean ? "frame-mean" : "pixel-pooled";
}

void CategoryRule::validate() const
{
    if (!(low > 0.0 && low < high && high < 100.0))
        throw Error(ErrorCode::InvalidRule, "category thresholds must satisfy 0 < low < high < 100");
}

VideoCategory categorize(double percent, const CategoryRule& rule)
{
    rule.validate();
    if (!(percent >= 0.0 && percent <= 100.0))
        throw Error(ErrorCode::OutOfRange, "skin percentage " + std::to_string(percent) + " is outside [0, 100]");
    if (percent > rule.high)
        return VideoCategory::LSkin;
    if (percent > rule.low)
        return VideoCategory::PSkin;
    return VideoCategory::NSkin;
}

std::vector<double> SkinTimeSeries::fractions() const
{
    std::vector<double> out;
    out.reserve(frames.size());
    for (const auto& f : frames)
        out.push_back(f.fraction());
    return out;
}

double aggregate(std::span<const double> fractions)
{
    if (fractions.empty())
        throw Error(ErrorCode::EmptySeries, "cannot aggregate an empty series");
    // Summing in sorted order makes the result independent of frame order.
    std::vector<double> sorted(fractions.begin(), fractions.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double f : sorted)
        sum += f;
    return std::clamp(sum / static_cast<double>(sorted.size()) * 100.0, 0.0, 100.0);
}

double aggregate(const SkinTimeSeries& series, Aggregation how)
{
    if (series.frames.empty())
        throw Error(ErrorCode::EmptySeries, "cannot aggregate an empty series");
    const auto& frames = series.frames;
    const bool uniform = std::all_of(frames.begin(), frames.end(), [&](const FrameSkinCount& f) {
        return f.total_pixels == frames.front().total_pixels;
    });
    if (how == Aggregation::PixelPooled || uniform) {
        // Equal frame sizes make the two strategies coincide; integer sums
        // keep the result exact up to the final division.
        std::uint64_t skin = 0;
        std::uint64_t total = 0;
        for (const auto& f : frames) {
            skin += f.skin_pixels;
            total += f.total_pixels;
        }
        return static_cast<double>(skin) * 100.0 / static_cast<double>(total);
    }
    const auto fr = series.fractions();
    return aggregate(std::span<const double>(fr));
}

VideoReport make_report(std::string video_id, SkinTimeSeries series, const CategorizeOptions& options,
                        std::uint64_t pipeline_hash)
{
    VideoReport report;
    report.video_id = std::move(video_id);
    report.skin_percent = aggregate(series, options.aggregation);
    report.series = std::move(series);
    report.category = categorize(report.skin_percent, options.rule);
    report.rule = options.rule;
    report.aggregation = options.aggregation;
    report.pipeline_hash = pipeline_hash;
    return report;
}

VideoReport categorize_video(const DetectorPipeline& p, std::span<const Frame> frames,
                             const CategorizeOptions& options, std::string video_id)
{
    options.rule.validate();
    if (frames.empty())
        throw Error(ErrorCode::EmptyVideo, "video '" + video_id + "' has no frames");
    SkinTimeSeries series;
    series.frames.reserve(frames.size());
    for (const Frame& f : frames) {
        const SkinMask mask =
            options.lut ? detect_frame_lut(*options.lut, f, p.hash()) : p.detect_frame(f, options.threads);
        series.frames.push_back({mask.skin_count(), mask.size()});
    }
    return make_report(std::move(video_id), std::move(series), options, p.hash());
}

std::size_t EvaluationSummary::truth_count(VideoCategory c) const noexcept
{
    const auto& row = confusion[static_cast<std::size_t>(c)];
    return row[0] + row[1] + row[2];
}

std::size_t EvaluationSummary::predicted_count(VideoCategory c) const noexcept
{
    std::size_t n = 0;
    for (const auto& row : confusion)
        n += row[static_cast<std::size_t>(c)];
    return n;
}

EvaluationSummary evaluate(std::span<const std::pair<VideoCategory, VideoCategory>> predictions)
{
    if (predictions.empty())
        throw Error(ErrorCode::EmptyInput, "no predictions to evaluate");
    EvaluationSummary s;
    for (const auto& [predicted, truth] : predictions) {
        ++s.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
        ++s.total;
        if (predicted == truth)
            ++s.correct;
    }
    return s;
}

} // namespace skinvid
