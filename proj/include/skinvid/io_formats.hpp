#pragma once

#include "skinvid/bayes_classifier.hpp"
#include "skinvid/colorspace.hpp"
#include "skinvid/skin_detector.hpp"
#include "skinvid/video_categorizer.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace skinvid::io {

inline constexpr int kModelVersion = 1;
inline constexpr int kPipelineVersion = 1;
inline constexpr int kReportVersion = 1;

// Models and pipelines ------------------------------------------------------
//
// Model files hold counts, never probabilities; loading recomputes every
// probability from the counts, so posteriors survive a round trip bit for bit.

std::string serialize_model(const BayesClassifier& clf);
BayesClassifier parse_model(const std::string& text);
void save_model(const BayesClassifier& clf, const std::filesystem::path& path);
BayesClassifier load_model(const std::filesystem::path& path);

std::string serialize_pipeline(const DetectorPipeline& p);
/// Throws ColorspaceMismatch for swapped stages and HashMismatch when the
/// stored hash does not match the stored models.
DetectorPipeline parse_pipeline(const std::string& text);
void save_pipeline(const DetectorPipeline& p, const std::filesystem::path& path);
DetectorPipeline load_pipeline(const std::filesystem::path& path);

// Netpbm ------------------------------------------------------------------

/// Binary P6, maxval 255.
Frame read_ppm(std::istream& in);
Frame read_ppm(const std::filesystem::path& path);
void write_ppm(const Frame& f, std::ostream& out);
void write_ppm(const Frame& f, const std::filesystem::path& path);

/// Binary P5, maxval 255.
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& img, std::ostream& out);

/// Skin pixels are written as 0 (black), everything else as 255.
void write_mask(const SkinMask& mask, std::ostream& out);
void write_mask(const SkinMask& mask, const std::filesystem::path& path);

// Frame sources -----------------------------------------------------------

/// "SKV1 <width> <height> <nframes>\n" followed by packed RGB24 frames.
std::vector<Frame> read_skv1(std::istream& in);
void write_skv1(std::span<const Frame> frames, std::ostream& out);

/// A directory of .ppm files in lexicographic name order, an SKV1 file, or
/// "-" for an SKV1 stream on standard input. Every frame must share the
/// first frame's dimensions (DimensionMismatch otherwise).
std::vector<Frame> read_frames(const std::filesystem::path& source);

// Training data -----------------------------------------------------------

/// Rows of "r,g,b,label" with label skin/nonskin (or 1/0); an optional header
/// row, blank lines and '#' comments are skipped. Samples are converted into
/// `space` before they are returned.
TrainingSet read_training_csv(std::istream& in, ColorSpace space);
TrainingSet read_training_csv(const std::filesystem::path& path, ColorSpace space);

/// Labels every pixel of `image` from `mask`: mask value 0 marks skin. The
/// mask may be a P5 or a P6 file (P6 pixels are skin when all channels are 0).
TrainingSet training_from_image_mask(const Frame& image, const GrayImage& mask, ColorSpace space);
GrayImage read_mask_image(const std::filesystem::path& path);

// Reports -----------------------------------------------------------------

std::string serialize_report(const VideoReport& report);
/// Recomputes the percentage and category from the stored counts and rule;
/// throws CorruptFile if they disagree with the stored values.
VideoReport parse_report(const std::string& text);
void write_report(const VideoReport& report, const std::filesystem::path& path);
VideoReport read_report(const std::filesystem::path& path);

/// Header "frame_index,skin_fraction", one row per frame.
void write_series_csv(const SkinTimeSeries& series, std::ostream& out);
void write_series_csv(const SkinTimeSeries& series, const std::filesystem::path& path);

struct PredictionRow {
    std::string id;
    VideoCategory predicted = VideoCategory::NSkin;
    VideoCategory truth = VideoCategory::NSkin;
};

/// Rows of "id,pred,truth"; an optional header row is skipped.
std::vector<PredictionRow> read_predictions_csv(std::istream& in);
std::vector<PredictionRow> read_predictions_csv(const std::filesystem::path& path);

// Lookup tables -----------------------------------------------------------

/// "SKLUT1 <hash>\n" followed by the 2 MiB bitmap.
void write_lut(const ClassificationLut& lut, std::ostream& out);
void write_lut(const ClassificationLut& lut, const std::filesystem::path& path);
ClassificationLut read_lut(std::istream& in);
ClassificationLut read_lut(const std::filesystem::path& path);

/// Fixed-point decimal with `digits` fractional digits.
std::string format_fixed(double value, int digits = 6);

} // namespace skinvid::io
