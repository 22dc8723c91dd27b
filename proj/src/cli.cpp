#include "skinvid/cli.hpp"

#include "skinvid/bayes_classifier.hpp"
#include "skinvid/error.hpp"
#include "skinvid/io_formats.hpp"
#include "skinvid/skin_detector.hpp"
#include "skinvid/video_categorizer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>

namespace skinvid::cli {

namespace fs = std::filesystem;

namespace {

struct Failure {
    int code;
    std::string message;
};

// Runs `f`, reclassifying any library error as the given exit code.
template <typename F>
auto stage(int code, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const Error& e) {
        throw Failure{code, e.what()};
    }
}

void check_flag(bool ok, const std::string& message)
{
    if (!ok)
        throw Failure{kUsage, message};
}

std::string fixed(double v) { return io::format_fixed(v, 6); }

struct TrainArgs {
    std::string data;
    std::vector<std::string> images;
    std::vector<std::string> masks;
    std::string space;
    std::string structure = "nb";
    unsigned bins = Discretizer::kDefaultBins;
    double alpha = 1.0;
    double threshold = BayesClassifier::kDefaultThreshold;
    std::string out;
};

int do_train(const TrainArgs& a, std::ostream& out)
{
    const ColorSpace space = a.space == "rgb" ? ColorSpace::Rgb : ColorSpace::YCbCr;
    const Discretizer disc = stage(kUsage, [&] { return Discretizer(a.bins); });
    check_flag(a.alpha > 0.0, "--alpha must be positive");
    check_flag(a.threshold > 0.0 && a.threshold < 1.0, "--threshold must lie in (0, 1)");
    check_flag(a.data.empty() != a.images.empty(), "give either --data or --image/--mask pairs");
    check_flag(a.images.size() == a.masks.size(), "every --image needs a matching --mask");

    const TrainingSet data = stage(kDataError, [&] {
        if (!a.data.empty())
            return io::read_training_csv(fs::path(a.data), space);
        TrainingSet all;
        all.space = space;
        for (std::size_t i = 0; i < a.images.size(); ++i) {
            const auto part = io::training_from_image_mask(io::read_ppm(fs::path(a.images[i])),
                                                           io::read_mask_image(a.masks[i]), space);
            all.samples.insert(all.samples.end(), part.samples.begin(), part.samples.end());
        }
        return all;
    });
    const BayesClassifier clf = stage(kDataError, [&] {
        auto fitted = a.structure == "tan" ? fit_tan(data, disc, a.alpha) : fit_naive_bayes(data, disc, a.alpha);
        return fitted.with_threshold(a.threshold);
    });
    stage(kDataError, [&] { io::save_model(clf, a.out); });

    const auto counts = clf.cpt().class_counts();
    out << "samples " << data.samples.size() << " skin " << counts[0] << " nonskin " << counts[1] << '\n';
    out << "prior_skin " << fixed(clf.cpt().prior(SkinClass::Skin)) << " prior_nonskin "
        << fixed(clf.cpt().prior(SkinClass::NonSkin)) << '\n';
    out << "structure " << to_string(clf.structure().kind()) << " edges " << clf.structure().edges().size() << '\n';
    return kOk;
}

DetectorPipeline load_pipeline_checked(const std::string& path)
{
    return stage(kModelError, [&] { return io::load_pipeline(path); });
}

std::optional<ClassificationLut> resolve_lut(const DetectorPipeline& p, const std::string& lut_path, bool build,
                                              unsigned threads)
{
    if (!lut_path.empty()) {
        auto lut = stage(kModelError, [&] { return io::read_lut(fs::path(lut_path)); });
        if (lut.pipeline_hash() != p.hash())
            throw Failure{kModelError, "HashMismatch: lookup table " + lut_path + " was built for pipeline " +
                                           format_hash(lut.pipeline_hash()) + ", not " + format_hash(p.hash())};
        return lut;
    }
    if (build)
        return build_lut(p, threads);
    return std::nullopt;
}

struct MakePipelineArgs {
    std::string rgb;
    std::string ycbcr;
    std::optional<double> rgb_threshold;
    std::optional<double> ycbcr_threshold;
    std::string out;
};

int do_make_pipeline(const MakePipelineArgs& a, std::ostream& out)
{
    for (const auto& t : {a.rgb_threshold, a.ycbcr_threshold})
        check_flag(!t || (*t > 0.0 && *t < 1.0), "thresholds must lie in (0, 1)");
    auto rgb = stage(kModelError, [&] { return io::load_model(a.rgb); });
    auto ycbcr = stage(kModelError, [&] { return io::load_model(a.ycbcr); });
    if (a.rgb_threshold)
        rgb = rgb.with_threshold(*a.rgb_threshold);
    if (a.ycbcr_threshold)
        ycbcr = ycbcr.with_threshold(*a.ycbcr_threshold);
    const DetectorPipeline p = stage(kModelError, [&] { return DetectorPipeline(std::move(rgb), std::move(ycbcr)); });
    stage(kDataError, [&] { io::save_pipeline(p, a.out); });
    out << "pipeline " << format_hash(p.hash()) << '\n';
    return kOk;
}

struct ClassifyArgs {
    std::string pipeline;
    std::string in;
    std::string out_mask;
    std::string lut;
    bool use_lut = false;
    bool print_fraction = false;
    unsigned threads = 1;
};

int do_classify_frame(const ClassifyArgs& a, std::ostream& out)
{
    const DetectorPipeline p = load_pipeline_checked(a.pipeline);
    const Frame frame = stage(kDataError, [&] { return io::read_ppm(fs::path(a.in)); });
    const unsigned threads = resolve_threads(a.threads);
    const auto lut = resolve_lut(p, a.lut, a.use_lut, threads);
    const SkinMask mask = lut ? detect_frame_lut(*lut, frame, p.hash()) : p.detect_frame(frame, threads);
    stage(kDataError, [&] { io::write_mask(mask, fs::path(a.out_mask)); });
    if (a.print_fraction)
        out << fixed(skin_fraction(mask)) << '\n';
    return kOk;
}

struct CategorizeArgs {
    std::string pipeline;
    std::string frames;
    double rule_low = 3.0;
    double rule_high = 15.0;
    std::string report;
    std::string series;
    std::string id;
    std::string aggregation = "frame-mean";
    std::string lut;
    bool use_lut = false;
    unsigned threads = 1;
};

std::string default_video_id(const std::string& source)
{
    if (source == "-")
        return "stdin";
    fs::path p(source);
    while (!p.empty() && p.filename().empty())
        p = p.parent_path();
    const std::string stem = p.stem().string();
    return stem.empty() ? "video" : stem;
}

int do_categorize(const CategorizeArgs& a, std::ostream& out)
{
    CategorizeOptions opts;
    opts.rule = {a.rule_low, a.rule_high};
    stage(kUsage, [&] { opts.rule.validate(); });
    opts.aggregation = a.aggregation == "pixel-pooled" ? Aggregation::PixelPooled : Aggregation::FrameMean;
    opts.threads = resolve_threads(a.threads);

    const DetectorPipeline p = load_pipeline_checked(a.pipeline);
    const auto frames = stage(kDataError, [&] { return io::read_frames(a.frames); });
    const auto lut = resolve_lut(p, a.lut, a.use_lut, opts.threads);
    opts.lut = lut ? &*lut : nullptr;
    const std::string id = a.id.empty() ? default_video_id(a.frames) : a.id;
    const VideoReport report = stage(kDataError, [&] { return categorize_video(p, frames, opts, id); });
    stage(kDataError, [&] {
        if (!a.report.empty())
            io::write_report(report, a.report);
        if (!a.series.empty())
            io::write_series_csv(report.series, fs::path(a.series));
    });
    out << report.video_id << ' ' << fixed(report.skin_percent) << ' ' << to_string(report.category) << '\n';
    return kOk;
}

int do_evaluate(const std::string& predictions, std::ostream& out)
{
    const auto rows = stage(kDataError, [&] { return io::read_predictions_csv(fs::path(predictions)); });
    std::vector<std::pair<VideoCategory, VideoCategory>> pairs;
    pairs.reserve(rows.size());
    for (const auto& r : rows)
        pairs.emplace_back(r.predicted, r.truth);
    const EvaluationSummary s = stage(kDataError, [&] { return evaluate(pairs); });

    out << "truth/pred";
    for (VideoCategory c : kCategories)
        out << ' ' << to_string(c);
    out << '\n';
    for (VideoCategory t : kCategories) {
        out << to_string(t);
        for (VideoCategory p : kCategories)
            out << ' ' << s.confusion[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
        out << '\n';
    }
    out << "correct " << s.correct << " total " << s.total << '\n';
    out << "accuracy " << fixed(s.accuracy()) << '\n';
    return kOk;
}

void describe_model(const BayesClassifier& clf, const std::string& prefix, std::ostream& out)
{
    const auto& cpt = clf.cpt();
    out << prefix << "colorspace " << to_string(clf.colorspace()) << '\n';
    out << prefix << "structure " << to_string(clf.structure().kind()) << '\n';
    out << prefix << "attribute_edges " << clf.structure().edges().size() << '\n';
    for (const auto& e : clf.structure().edges())
        out << prefix << "edge " << e.parent << ' ' << e.child << '\n';
    out << prefix << "bins " << clf.discretizer().bins() << '\n';
    out << prefix << "alpha " << fixed(cpt.alpha()) << '\n';
    out << prefix << "threshold " << fixed(clf.threshold()) << '\n';
    out << prefix << "samples_skin " << cpt.class_counts()[0] << '\n';
    out << prefix << "samples_nonskin " << cpt.class_counts()[1] << '\n';
    out << prefix << "prior_skin " << fixed(cpt.prior(SkinClass::Skin)) << '\n';
    out << prefix << "prior_nonskin " << fixed(cpt.prior(SkinClass::NonSkin)) << '\n';
}

int do_inspect(const std::string& path, std::ostream& out)
{
    const std::string text = stage(kModelError, [&] {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    });
    const bool is_pipeline = [&] {
        const auto j = nlohmann::json::parse(text, nullptr, false);
        return !j.is_discarded() && j.is_object() && j.value("format", "") == "skinvid-pipeline";
    }();
    if (is_pipeline) {
        const auto p = stage(kModelError, [&] { return io::parse_pipeline(text); });
        out << "pipeline " << format_hash(p.hash()) << '\n';
        describe_model(p.rgb(), "rgb.", out);
        describe_model(p.ycbcr(), "ycbcr.", out);
    } else {
        const auto clf = stage(kModelError, [&] { return io::parse_model(text); });
        describe_model(clf, "", out);
    }
    return kOk;
}

int do_export_lut(const std::string& pipeline, const std::string& out_path, unsigned threads, std::ostream& out)
{
    const DetectorPipeline p = load_pipeline_checked(pipeline);
    const ClassificationLut lut = build_lut(p, resolve_threads(threads));
    stage(kDataError, [&] { io::write_lut(lut, fs::path(out_path)); });
    out << "lut " << format_hash(lut.pipeline_hash()) << " skin_entries " << lut.skin_entries() << '\n';
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Skin-color video categorization"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Fit a skin classifier on labelled pixels");
    train_cmd->add_option("--data", train.data, "CSV of r,g,b,label rows");
    train_cmd->add_option("--image", train.images, "Training image (P6), paired with --mask");
    train_cmd->add_option("--mask", train.masks, "Mask image; value 0 marks skin");
    train_cmd->add_option("--space", train.space, "Color space of the classifier")
        ->required()
        ->check(CLI::IsMember({"rgb", "ycbcr"}));
    train_cmd->add_option("--structure", train.structure, "nb or tan")->check(CLI::IsMember({"nb", "tan"}));
    train_cmd->add_option("--bins", train.bins, "Bins per channel (power of two, 2-256)");
    train_cmd->add_option("--alpha", train.alpha, "Laplace smoothing");
    train_cmd->add_option("--threshold", train.threshold, "Skin decision threshold on the posterior");
    train_cmd->add_option("--out", train.out, "Model file to write")->required();

    MakePipelineArgs make;
    auto* make_cmd = app.add_subcommand("make-pipeline", "Combine an RGB and a YCbCr model");
    make_cmd->add_option("--rgb", make.rgb, "RGB model")->required();
    make_cmd->add_option("--ycbcr", make.ycbcr, "YCbCr model")->required();
    make_cmd->add_option("--rgb-threshold", make.rgb_threshold, "Override the RGB stage threshold");
    make_cmd->add_option("--ycbcr-threshold", make.ycbcr_threshold, "Override the YCbCr stage threshold");
    make_cmd->add_option("--out", make.out, "Pipeline file to write")->required();

    ClassifyArgs classify;
    auto* classify_cmd = app.add_subcommand("classify-frame", "Write the skin mask of one frame");
    classify_cmd->add_option("--pipeline", classify.pipeline)->required();
    classify_cmd->add_option("--in", classify.in, "Input frame (P6)")->required();
    classify_cmd->add_option("--out-mask", classify.out_mask, "Mask output (P5, skin is black)")->required();
    classify_cmd->add_flag("--print-fraction", classify.print_fraction);
    classify_cmd->add_option("--lut", classify.lut, "Precomputed lookup table");
    classify_cmd->add_flag("--use-lut", classify.use_lut, "Build a lookup table before classifying");
    classify_cmd->add_option("--threads", classify.threads, "Worker threads (0 = all cores)");

    CategorizeArgs cat;
    auto* cat_cmd = app.add_subcommand("categorize", "Categorize a video as LSKIN, PSKIN or NSKIN");
    cat_cmd->add_option("--pipeline", cat.pipeline)->required();
    cat_cmd->add_option("--frames", cat.frames, "Directory of .ppm frames, SKV1 file, or - for stdin")->required();
    cat_cmd->add_option("--rule-low", cat.rule_low, "NSKIN/PSKIN boundary in percent");
    cat_cmd->add_option("--rule-high", cat.rule_high, "PSKIN/LSKIN boundary in percent");
    cat_cmd->add_option("--report", cat.report, "JSON report output");
    cat_cmd->add_option("--series", cat.series, "CSV per-frame skin fractions");
    cat_cmd->add_option("--id", cat.id, "Video identifier (default: source name)");
    cat_cmd->add_option("--aggregation", cat.aggregation)->check(CLI::IsMember({"frame-mean", "pixel-pooled"}));
    cat_cmd->add_option("--lut", cat.lut, "Precomputed lookup table");
    cat_cmd->add_flag("--use-lut", cat.use_lut, "Build a lookup table before classifying");
    cat_cmd->add_option("--threads", cat.threads, "Worker threads (0 = all cores)");

    std::string predictions;
    auto* eval_cmd = app.add_subcommand("evaluate", "Confusion matrix and accuracy of predictions");
    eval_cmd->add_option("--predictions", predictions, "CSV of id,pred,truth")->required();

    std::string model;
    auto* inspect_cmd = app.add_subcommand("inspect-model", "Describe a model or pipeline file");
    inspect_cmd->add_option("--model", model)->required();

    std::string lut_pipeline;
    std::string lut_out;
    unsigned lut_threads = 0;
    auto* lut_cmd = app.add_subcommand("export-lut", "Write the 2^24-entry decision table of a pipeline");
    lut_cmd->add_option("--pipeline", lut_pipeline)->required();
    lut_cmd->add_option("--out", lut_out)->required();
    lut_cmd->add_option("--threads", lut_threads, "Worker threads (0 = all cores)");

    std::vector<std::string> argv_storage{"skinvid"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_storage)
        argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << e.what() << '\n';
            return kOk;
        }
        err << "error: " << e.what() << '\n';
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
            err << sub->help();
        return kUsage;
    }

    try {
        if (*train_cmd)
            return do_train(train, out);
        if (*make_cmd)
            return do_make_pipeline(make, out);
        if (*classify_cmd)
            return do_classify_frame(classify, out);
        if (*cat_cmd)
            return do_categorize(cat, out);
        if (*eval_cmd)
            return do_evaluate(predictions, out);
        if (*inspect_cmd)
            return do_inspect(model, out);
        if (*lut_cmd)
            return do_export_lut(lut_pipeline, lut_out, lut_threads, out);
    } catch (const Failure& f) {
        err << "error: " << f.message << '\n';
        return f.code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

} // namespace skinvid::cli
