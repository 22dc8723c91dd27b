#include "skinvid/io_formats.hpp"

#include "skinvid/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace skinvid::io {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kModelFormat = "skinvid-model";
constexpr std::string_view kPipelineFormat = "skinvid-pipeline";
constexpr std::string_view kReportFormat = "skinvid-report";
constexpr std::string_view kRgbTransform = "identity";

std::ifstream open_in(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const fs::path& path)
{
    out.flush();
    if (!out)
        throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

std::string slurp(const fs::path& path)
{
    auto in = open_in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, const std::string& text)
{
    auto out = open_out(path);
    out << text;
    finish(out, path);
}

template <typename Json>
Json parse_json(const std::string& text, std::string_view what)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::CorruptFile, std::string(what) + " is not valid JSON: " + e.what());
    }
}

void check_header(const nlohmann::json& j, std::string_view format, int version)
{
    if (!j.is_object() || !j.contains("format") || j["format"] != format)
        throw Error(ErrorCode::CorruptFile, "not a " + std::string(format) + " file");
    if (!j.contains("version") || !j["version"].is_number_integer())
        throw Error(ErrorCode::CorruptFile, std::string(format) + " file has no version");
    const int v = j["version"].get<int>();
    if (v != version)
        throw Error(ErrorCode::VersionMismatch, std::string(format) + " version " + std::to_string(v) +
                                                    " is not supported (expected " + std::to_string(version) + ")");
}

ordered_json model_json(const BayesClassifier& clf)
{
    const Cpt& cpt = clf.cpt();
    const unsigned b = clf.discretizer().bins();
    ordered_json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["colorspace"] = to_string(clf.colorspace());
    j["transform"] = clf.colorspace() == ColorSpace::YCbCr ? kYCbCrTransformId : kRgbTransform;
    j["bins"] = b;
    j["alpha"] = cpt.alpha();
    j["threshold"] = clf.threshold();
    ordered_json structure;
    structure["kind"] = to_string(clf.structure().kind());
    structure["edges"] = ordered_json::array();
    for (const auto& e : clf.structure().edges())
        structure["edges"].push_back({e.parent, e.child});
    j["structure"] = structure;
    j["class_counts"] = {{"skin", cpt.class_counts()[0]}, {"nonskin", cpt.class_counts()[1]}};
    ordered_json nodes = ordered_json::array();
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        ordered_json node;
        node["attribute"] = a;
        const auto parent = clf.structure().parent(a);
        node["parent"] = parent ? ordered_json(*parent) : ordered_json(nullptr);
        // counts[class][parent state] -> B counts
        ordered_json per_class = ordered_json::array();
        const auto counts = cpt.attribute_counts(a);
        const unsigned states = cpt.parent_states(a);
        for (std::size_t c = 0; c < kClassCount; ++c) {
            ordered_json rows = ordered_json::array();
            for (unsigned p = 0; p < states; ++p) {
                const auto row = counts.subspan((c * states + p) * b, b);
                rows.push_back(ordered_json(std::vector<std::uint64_t>(row.begin(), row.end())));
            }
            per_class.push_back(std::move(rows));
        }
        node["counts"] = std::move(per_class);
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    return j;
}

BayesClassifier model_from_json(const nlohmann::json& j)
{
    check_header(j, kModelFormat, kModelVersion);
    try {
        const ColorSpace space = parse_colorspace(j.at("colorspace").get<std::string>());
        const std::string transform = j.at("transform").get<std::string>();
        const std::string_view expected = space == ColorSpace::YCbCr ? kYCbCrTransformId : kRgbTransform;
        if (transform != expected)
            throw Error(ErrorCode::CorruptFile, "model was trained with transform '" + transform + "'");

        const auto b = j.at("bins").get<unsigned>();
        Discretizer disc = [&] {
            try {
                return Discretizer(b);
            } catch (const Error& e) {
                throw Error(ErrorCode::CorruptFile, e.what());
            }
        }();

        const auto& st = j.at("structure");
        const std::string kind = st.at("kind").get<std::string>();
        std::vector<AttributeEdge> edges;
        for (const auto& e : st.at("edges")) {
            if (!e.is_array() || e.size() != 2)
                throw Error(ErrorCode::CorruptFile, "malformed attribute edge");
            edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
        }
        NetworkStructure structure = [&] {
            if (kind == to_string(StructureKind::NaiveBayes)) {
                if (!edges.empty())
                    throw Error(ErrorCode::CorruptFile, "naive Bayes structure cannot have attribute edges");
                return NetworkStructure::naive_bayes();
            }
            if (kind == to_string(StructureKind::Tan))
                return NetworkStructure::tan(edges);
            throw Error(ErrorCode::CorruptFile, "unknown structure kind '" + kind + "'");
        }();

        const std::array<std::uint64_t, kClassCount> class_counts{
            j.at("class_counts").at("skin").get<std::uint64_t>(),
            j.at("class_counts").at("nonskin").get<std::uint64_t>()};

        const auto& nodes = j.at("nodes");
        if (!nodes.is_array() || nodes.size() != kAttributeCount)
            throw Error(ErrorCode::CorruptFile, "model must describe exactly three attribute nodes");
        std::array<std::vector<std::uint64_t>, kAttributeCount> counts;
        std::array<unsigned, kAttributeCount> states{};
        for (std::size_t a = 0; a < kAttributeCount; ++a) {
            const auto& node = nodes[a];
            if (node.at("attribute").get<std::size_t>() != a)
                throw Error(ErrorCode::CorruptFile, "attribute nodes out of order");
            const auto parent = structure.parent(a);
            const bool stored_parent = !node.at("parent").is_null();
            if (stored_parent != parent.has_value() ||
                (parent && node.at("parent").get<std::size_t>() != *parent))
                throw Error(ErrorCode::CorruptFile, "node parent disagrees with the structure");
            states[a] = parent ? b : 1;
            const auto& per_class = node.at("counts");
            if (!per_class.is_array() || per_class.size() != kClassCount)
                throw Error(ErrorCode::CorruptFile, "count table has the wrong shape");
            for (const auto& rows : per_class) {
                if (!rows.is_array() || rows.size() != states[a])
                    throw Error(ErrorCode::CorruptFile, "count table has the wrong shape");
                for (const auto& row : rows) {
                    if (!row.is_array() || row.size() != b)
                        throw Error(ErrorCode::CorruptFile, "count table has the wrong shape");
                    for (const auto& v : row)
                        counts[a].push_back(v.get<std::uint64_t>());
                }
            }
        }
        const double alpha = j.at("alpha").get<double>();
        const double threshold = j.at("threshold").get<double>();
        Cpt cpt(alpha, b, class_counts, std::move(counts), states);
        return BayesClassifier(space, disc, std::move(structure), std::move(cpt), threshold);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::CorruptFile, std::string("malformed model: ") + e.what());
    }
}

// Whitespace and '#' comments between netpbm header tokens.
void skip_netpbm_space(std::istream& in)
{
    for (;;) {
        const int c = in.peek();
        if (c == '#') {
            std::string ignored;
            std::getline(in, ignored);
        } else if (c != EOF && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

std::size_t read_netpbm_number(std::istream& in, std::string_view what)
{
    skip_netpbm_space(in);
    std::string digits;
    while (std::isdigit(in.peek()))
        digits.push_back(static_cast<char>(in.get()));
    if (digits.empty() || digits.size() > 9)
        throw Error(ErrorCode::BadHeader, "netpbm header has a bad " + std::string(what));
    return std::stoul(digits);
}

struct NetpbmHeader {
    std::size_t width = 0;
    std::size_t height = 0;
};

NetpbmHeader read_netpbm_header(std::istream& in, char kind)
{
    char magic[2] = {};
    if (!in.read(magic, 2) || magic[0] != 'P' || magic[1] != kind)
        throw Error(ErrorCode::BadHeader, std::string("expected a binary P") + kind + " image");
    NetpbmHeader h;
    h.width = read_netpbm_number(in, "width");
    h.height = read_netpbm_number(in, "height");
    const std::size_t maxval = read_netpbm_number(in, "maxval");
    if (h.width == 0 || h.height == 0)
        throw Error(ErrorCode::BadHeader, "netpbm image has zero size");
    if (maxval != 255)
        throw Error(ErrorCode::BadHeader, "only maxval 255 is supported, got " + std::to_string(maxval));
    if (!std::isspace(in.get()))
        throw Error(ErrorCode::BadHeader, "netpbm header must end with a single whitespace");
    return h;
}

void read_exact(std::istream& in, void* dst, std::size_t n, std::string_view what)
{
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw Error(ErrorCode::TruncatedStream, std::string(what) + " ended early");
}

std::vector<RgbPixel> read_rgb24(std::istream& in, std::size_t count, std::string_view what)
{
    std::vector<std::uint8_t> raw(count * 3);
    read_exact(in, raw.data(), raw.size(), what);
    std::vector<RgbPixel> px(count);
    for (std::size_t i = 0; i < count; ++i)
        px[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
    return px;
}

void write_rgb24(std::span<const RgbPixel> pixels, std::ostream& out)
{
    std::vector<char> raw(pixels.size() * 3);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        raw[3 * i] = static_cast<char>(pixels[i].r);
        raw[3 * i + 1] = static_cast<char>(pixels[i].g);
        raw[3 * i + 2] = static_cast<char>(pixels[i].b);
    }
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
        fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

bool parse_channel(const std::string& s, std::uint8_t& out)
{
    unsigned v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v > 255)
        return false;
    out = static_cast<std::uint8_t>(v);
    return true;
}

SkinClass parse_label(const std::string& s, std::size_t line_no)
{
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "skin" || lower == "1")
        return SkinClass::Skin;
    if (lower == "nonskin" || lower == "non-skin" || lower == "0")
        return SkinClass::NonSkin;
    throw Error(ErrorCode::CorruptFile, "line " + std::to_string(line_no) + ": unknown label '" + s + "'");
}

Triplet to_space(RgbPixel p, ColorSpace space)
{
    return space == ColorSpace::YCbCr ? rgb_to_ycbcr(p).triplet() : p.triplet();
}

} // namespace

std::string format_fixed(double value, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

std::string serialize_model(const BayesClassifier& clf)
{
    return model_json(clf).dump(2) + "\n";
}

BayesClassifier parse_model(const std::string& text)
{
    return model_from_json(parse_json<nlohmann::json>(text, "model file"));
}

void save_model(const BayesClassifier& clf, const fs::path& path)
{
    write_text(path, serialize_model(clf));
}

BayesClassifier load_model(const fs::path& path)
{
    return parse_model(slurp(path));
}

std::string serialize_pipeline(const DetectorPipeline& p)
{
    ordered_json j;
    j["format"] = kPipelineFormat;
    j["version"] = kPipelineVersion;
    j["hash"] = format_hash(p.hash());
    j["rgb"] = model_json(p.rgb());
    j["ycbcr"] = model_json(p.ycbcr());
    return j.dump(2) + "\n";
}

DetectorPipeline parse_pipeline(const std::string& text)
{
    const auto j = parse_json<nlohmann::json>(text, "pipeline file");
    check_header(j, kPipelineFormat, kPipelineVersion);
    if (!j.contains("rgb") || !j.contains("ycbcr") || !j.contains("hash") || !j["hash"].is_string())
        throw Error(ErrorCode::CorruptFile, "pipeline file is missing a stage or its hash");
    DetectorPipeline p(model_from_json(j["rgb"]), model_from_json(j["ycbcr"]));
    const std::uint64_t stored = parse_hash(j["hash"].get<std::string>());
    if (stored != p.hash())
        throw Error(ErrorCode::HashMismatch, "pipeline hash " + format_hash(stored) + " does not match its models (" +
                                                 format_hash(p.hash()) + ")");
    return p;
}

void save_pipeline(const DetectorPipeline& p, const fs::path& path)
{
    write_text(path, serialize_pipeline(p));
}

DetectorPipeline load_pipeline(const fs::path& path)
{
    return parse_pipeline(slurp(path));
}

Frame read_ppm(std::istream& in)
{
    const auto h = read_netpbm_header(in, '6');
    return Frame(h.width, h.height, read_rgb24(in, h.width * h.height, "PPM pixel data"));
}

Frame read_ppm(const fs::path& path)
{
    auto in = open_in(path);
    return read_ppm(in);
}

void write_ppm(const Frame& f, std::ostream& out)
{
    out << "P6\n" << f.width() << ' ' << f.height() << "\n255\n";
    write_rgb24(f.pixels(), out);
}

void write_ppm(const Frame& f, const fs::path& path)
{
    auto out = open_out(path);
    write_ppm(f, out);
    finish(out, path);
}

GrayImage read_pgm(std::istream& in)
{
    const auto h = read_netpbm_header(in, '5');
    std::vector<std::uint8_t> px(h.width * h.height);
    read_exact(in, px.data(), px.size(), "PGM pixel data");
    return GrayImage(h.width, h.height, std::move(px));
}

GrayImage read_pgm(const fs::path& path)
{
    auto in = open_in(path);
    return read_pgm(in);
}

void write_pgm(const GrayImage& img, std::ostream& out)
{
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels().data()), static_cast<std::streamsize>(img.size()));
}

void write_mask(const SkinMask& mask, std::ostream& out)
{
    std::vector<std::uint8_t> px(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        px[i] = mask[i] ? 0 : 255;
    write_pgm(GrayImage(mask.width(), mask.height(), std::move(px)), out);
}

void write_mask(const SkinMask& mask, const fs::path& path)
{
    auto out = open_out(path);
    write_mask(mask, out);
    finish(out, path);
}

std::vector<Frame> read_skv1(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::BadHeader, "missing SKV1 header");
    std::istringstream header(line);
    std::string magic;
    long long width = 0, height = 0, count = 0;
    std::string extra;
    if (!(header >> magic >> width >> height >> count) || magic != "SKV1" || (header >> extra))
        throw Error(ErrorCode::BadHeader, "expected 'SKV1 <width> <height> <nframes>', got '" + line + "'");
    if (width <= 0 || height <= 0 || count < 0)
        throw Error(ErrorCode::BadHeader, "SKV1 header has a non-positive dimension");
    std::vector<Frame> frames;
    frames.reserve(static_cast<std::size_t>(count));
    const auto w = static_cast<std::size_t>(width);
    const auto h = static_cast<std::size_t>(height);
    for (long long i = 0; i < count; ++i) {
        try {
            frames.emplace_back(w, h, read_rgb24(in, w * h, "SKV1 stream"));
        } catch (const Error&) {
            throw Error(ErrorCode::TruncatedStream, "SKV1 header declares " + std::to_string(count) +
                                                        " frames but only " + std::to_string(i) + " are present");
        }
    }
    return frames;
}

void write_skv1(std::span<const Frame> frames, std::ostream& out)
{
    if (frames.empty())
        throw Error(ErrorCode::EmptyVideo, "SKV1 needs at least one frame to fix its dimensions");
    const auto w = frames.front().width();
    const auto h = frames.front().height();
    out << "SKV1 " << w << ' ' << h << ' ' << frames.size() << '\n';
    for (const Frame& f : frames) {
        if (f.width() != w || f.height() != h)
            throw Error(ErrorCode::DimensionMismatch, "all SKV1 frames must share dimensions");
        write_rgb24(f.pixels(), out);
    }
}

std::vector<Frame> read_frames(const fs::path& source)
{
    std::vector<Frame> frames;
    if (source == "-") {
        frames = read_skv1(std::cin);
    } else if (fs::is_directory(source)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(source)) {
            if (!entry.is_regular_file())
                continue;
            std::string ext = entry.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (ext == ".ppm")
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end(),
                  [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
        for (const auto& f : files) {
            frames.push_back(read_ppm(f));
            if (frames.back().width() != frames.front().width() || frames.back().height() != frames.front().height())
                throw Error(ErrorCode::DimensionMismatch, "'" + f.filename().string() +
                                                              "' differs in size from the first frame");
        }
    } else {
        auto in = open_in(source);
        frames = read_skv1(in);
    }
    return frames;
}

TrainingSet read_training_csv(std::istream& in, ColorSpace space)
{
    TrainingSet set;
    set.space = space;
    std::string line;
    std::size_t line_no = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto fields = split_csv(t);
        if (fields.size() != 4)
            throw Error(ErrorCode::CorruptFile, "line " + std::to_string(line_no) + ": expected r,g,b,label");
        RgbPixel p;
        const bool numeric = parse_channel(fields[0], p.r) && parse_channel(fields[1], p.g) &&
                             parse_channel(fields[2], p.b);
        if (!numeric) {
            bool looks_like_header = first_row && !fields[0].empty() && std::isalpha(static_cast<unsigned char>(fields[0][0]));
            first_row = false;
            if (looks_like_header)
                continue;
            throw Error(ErrorCode::CorruptFile, "line " + std::to_string(line_no) + ": channel values must be 0-255");
        }
        first_row = false;
        set.samples.push_back({to_space(p, space), parse_label(fields[3], line_no)});
    }
    return set;
}

TrainingSet read_training_csv(const fs::path& path, ColorSpace space)
{
    auto in = open_in(path);
    return read_training_csv(in, space);
}

TrainingSet training_from_image_mask(const Frame& image, const GrayImage& mask, ColorSpace space)
{
    if (image.width() != mask.width() || image.height() != mask.height())
        throw Error(ErrorCode::DimensionMismatch, "training image and mask differ in size");
    TrainingSet set;
    set.space = space;
    set.samples.reserve(image.size());
    for (std::size_t i = 0; i < image.size(); ++i)
        set.samples.push_back({to_space(image[i], space), mask[i] == 0 ? SkinClass::Skin : SkinClass::NonSkin});
    return set;
}

GrayImage read_mask_image(const fs::path& path)
{
    auto in = open_in(path);
    char magic[2] = {};
    in.read(magic, 2);
    in.seekg(0);
    if (magic[0] == 'P' && magic[1] == '5')
        return read_pgm(in);
    const Frame f = read_ppm(in);
    std::vector<std::uint8_t> gray(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        gray[i] = (f[i].r == 0 && f[i].g == 0 && f[i].b == 0) ? 0 : 255;
    return GrayImage(f.width(), f.height(), std::move(gray));
}

std::string serialize_report(const VideoReport& report)
{
    // Written by hand so fractions keep a fixed six-digit format.
    auto str = [](std::string_view s) { return nlohmann::json(s).dump(); };
    auto num = [](double v) { return nlohmann::json(v).dump(); };
    std::ostringstream out;
    out << "{\n";
    out << "  \"format\": " << str(kReportFormat) << ",\n";
    out << "  \"version\": " << kReportVersion << ",\n";
    out << "  \"video_id\": " << str(report.video_id) << ",\n";
    out << "  \"pipeline_hash\": " << str(format_hash(report.pipeline_hash)) << ",\n";
    out << "  \"rule\": {\"low\": " << num(report.rule.low) << ", \"high\": " << num(report.rule.high) << "},\n";
    out << "  \"aggregation\": " << str(to_string(report.aggregation)) << ",\n";
    out << "  \"frame_count\": " << report.series.frames.size() << ",\n";
    out << "  \"skin_percent\": " << format_fixed(report.skin_percent) << ",\n";
    out << "  \"category\": " << str(to_string(report.category)) << ",\n";
    out << "  \"frames\": [";
    for (std::size_t i = 0; i < report.series.frames.size(); ++i) {
        const auto& f = report.series.frames[i];
        out << (i == 0 ? "\n" : ",\n") << "    {\"index\": " << i << ", \"skin_pixels\": " << f.skin_pixels
            << ", \"total_pixels\": " << f.total_pixels << ", \"skin_fraction\": " << format_fixed(f.fraction())
            << "}";
    }
    out << (report.series.frames.empty() ? "]\n" : "\n  ]\n");
    out << "}\n";
    return out.str();
}

VideoReport parse_report(const std::string& text)
{
    const auto j = parse_json<nlohmann::json>(text, "report");
    check_header(j, kReportFormat, kReportVersion);
    try {
        SkinTimeSeries series;
        for (const auto& f : j.at("frames")) {
            FrameSkinCount c{f.at("skin_pixels").get<std::uint64_t>(), f.at("total_pixels").get<std::uint64_t>()};
            if (c.total_pixels == 0 || c.skin_pixels > c.total_pixels)
                throw Error(ErrorCode::CorruptFile, "report frame has impossible pixel counts");
            series.frames.push_back(c);
        }
        if (series.frames.size() != j.at("frame_count").get<std::size_t>())
            throw Error(ErrorCode::CorruptFile, "report frame_count disagrees with its frames");
        CategorizeOptions opts;
        opts.rule = {j.at("rule").at("low").get<double>(), j.at("rule").at("high").get<double>()};
        const std::string agg = j.at("aggregation").get<std::string>();
        if (agg == to_string(Aggregation::FrameMean))
            opts.aggregation = Aggregation::FrameMean;
        else if (agg == to_string(Aggregation::PixelPooled))
            opts.aggregation = Aggregation::PixelPooled;
        else
            throw Error(ErrorCode::CorruptFile, "unknown aggregation '" + agg + "'");
        VideoReport r = make_report(j.at("video_id").get<std::string>(), std::move(series), opts,
                                    parse_hash(j.at("pipeline_hash").get<std::string>()));
        if (std::abs(r.skin_percent - j.at("skin_percent").get<double>()) > 5e-7 ||
            parse_category(j.at("category").get<std::string>()) != r.category)
            throw Error(ErrorCode::CorruptFile, "report percentage or category disagrees with its frame counts");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::CorruptFile, std::string("malformed report: ") + e.what());
    }
}

void write_report(const VideoReport& report, const fs::path& path)
{
    write_text(path, serialize_report(report));
}

VideoReport read_report(const fs::path& path)
{
    return parse_report(slurp(path));
}

void write_series_csv(const SkinTimeSeries& series, std::ostream& out)
{
    out << "frame_index,skin_fraction\n";
    for (std::size_t i = 0; i < series.frames.size(); ++i)
        out << i << ',' << format_fixed(series.frames[i].fraction()) << '\n';
}

void write_series_csv(const SkinTimeSeries& series, const fs::path& path)
{
    auto out = open_out(path);
    write_series_csv(series, out);
    finish(out, path);
}

std::vector<PredictionRow> read_predictions_csv(std::istream& in)
{
    std::vector<PredictionRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto fields = split_csv(t);
        if (fields.size() != 3)
            throw Error(ErrorCode::CorruptFile, "line " + std::to_string(line_no) + ": expected id,pred,truth");
        const bool header = first_row && fields[1] == "pred";
        first_row = false;
        if (header)
            continue;
        rows.push_back({fields[0], parse_category(fields[1]), parse_category(fields[2])});
    }
    return rows;
}

std::vector<PredictionRow> read_predictions_csv(const fs::path& path)
{
    auto in = open_in(path);
    return read_predictions_csv(in);
}

void write_lut(const ClassificationLut& lut, std::ostream& out)
{
    out << "SKLUT1 " << format_hash(lut.pipeline_hash()) << '\n';
    out.write(reinterpret_cast<const char*>(lut.bitmap().data()), static_cast<std::streamsize>(lut.bitmap().size()));
}

void write_lut(const ClassificationLut& lut, const fs::path& path)
{
    auto out = open_out(path);
    write_lut(lut, out);
    finish(out, path);
}

ClassificationLut read_lut(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind("SKLUT1 ", 0) != 0)
        throw Error(ErrorCode::BadHeader, "missing SKLUT1 header");
    const std::uint64_t hash = parse_hash(line.substr(7));
    std::vector<std::uint8_t> bitmap(ClassificationLut::kBytes);
    read_exact(in, bitmap.data(), bitmap.size(), "lookup table");
    return ClassificationLut(hash, std::move(bitmap));
}

ClassificationLut read_lut(const fs::path& path)
{
    auto in = open_in(path);
    return read_lut(in);
}

} // namespace skinvid::io
