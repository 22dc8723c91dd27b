#include "skinvid/bayes_classifier.hpp"

#include "skinvid/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace skinvid {

namespace {

constexpr std::size_t idx(SkinClass c) noexcept { return static_cast<std::size_t>(c); }

constexpr std::array<SkinClass, kClassCount> kClasses{SkinClass::Skin, SkinClass::NonSkin};

double log_sum_exp(double a, double b) noexcept
{
    const double m = std::max(a, b);
    if (m == -std::numeric_limits<double>::infinity())
        return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

Posterior normalize(double log_skin, double log_nonskin) noexcept
{
    const double m = std::max(log_skin, log_nonskin);
    const double s = std::exp(log_skin - m);
    const double n = std::exp(log_nonskin - m);
    const double total = s + n;
    return {s / total, n / total};
}

class Fnv1a {
public:
    void bytes(const void* data, std::size_t n) noexcept
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
    }
    void u64(std::uint64_t v) noexcept
    {
        // Fixed little-endian byte order regardless of host.
        unsigned char b[8];
        for (int i = 0; i < 8; ++i)
            b[i] = static_cast<unsigned char>(v >> (8 * i));
        bytes(b, 8);
    }
    void f64(double v) noexcept { u64(std::bit_cast<std::uint64_t>(v)); }
    std::uint64_t value() const noexcept { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

} // namespace

std::array<std::size_t, kClassCount> TrainingSet::class_counts() const noexcept
{
    std::array<std::size_t, kClassCount> counts{};
    for (const auto& s : samples)
        ++counts[idx(s.label)];
    return counts;
}

Discretizer::Discretizer(unsigned bins) : bins_(bins)
{
    if (bins < 2 || bins > 256 || !std::has_single_bit(bins))
        throw Error(ErrorCode::InvalidBins, "bins per channel must be a power of two in [2, 256], got " +
                                                std::to_string(bins));
}

std::string_view to_string(StructureKind kind) noexcept
{
    return kind == StructureKind::NaiveBayes ? "NaiveBayes" : "TAN";
}

NetworkStructure::NetworkStructure(StructureKind kind, std::vector<AttributeEdge> edges)
    : kind_(kind), edges_(std::move(edges))
{
    for (const auto& e : edges_) {
        if (e.parent >= kAttributeCount || e.child >= kAttributeCount || e.parent == e.child)
            throw Error(ErrorCode::CorruptFile, "invalid attribute edge");
        if (parents_[e.child])
            throw Error(ErrorCode::CorruptFile, "attribute has more than one attribute parent");
        parents_[e.child] = e.parent;
        children_[e.parent].push_back(e.child);
    }
    for (auto& c : children_)
        std::sort(c.begin(), c.end());
    // Walk up from each node; with at most one parent each, a cycle shows up
    // as a path longer than the number of attributes.
    for (std::size_t start = 0; start < kAttributeCount; ++start) {
        std::size_t steps = 0;
        for (auto node = parents_[start]; node; node = parents_[*node]) {
            if (++steps > kAttributeCount)
                throw Error(ErrorCode::CorruptFile, "attribute edges contain a cycle");
        }
    }
}

NetworkStructure NetworkStructure::naive_bayes()
{
    return NetworkStructure(StructureKind::NaiveBayes, {});
}

NetworkStructure NetworkStructure::tan(std::vector<AttributeEdge> edges)
{
    if (edges.size() != kAttributeCount - 1)
        throw Error(ErrorCode::CorruptFile, "TAN structure needs exactly " + std::to_string(kAttributeCount - 1) +
                                                " attribute edges");
    return NetworkStructure(StructureKind::Tan, std::move(edges));
}

Cpt::Cpt(double alpha, unsigned bins, std::array<std::uint64_t, kClassCount> class_counts,
         std::array<std::vector<std::uint64_t>, kAttributeCount> attribute_counts,
         std::array<unsigned, kAttributeCount> parent_states)
    : alpha_(alpha),
      bins_(bins),
      class_counts_(class_counts),
      attribute_counts_(std::move(attribute_counts)),
      parent_states_(parent_states)
{
    if (!(alpha_ > 0.0) || !std::isfinite(alpha_))
        throw Error(ErrorCode::InvalidAlpha, "smoothing alpha must be a positive finite number");
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        const std::size_t rows = kClassCount * parent_states_[a];
        if (parent_states_[a] == 0 || attribute_counts_[a].size() != rows * bins_)
            throw Error(ErrorCode::CorruptFile, "count table for attribute " + std::to_string(a) +
                                                    " has the wrong shape");
        auto& totals = row_totals_[a];
        totals.assign(rows, 0);
        for (std::size_t r = 0; r < rows; ++r)
            for (unsigned b = 0; b < bins_; ++b)
                totals[r] += attribute_counts_[a][r * bins_ + b];
        for (std::size_t c = 0; c < kClassCount; ++c) {
            std::uint64_t sum = 0;
            for (unsigned p = 0; p < parent_states_[a]; ++p)
                sum += totals[c * parent_states_[a] + p];
            if (sum != class_counts_[c])
                throw Error(ErrorCode::CorruptFile, "counts for attribute " + std::to_string(a) +
                                                        " disagree with the class counts");
        }
    }
}

std::size_t Cpt::index(std::size_t attribute, SkinClass c, unsigned parent_bin, unsigned bin) const noexcept
{
    return (idx(c) * parent_states_[attribute] + parent_bin) * bins_ + bin;
}

std::uint64_t Cpt::count(std::size_t attribute, SkinClass c, unsigned parent_bin, unsigned bin) const noexcept
{
    return attribute_counts_[attribute][index(attribute, c, parent_bin, bin)];
}

double Cpt::prior(SkinClass c) const noexcept
{
    const double total = static_cast<double>(class_counts_[0] + class_counts_[1]);
    return (static_cast<double>(class_counts_[idx(c)]) + alpha_) / (total + 2.0 * alpha_);
}

double Cpt::conditional(std::size_t attribute, SkinClass c, unsigned parent_bin, unsigned bin) const noexcept
{
    const std::uint64_t row = row_totals_[attribute][idx(c) * parent_states_[attribute] + parent_bin];
    return (static_cast<double>(count(attribute, c, parent_bin, bin)) + alpha_) /
           (static_cast<double>(row) + alpha_ * static_cast<double>(bins_));
}

BayesClassifier::BayesClassifier(ColorSpace space, Discretizer discretizer, NetworkStructure structure, Cpt cpt,
                                 double threshold)
    : space_(space),
      discretizer_(discretizer),
      structure_(std::move(structure)),
      cpt_(std::move(cpt)),
      threshold_(threshold)
{
    if (!(threshold_ > 0.0 && threshold_ < 1.0))
        throw Error(ErrorCode::InvalidThreshold, "decision threshold must lie in (0, 1)");
    if (cpt_.bins() != discretizer_.bins())
        throw Error(ErrorCode::CorruptFile, "count tables and discretizer disagree on the bin count");
    const unsigned b = discretizer_.bins();
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        const unsigned expected = structure_.parent(a) ? b : 1;
        if (cpt_.parent_states(a) != expected)
            throw Error(ErrorCode::CorruptFile, "count tables do not match the network structure");
    }

    for (SkinClass c : kClasses)
        log_prior_[idx(c)] = std::log(cpt_.prior(c));
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        const unsigned states = cpt_.parent_states(a);
        auto& table = log_tables_[a];
        table.resize(kClassCount * states * b);
        for (SkinClass c : kClasses)
            for (unsigned p = 0; p < states; ++p)
                for (unsigned v = 0; v < b; ++v)
                    table[(idx(c) * states + p) * b + v] = std::log(cpt_.conditional(a, c, p, v));
    }
}

BayesClassifier BayesClassifier::with_threshold(double tau) const
{
    return BayesClassifier(space_, discretizer_, structure_, cpt_, tau);
}

BinTriplet BayesClassifier::bins_of(Triplet t) const noexcept
{
    return {discretizer_.bin(t[0]), discretizer_.bin(t[1]), discretizer_.bin(t[2])};
}

Posterior BayesClassifier::posterior_bins(const BinTriplet& bins) const noexcept
{
    std::array<double, kClassCount> joint{};
    for (SkinClass c : kClasses) {
        double l = log_prior_[idx(c)];
        for (std::size_t a = 0; a < kAttributeCount; ++a) {
            const auto parent = structure_.parent(a);
            l += log_conditional(a, c, parent ? bins[*parent] : 0, bins[a]);
        }
        joint[idx(c)] = l;
    }
    return normalize(joint[0], joint[1]);
}

double BayesClassifier::log_message(std::size_t attribute, SkinClass c, unsigned parent_bin,
                                    const Evidence& evidence) const
{
    // log sum_{v} P(A=v | c, parent) * prod_{children} message(child, v),
    // with v pinned when the attribute is observed.
    const auto& children = structure_.children(attribute);
    auto term = [&](unsigned v) {
        double l = log_conditional(attribute, c, parent_bin, v);
        for (std::size_t child : children)
            l += log_message(child, c, v, evidence);
        return l;
    };
    if (evidence[attribute])
        return term(*evidence[attribute]);
    double acc = -std::numeric_limits<double>::infinity();
    for (unsigned v = 0; v < discretizer_.bins(); ++v)
        acc = log_sum_exp(acc, term(v));
    return acc;
}

Posterior BayesClassifier::query(const Evidence& evidence) const
{
    bool full = true;
    for (const auto& e : evidence) {
        if (e && *e >= discretizer_.bins())
            throw Error(ErrorCode::InvalidBin, "evidence bin " + std::to_string(*e) + " is outside [0, " +
                                                   std::to_string(discretizer_.bins()) + ")");
        full = full && e.has_value();
    }
    if (full)
        return posterior_bins({*evidence[0], *evidence[1], *evidence[2]});

    bool any = false;
    std::array<double, kClassCount> joint{};
    for (SkinClass c : kClasses) {
        double l = log_prior_[idx(c)];
        for (std::size_t a = 0; a < kAttributeCount; ++a) {
            if (structure_.parent(a))
                continue;
            // A subtree with no observed node sums to one; skip it so empty
            // evidence returns the prior exactly.
            bool observed = false;
            std::vector<std::size_t> stack{a};
            while (!stack.empty()) {
                const std::size_t n = stack.back();
                stack.pop_back();
                observed = observed || evidence[n].has_value();
                for (std::size_t ch : structure_.children(n))
                    stack.push_back(ch);
            }
            if (!observed)
                continue;
            any = true;
            l += log_message(a, c, 0, evidence);
        }
        joint[idx(c)] = l;
    }
    if (!any)
        return {cpt_.prior(SkinClass::Skin), cpt_.prior(SkinClass::NonSkin)};
    return normalize(joint[0], joint[1]);
}

std::uint64_t BayesClassifier::fingerprint() const noexcept
{
    Fnv1a h;
    h.u64(static_cast<std::uint64_t>(space_));
    h.u64(discretizer_.bins());
    h.u64(static_cast<std::uint64_t>(structure_.kind()));
    for (const auto& e : structure_.edges()) {
        h.u64(e.parent);
        h.u64(e.child);
    }
    h.f64(cpt_.alpha());
    h.f64(threshold_);
    for (auto n : cpt_.class_counts())
        h.u64(n);
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        h.u64(cpt_.parent_states(a));
        for (auto n : cpt_.attribute_counts(a))
            h.u64(n);
    }
    return h.value();
}

void validate_training_set(const TrainingSet& data)
{
    if (data.samples.empty())
        throw Error(ErrorCode::EmptyClass, "training set is empty");
    const auto counts = data.class_counts();
    if (counts[idx(SkinClass::Skin)] == 0)
        throw Error(ErrorCode::EmptyClass, "training set has no skin samples");
    if (counts[idx(SkinClass::NonSkin)] == 0)
        throw Error(ErrorCode::EmptyClass, "training set has no non-skin samples");
}

namespace {

void check_alpha(double alpha)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw Error(ErrorCode::InvalidAlpha, "smoothing alpha must be a positive finite number");
}

BayesClassifier fit_with_structure(const TrainingSet& data, Discretizer bins, double alpha,
                                   NetworkStructure structure)
{
    const unsigned b = bins.bins();
    std::array<std::uint64_t, kClassCount> class_counts{};
    std::array<std::vector<std::uint64_t>, kAttributeCount> counts;
    std::array<unsigned, kAttributeCount> states{};
    for (std::size_t a = 0; a < kAttributeCount; ++a) {
        states[a] = structure.parent(a) ? b : 1;
        counts[a].assign(kClassCount * states[a] * b, 0);
    }
    for (const auto& s : data.samples) {
        const std::size_t c = idx(s.label);
        ++class_counts[c];
        for (std::size_t a = 0; a < kAttributeCount; ++a) {
            const auto parent = structure.parent(a);
            const unsigned p = parent ? bins.bin(s.attributes[*parent]) : 0;
            ++counts[a][(c * states[a] + p) * b + bins.bin(s.attributes[a])];
        }
    }
    Cpt cpt(alpha, b, class_counts, std::move(counts), states);
    return BayesClassifier(data.space, bins, std::move(structure), std::move(cpt));
}

} // namespace

BayesClassifier fit_naive_bayes(const TrainingSet& data, Discretizer bins, double alpha)
{
    check_alpha(alpha);
    validate_training_set(data);
    return fit_with_structure(data, bins, alpha, NetworkStructure::naive_bayes());
}

double conditional_mutual_information(const TrainingSet& data, const Discretizer& bins, std::size_t i,
                                      std::size_t j)
{
    const std::size_t b = bins.bins();
    std::vector<std::uint64_t> joint(kClassCount * b * b, 0);
    std::vector<std::uint64_t> mi(kClassCount * b, 0);
    std::vector<std::uint64_t> mj(kClassCount * b, 0);
    std::array<std::uint64_t, kClassCount> nc{};
    for (const auto& s : data.samples) {
        const std::size_t c = idx(s.label);
        const unsigned x = bins.bin(s.attributes[i]);
        const unsigned y = bins.bin(s.attributes[j]);
        ++joint[(c * b + x) * b + y];
        ++mi[c * b + x];
        ++mj[c * b + y];
        ++nc[c];
    }
    const double total = static_cast<double>(data.samples.size());
    double info = 0.0;
    for (std::size_t c = 0; c < kClassCount; ++c)
        for (std::size_t x = 0; x < b; ++x)
            for (std::size_t y = 0; y < b; ++y) {
                const auto n = joint[(c * b + x) * b + y];
                if (n == 0)
                    continue;
                const double ratio = (static_cast<double>(n) * static_cast<double>(nc[c])) /
                                     (static_cast<double>(mi[c * b + x]) * static_cast<double>(mj[c * b + y]));
                info += static_cast<double>(n) / total * std::log(ratio);
            }
    return info;
}

BayesClassifier fit_tan(const TrainingSet& data, Discretizer bins, double alpha)
{
    check_alpha(alpha);
    validate_training_set(data);

    struct Candidate {
        std::size_t i, j;
        double weight;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < kAttributeCount; ++i)
        for (std::size_t j = i + 1; j < kAttributeCount; ++j)
            candidates.push_back({i, j, conditional_mutual_information(data, bins, i, j)});

    // Kruskal on the maximum weight. Candidates are in lexicographic order, so
    // taking the first edge within rounding of the best weight breaks ties
    // toward the smaller pair.
    std::array<std::size_t, kAttributeCount> component{};
    std::iota(component.begin(), component.end(), 0);
    auto find = [&](std::size_t n) {
        while (component[n] != n)
            n = component[n];
        return n;
    };
    std::vector<std::pair<std::size_t, std::size_t>> tree;
    while (tree.size() + 1 < kAttributeCount) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& cand : candidates)
            if (find(cand.i) != find(cand.j))
                best = std::max(best, cand.weight);
        const double tolerance = 1e-12 * std::max(1.0, std::abs(best));
        auto chosen = std::find_if(candidates.begin(), candidates.end(), [&](const Candidate& cand) {
            return find(cand.i) != find(cand.j) && cand.weight >= best - tolerance;
        });
        tree.emplace_back(chosen->i, chosen->j);
        component[find(chosen->j)] = find(chosen->i);
        candidates.erase(chosen);
    }

    // Orient away from attribute 0.
    std::vector<AttributeEdge> edges;
    std::array<bool, kAttributeCount> visited{};
    std::vector<std::size_t> frontier{0};
    visited[0] = true;
    while (!frontier.empty()) {
        const std::size_t n = frontier.front();
        frontier.erase(frontier.begin());
        for (std::size_t m = 0; m < kAttributeCount; ++m) {
            if (visited[m])
                continue;
            const bool linked = std::any_of(tree.begin(), tree.end(), [&](const auto& e) {
                return (e.first == n && e.second == m) || (e.first == m && e.second == n);
            });
            if (linked) {
                visited[m] = true;
                edges.push_back({n, m});
                frontier.push_back(m);
            }
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const AttributeEdge& a, const AttributeEdge& b) { return a.child < b.child; });
    return fit_with_structure(data, bins, alpha, NetworkStructure::tan(std::move(edges)));
}

} // namespace skinvid
