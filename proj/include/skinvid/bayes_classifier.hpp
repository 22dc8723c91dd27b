#pragma once

#include "skinvid/colorspace.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace skinvid {

inline constexpr std::size_t kAttributeCount = 3;
inline constexpr std::size_t kClassCount = 2;

enum class SkinClass : std::uint8_t { Skin = 0, NonSkin = 1 };

struct PixelSample {
    Triplet attributes{};
    SkinClass label = SkinClass::NonSkin;
};

/// Labelled channel triplets, all expressed in `space`.
struct TrainingSet {
    ColorSpace space = ColorSpace::Rgb;
    std::vector<PixelSample> samples;

    std::array<std::size_t, kClassCount> class_counts() const noexcept;
};

/// Equal-width binning of an 8-bit channel: bin(v) = floor(v * B / 256).
class Discretizer {
public:
    static constexpr unsigned kDefaultBins = 32;

    explicit Discretizer(unsigned bins = kDefaultBins);

    unsigned bins() const noexcept { return bins_; }
    unsigned bin(std::uint8_t v) const noexcept { return (static_cast<unsigned>(v) * bins_) >> 8; }

    friend bool operator==(const Discretizer&, const Discretizer&) = default;

private:
    unsigned bins_;
};

using BinTriplet = std::array<unsigned, kAttributeCount>;

enum class StructureKind : std::uint8_t { NaiveBayes, Tan };

std::string_view to_string(StructureKind kind) noexcept;

struct AttributeEdge {
    std::size_t parent = 0;
    std::size_t child = 0;

    friend bool operator==(const AttributeEdge&, const AttributeEdge&) = default;
};

/// Class node C is a parent of every attribute; `edges` holds only the
/// attribute-to-attribute arcs.
class NetworkStructure {
public:
    static NetworkStructure naive_bayes();
    /// Throws CorruptFile unless the edges form a directed spanning tree.
    static NetworkStructure tan(std::vector<AttributeEdge> edges);

    StructureKind kind() const noexcept { return kind_; }
    const std::vector<AttributeEdge>& edges() const noexcept { return edges_; }
    /// Attribute parent of `attribute`, if any.
    std::optional<std::size_t> parent(std::size_t attribute) const noexcept { return parents_[attribute]; }
    const std::vector<std::size_t>& children(std::size_t attribute) const noexcept { return children_[attribute]; }

    friend bool operator==(const NetworkStructure& a, const NetworkStructure& b)
    {
        return a.kind_ == b.kind_ && a.edges_ == b.edges_;
    }

private:
    NetworkStructure(StructureKind kind, std::vector<AttributeEdge> edges);

    StructureKind kind_;
    std::vector<AttributeEdge> edges_;
    std::array<std::optional<std::size_t>, kAttributeCount> parents_{};
    std::array<std::vector<std::size_t>, kAttributeCount> children_{};
};

/// Raw counts for every node of the network plus the smoothing constant.
/// Probabilities are always derived from the counts, never stored, so two
/// tables with equal counts and alpha produce bit-identical probabilities.
///
/// Counts for attribute i are indexed [class][parent bin][bin]; an attribute
/// without an attribute parent has a single parent state.
class Cpt {
public:
    Cpt(double alpha, unsigned bins, std::array<std::uint64_t, kClassCount> class_counts,
        std::array<std::vector<std::uint64_t>, kAttributeCount> attribute_counts,
        std::array<unsigned, kAttributeCount> parent_states);

    double alpha() const noexcept { return alpha_; }
    unsigned bins() const noexcept { return bins_; }
    unsigned parent_states(std::size_t attribute) const noexcept { return parent_states_[attribute]; }

    const std::array<std::uint64_t, kClassCount>& class_counts() const noexcept { return class_counts_; }
    std::span<const std::uint64_t> attribute_counts(std::size_t attribute) const noexcept
    {
        return attribute_counts_[attribute];
    }
    std::uint64_t count(std::size_t attribute, SkinClass c, unsigned parent_bin, unsigned bin) const noexcept;

    /// (n_c + alpha) / (N + 2 alpha)
    double prior(SkinClass c) const noexcept;
    /// (n(c, parent, bin) + alpha) / (n(c, parent) + alpha * B)
    double conditional(std::size_t attribute, SkinClass c, unsigned parent_bin, unsigned bin) const noexcept;

    friend bool operator==(const Cpt&, const Cpt&) = default;

private:
    std::size_t index(std::size_t attribute, SkinClass c, unsigned parent_bin, unsigned bin) const noexcept;

    double alpha_;
    unsigned bins_;
    std::array<std::uint64_t, kClassCount> class_counts_;
    std::array<std::vector<std::uint64_t>, kAttributeCount> attribute_counts_;
    std::array<unsigned, kAttributeCount> parent_states_;
    // n(c, parent) for each attribute, same layout without the bin axis.
    std::array<std::vector<std::uint64_t>, kAttributeCount> row_totals_;
};

struct Posterior {
    double skin = 0.0;
    double nonskin = 0.0;
};

/// Observed bins for a subset of the attributes.
using Evidence = std::array<std::optional<unsigned>, kAttributeCount>;

class BayesClassifier {
public:
    static constexpr double kDefaultThreshold = 0.5;

    BayesClassifier(ColorSpace space, Discretizer discretizer, NetworkStructure structure, Cpt cpt,
                    double threshold = kDefaultThreshold);

    ColorSpace colorspace() const noexcept { return space_; }
    const Discretizer& discretizer() const noexcept { return discretizer_; }
    const NetworkStructure& structure() const noexcept { return structure_; }
    const Cpt& cpt() const noexcept { return cpt_; }
    double threshold() const noexcept { return threshold_; }

    /// Copy with a different decision threshold; tau must lie in (0, 1).
    BayesClassifier with_threshold(double tau) const;

    BinTriplet bins_of(Triplet t) const noexcept;

    /// P(C | a1, a2, a3) from the factored joint, computed in log space.
    Posterior posterior(Triplet t) const noexcept { return posterior_bins(bins_of(t)); }
    Posterior posterior_bins(const BinTriplet& bins) const noexcept;

    /// p_skin >= threshold.
    bool classify(Triplet t) const noexcept { return posterior(t).skin >= threshold_; }

    /// P(C | evidence) with unobserved attributes summed out. Throws
    /// InvalidBin for an evidence value outside [0, B).
    Posterior query(const Evidence& evidence) const;

    /// Stable 64-bit digest of everything that affects a decision.
    std::uint64_t fingerprint() const noexcept;

private:
    double log_conditional(std::size_t attribute, SkinClass c, unsigned parent_bin,
                           unsigned bin) const noexcept
    {
        const unsigned b = discretizer_.bins();
        return log_tables_[attribute][(static_cast<std::size_t>(c) * cpt_.parent_states(attribute) + parent_bin) * b +
                                      bin];
    }
    double log_message(std::size_t attribute, SkinClass c, unsigned parent_bin, const Evidence& evidence) const;

    ColorSpace space_;
    Discretizer discretizer_;
    NetworkStructure structure_;
    Cpt cpt_;
    double threshold_;
    std::array<double, kClassCount> log_prior_{};
    std::array<std::vector<double>, kAttributeCount> log_tables_;
};

/// Checks the non-empty / both-classes preconditions shared by the fitters.
void validate_training_set(const TrainingSet& data);

BayesClassifier fit_naive_bayes(const TrainingSet& data, Discretizer bins = Discretizer{}, double alpha = 1.0);

/// Tree-augmented naive Bayes: the attribute tree is the maximum-weight
/// spanning tree over I(Ai; Aj | C), rooted at attribute 0. Equal weights are
/// broken by the lexicographically smaller (i, j) pair.
BayesClassifier fit_tan(const TrainingSet& data, Discretizer bins = Discretizer{}, double alpha = 1.0);

/// Empirical I(Ai; Aj | C) in nats over the discretized samples.
double conditional_mutual_information(const TrainingSet& data, const Discretizer& bins, std::size_t i,
                                      std::size_t j);

} // namespace skinvid
