#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "gitseg/preprocess.hpp"
#include "gitseg/types.hpp"

namespace gitseg {

/// Probability that each organ appears in a slice.
class ClassPresence {
public:
    explicit ClassPresence(PerClass<double> probabilities);

    double operator[](OrganClass c) const noexcept { return probabilities_[index_of(c)]; }
    const PerClass<double>& probabilities() const noexcept { return probabilities_; }

private:
    PerClass<double> probabilities_;
};

/// What a predictor sees: the slice identity plus either one grayscale
/// channel or the three 2.5D channels. Borrows its pixels.
class ModelInput {
public:
    ModelInput(SliceKey key, const NormalizedImage& gray);
    ModelInput(SliceKey key, const Stack25& stack);

    const SliceKey& key() const noexcept { return key_; }
    std::span<const NormalizedImage> channels() const noexcept { return channels_; }
    std::size_t width() const noexcept { return channels_.front().width(); }
    std::size_t height() const noexcept { return channels_.front().height(); }

private:
    SliceKey key_;
    std::span<const NormalizedImage> channels_;
};

/// Seam for the classification and segmentation networks. Implementations
/// may support either role; the default for each throws PredictorError.
/// Methods are const and must be safe to call concurrently.
class Predictor {
public:
    virtual ~Predictor() = default;

    virtual std::string name() const = 0;
    virtual ClassPresence classify(const ModelInput& input) const;
    /// One map per class, each with the input's dimensions.
    virtual PerClass<ProbMap> segment(const ModelInput& input) const;
};

/// Same answer for every slice.
class ConstantStub final : public Predictor {
public:
    ConstantStub(PerClass<double> presence, PerClass<double> probability);

    std::string name() const override { return "constant"; }
    ClassPresence classify(const ModelInput& input) const override;
    PerClass<ProbMap> segment(const ModelInput& input) const override;

private:
    ClassPresence presence_;
    PerClass<double> probability_;
};

/// Replays known masks: presence 1 where the mask is non-empty, probability
/// maps equal to the masks.
class OracleFromTruth final : public Predictor {
public:
    explicit OracleFromTruth(std::map<SliceKey, PerClass<BinaryMask>> truth);

    std::string name() const override { return "oracle"; }
    ClassPresence classify(const ModelInput& input) const override;
    PerClass<ProbMap> segment(const ModelInput& input) const override;

private:
    const PerClass<BinaryMask>& lookup(const SliceKey& key) const;
    std::map<SliceKey, PerClass<BinaryMask>> truth_;
};

/// Segmentation from precomputed maps stored as "{dir}/{slice id}.bin".
class FileBacked final : public Predictor {
public:
    explicit FileBacked(std::filesystem::path directory);

    std::string name() const override { return "file:" + directory_.string(); }
    PerClass<ProbMap> segment(const ModelInput& input) const override;
    std::filesystem::path path_for(const SliceKey& key) const;

private:
    std::filesystem::path directory_;
};

/// Classification from a table of per-slice presence probabilities.
class PresenceTable final : public Predictor {
public:
    explicit PresenceTable(std::map<SliceKey, ClassPresence> table);

    std::string name() const override { return "presence-table"; }
    ClassPresence classify(const ModelInput& input) const override;

private:
    std::map<SliceKey, ClassPresence> table_;
};

inline constexpr double kDefaultGateThreshold = 0.5;
inline constexpr double kDefaultBinarizeThreshold = 0.5;

/// Present iff probability >= threshold; threshold must lie in (0,1).
PerClass<bool> gate(const ClassPresence& presence, double threshold);

/// Per-pixel arithmetic mean of equally shaped maps.
ProbMap combine(std::span<const ProbMap> maps);

/// Set iff value >= threshold; threshold must lie in (0,1).
BinaryMask binarize(const ProbMap& map, double threshold);

/// Gated ensemble for one slice. For each class: blank when the classifier
/// gates it absent, otherwise binarize(mean(pathA(2.5D), pathB(gray))).
/// Predictor failures are rethrown as PredictorError carrying the slice id.
PerClass<BinaryMask> predict_slice(const SliceKey& key, const Stack25& input25, const NormalizedImage& input_gray,
                                   const Predictor& classifier, const Predictor& path_a, const Predictor& path_b,
                                   double gate_threshold = kDefaultGateThreshold,
                                   double binarize_threshold = kDefaultBinarizeThreshold);

// Probability-map file: three little-endian uint32 (width, height, class
// count == 3) followed by class-major, row-major little-endian float32 values.
void write_probmap_file(const std::filesystem::path& path, const PerClass<ProbMap>& maps);
PerClass<ProbMap> read_probmap_file(const std::filesystem::path& path);

}  // namespace gitseg
