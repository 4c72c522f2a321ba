#include "gitseg/ensemble.hpp"

#include <algorithm>
#include <string>

namespace gitseg {

namespace {

void require_open_unit(double threshold, const char* what) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw InvalidArgument(std::string(what) + ": threshold must lie in (0,1)");
    }
}

ProbMap constant_map(std::size_t w, std::size_t h, double value) {
    return ProbMap(w, h, std::vector<double>(w * h, value));
}

ProbMap to_probmap(const BinaryMask& m) {
    std::vector<double> v(m.bits().begin(), m.bits().end());
    return ProbMap(m.width(), m.height(), std::move(v));
}

template <typename F>
auto guarded(const SliceKey& key, const Predictor& p, F&& call) {
    try {
        return call();
    } catch (const IoError& e) {
        throw IoError("slice " + to_id(key) + ": predictor '" + p.name() + "' failed: " + e.what());
    } catch (const std::exception& e) {
        throw PredictorError("slice " + to_id(key) + ": predictor '" + p.name() + "' failed: " + e.what());
    }
}

void require_dims(const PerClass<ProbMap>& maps, const ModelInput& input, const SliceKey& key, const Predictor& p) {
    for (const auto& m : maps) {
        if (m.width() != input.width() || m.height() != input.height()) {
            throw PredictorError("slice " + to_id(key) + ": predictor '" + p.name() + "' returned a " +
                                 std::to_string(m.width()) + "x" + std::to_string(m.height()) + " map for a " +
                                 std::to_string(input.width()) + "x" + std::to_string(input.height()) + " input");
        }
    }
}

}  // namespace

ClassPresence::ClassPresence(PerClass<double> probabilities) : probabilities_(probabilities) {
    for (double p : probabilities_) {
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("ClassPresence: probability outside [0,1]");
    }
}

ModelInput::ModelInput(SliceKey key, const NormalizedImage& gray) : key_(std::move(key)), channels_(&gray, 1) {}

ModelInput::ModelInput(SliceKey key, const Stack25& stack) : key_(std::move(key)), channels_(stack.channels()) {}

ClassPresence Predictor::classify(const ModelInput&) const {
    throw PredictorError("predictor '" + name() + "' does not classify");
}

PerClass<ProbMap> Predictor::segment(const ModelInput&) const {
    throw PredictorError("predictor '" + name() + "' does not segment");
}

ConstantStub::ConstantStub(PerClass<double> presence, PerClass<double> probability)
    : presence_(presence), probability_(probability) {
    ClassPresence check(probability);
    (void)check;
}

ClassPresence ConstantStub::classify(const ModelInput&) const { return presence_; }

PerClass<ProbMap> ConstantStub::segment(const ModelInput& input) const {
    const auto w = input.width();
    const auto h = input.height();
    return {constant_map(w, h, probability_[0]), constant_map(w, h, probability_[1]),
            constant_map(w, h, probability_[2])};
}

OracleFromTruth::OracleFromTruth(std::map<SliceKey, PerClass<BinaryMask>> truth) : truth_(std::move(truth)) {}

const PerClass<BinaryMask>& OracleFromTruth::lookup(const SliceKey& key) const {
    const auto it = truth_.find(key);
    if (it == truth_.end()) throw PredictorError("oracle has no truth for slice " + to_id(key));
    return it->second;
}

ClassPresence OracleFromTruth::classify(const ModelInput& input) const {
    const auto& m = lookup(input.key());
    return ClassPresence({m[0].empty() ? 0.0 : 1.0, m[1].empty() ? 0.0 : 1.0, m[2].empty() ? 0.0 : 1.0});
}

PerClass<ProbMap> OracleFromTruth::segment(const ModelInput& input) const {
    const auto& m = lookup(input.key());
    return {to_probmap(m[0]), to_probmap(m[1]), to_probmap(m[2])};
}

FileBacked::FileBacked(std::filesystem::path directory) : directory_(std::move(directory)) {}

std::filesystem::path FileBacked::path_for(const SliceKey& key) const { return directory_ / (to_id(key) + ".bin"); }

PerClass<ProbMap> FileBacked::segment(const ModelInput& input) const { return read_probmap_file(path_for(input.key())); }

PresenceTable::PresenceTable(std::map<SliceKey, ClassPresence> table) : table_(std::move(table)) {}

ClassPresence PresenceTable::classify(const ModelInput& input) const {
    const auto it = table_.find(input.key());
    if (it == table_.end()) throw PredictorError("no presence entry for slice " + to_id(input.key()));
    return it->second;
}

PerClass<bool> gate(const ClassPresence& presence, double threshold) {
    require_open_unit(threshold, "gate");
    PerClass<bool> out{};
    for (auto c : kOrganClasses) out[index_of(c)] = presence[c] >= threshold;
    return out;
}

ProbMap combine(std::span<const ProbMap> maps) {
    if (maps.empty()) throw InvalidArgument("combine: no maps");
    const auto w = maps.front().width();
    const auto h = maps.front().height();
    std::vector<double> sum(w * h, 0.0);
    for (const auto& m : maps) {
        if (m.width() != w || m.height() != h) throw ShapeMismatch("combine: maps differ in shape");
        const auto v = m.values();
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
    }
    const auto n = static_cast<double>(maps.size());
    for (auto& s : sum) s = std::clamp(s / n, 0.0, 1.0);
    return ProbMap(w, h, std::move(sum));
}

BinaryMask binarize(const ProbMap& map, double threshold) {
    require_open_unit(threshold, "binarize");
    const auto v = map.values();
    std::vector<std::uint8_t> bits(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) bits[i] = v[i] >= threshold ? 1 : 0;
    return BinaryMask(map.width(), map.height(), std::move(bits));
}

PerClass<BinaryMask> predict_slice(const SliceKey& key, const Stack25& input25, const NormalizedImage& input_gray,
                                   const Predictor& classifier, const Predictor& path_a, const Predictor& path_b,
                                   double gate_threshold, double binarize_threshold) {
    require_open_unit(gate_threshold, "predict_slice");
    require_open_unit(binarize_threshold, "predict_slice");
    if (input25.width() != input_gray.width() || input25.height() != input_gray.height()) {
        throw ShapeMismatch("predict_slice: 2.5D and grayscale inputs differ in shape for slice " + to_id(key));
    }
    const auto w = input_gray.width();
    const auto h = input_gray.height();
    const ModelInput gray_in(key, input_gray);
    const ModelInput stack_in(key, input25);

    const auto presence = guarded(key, classifier, [&] { return classifier.classify(gray_in); });
    const auto present = gate(presence, gate_threshold);

    PerClass<BinaryMask> out{blank_mask(w, h), blank_mask(w, h), blank_mask(w, h)};
    if (std::none_of(present.begin(), present.end(), [](bool b) { return b; })) return out;

    const auto maps_a = guarded(key, path_a, [&] { return path_a.segment(stack_in); });
    require_dims(maps_a, stack_in, key, path_a);
    const auto maps_b = guarded(key, path_b, [&] { return path_b.segment(gray_in); });
    require_dims(maps_b, gray_in, key, path_b);

    for (auto c : kOrganClasses) {
        const auto i = index_of(c);
        if (!present[i]) continue;
        const std::array<ProbMap, 2> pair{maps_a[i], maps_b[i]};
        out[i] = binarize(combine(pair), binarize_threshold);
    }
    return out;
}

}  // namespace gitseg
