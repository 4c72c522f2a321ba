#include "commands.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gitseg/augment_spec.hpp"
#include "gitseg/dataset.hpp"
#include "gitseg/ensemble.hpp"
#include "gitseg/metrics.hpp"
#include "gitseg/overlay.hpp"
#include "gitseg/parallel.hpp"
#include "gitseg/png_io.hpp"
#include "gitseg/preprocess.hpp"
#include "gitseg/report.hpp"
#include "gitseg/rle.hpp"

namespace gitseg::cli {

namespace {

namespace fs = std::filesystem;

using RowKey = std::pair<SliceKey, OrganClass>;
using RowTable = std::map<RowKey, std::string>;

struct CommonOptions {
    std::string class_labels;
    unsigned jobs = default_jobs();
};

struct DecodeOptions {
    std::string rle;
    std::size_t width = 0;
    std::size_t height = 0;
    std::string out;
};

struct ScoreOptions {
    std::string pred;
    std::string truth;
    std::string dataset;
    std::string out;
    double slice_thickness = kDefaultSpacing.z;
    bool strict = false;
};

struct PreprocessOptions {
    std::string dataset;
    std::string spec;
    std::string out;
    std::string mode = "gray";
    std::string masks;
    std::optional<std::uint64_t> seed;
};

struct EnsembleOptions {
    std::string dataset;
    std::string probmaps_a;
    std::string probmaps_b;
    std::string presence;
    double gate_thr = kDefaultGateThreshold;
    double bin_thr = kDefaultBinarizeThreshold;
    std::string out;
};

struct OverlayOptions {
    std::string dataset;
    std::string masks;
    std::string out;
};

ClassLabels parse_labels(const std::string& text) {
    if (text.empty()) return ClassLabels{};
    PerClass<std::string> labels;
    std::size_t start = 0;
    for (std::size_t i = 0; i < kClassCount; ++i) {
        const auto comma = text.find(',', start);
        if ((comma == std::string::npos) != (i + 1 == kClassCount)) {
            throw InvalidArgument("--class-labels expects exactly three comma-separated labels");
        }
        labels[i] = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        start = comma + 1;
    }
    return ClassLabels(std::move(labels));
}

RowTable to_table(const std::vector<AnnotationRow>& rows, const std::string& source) {
    RowTable table;
    for (const auto& r : rows) {
        if (!table.emplace(RowKey{r.key, r.organ}, r.segmentation).second) {
            throw ParseError(source + ": duplicate row for slice " + to_id(r.key));
        }
    }
    return table;
}

void require_known_slices(const RowTable& table, const DatasetIndex& index, const std::string& source) {
    for (const auto& [key, rle] : table) {
        if (!index.find_slice(key.first)) {
            throw InvalidArgument(source + ": slice " + to_id(key.first) + " is not in the dataset");
        }
    }
}

BinaryMask decode_row(const RowTable& table, const SliceRecord& slice, OrganClass organ, const std::string& source) {
    const auto it = table.find(RowKey{slice.key, organ});
    if (it == table.end()) return blank_mask(slice.width, slice.height);
    try {
        return decode_rle(it->second, slice.width, slice.height);
    } catch (const MalformedRle& e) {
        throw InvalidArgument(source + ": slice " + to_id(slice.key) + ": " + e.what());
    }
}

PerClass<BinaryMask> decode_slice(const RowTable& table, const SliceRecord& slice, const std::string& source) {
    return {decode_row(table, slice, OrganClass::LargeBowel, source),
            decode_row(table, slice, OrganClass::SmallBowel, source),
            decode_row(table, slice, OrganClass::Stomach, source)};
}

PerClass<MaskVolume> assemble(const VolumeRecord& vol, const RowTable& table, const std::string& source) {
    const std::size_t plane = vol.width() * vol.height();
    PerClass<std::vector<std::uint8_t>> voxels;
    for (auto& v : voxels) v.assign(plane * vol.depth(), 0);
    for (std::size_t z = 0; z < vol.depth(); ++z) {
        const auto& slice = vol.slices()[z];
        for (auto c : kOrganClasses) {
            const auto mask = decode_row(table, slice, c, source);
            std::copy(mask.bits().begin(), mask.bits().end(),
                      voxels[index_of(c)].begin() + static_cast<std::ptrdiff_t>(z * plane));
        }
    }
    const auto make = [&](std::size_t i) {
        return MaskVolume(vol.width(), vol.height(), vol.depth(), std::move(voxels[i]), vol.spacing());
    };
    return {make(0), make(1), make(2)};
}

SliceImage load_slice(const SliceRecord& slice) {
    auto image = read_slice_png(slice.file);
    if (image.width() != slice.width || image.height() != slice.height) {
        throw ShapeMismatch("slice " + to_id(slice.key) + ": PNG is " + std::to_string(image.width()) + "x" +
                            std::to_string(image.height()) + " but its filename says " +
                            std::to_string(slice.width) + "x" + std::to_string(slice.height));
    }
    return image;
}

std::vector<NormalizedImage> load_volume(const VolumeRecord& vol) {
    std::vector<NormalizedImage> out;
    out.reserve(vol.depth());
    for (const auto& s : vol.slices()) out.push_back(normalize_intensity(load_slice(s)));
    return out;
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir.string() + "'");
}

std::vector<std::uint16_t> quantize(std::span<const double> v) {
    std::vector<std::uint16_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<std::uint16_t>(std::lround(v[i] * 65535.0));
    return out;
}

// Interleaved 8-bit RGB where channel k carries class k (0 or 255).
void write_class_masks(const fs::path& path, const PerClass<BinaryMask>& masks) {
    const auto w = masks[0].width();
    const auto h = masks[0].height();
    std::vector<std::uint8_t> rgb(w * h * 3);
    for (std::size_t c = 0; c < kClassCount; ++c) {
        const auto bits = masks[c].bits();
        for (std::size_t i = 0; i < bits.size(); ++i) rgb[3 * i + c] = bits[i] ? 255 : 0;
    }
    write_png_rgb8(path, w, h, rgb);
}

std::map<SliceKey, ClassPresence> load_presence(const fs::path& path, const ClassLabels& labels) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open presence table '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 1;
    if (std::getline(in, line) && !line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,class,probability") {
        throw ParseError(path.string() + ": expected header 'id,class,probability'");
    }
    std::map<SliceKey, std::array<std::optional<double>, kClassCount>> partial;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            throw ParseError(path.string() + " line " + std::to_string(line_no) + ": expected 3 fields");
        }
        const auto key = parse_slice_id(std::string_view(line).substr(0, c1));
        const auto organ = labels.parse(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
        double p = 0.0;
        const std::string_view value = std::string_view(line).substr(c2 + 1);
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), p);
        if (ec != std::errc{} || ptr != value.data() + value.size() || !(p >= 0.0 && p <= 1.0)) {
            throw ParseError(path.string() + " line " + std::to_string(line_no) + ": bad probability '" +
                             std::string(value) + "'");
        }
        auto& slot = partial[key][index_of(organ)];
        if (slot) throw ParseError(path.string() + " line " + std::to_string(line_no) + ": duplicate row");
        slot = p;
    }
    std::map<SliceKey, ClassPresence> table;
    for (const auto& [key, probs] : partial) {
        PerClass<double> values{};
        for (std::size_t i = 0; i < kClassCount; ++i) {
            if (!probs[i]) {
                throw ParseError(path.string() + ": slice " + to_id(key) + " lacks a row for class '" +
                                 labels.label(kOrganClasses[i]) + "'");
            }
            values[i] = *probs[i];
        }
        table.emplace(key, ClassPresence(values));
    }
    return table;
}

int cmd_decode(const DecodeOptions& o) {
    const auto mask = decode_rle(o.rle, o.width, o.height);
    write_mask_png(o.out, mask);
    return kExitOk;
}

int cmd_score(const ScoreOptions& o, const CommonOptions& common) {
    const auto labels = parse_labels(common.class_labels);
    DatasetLayout layout;
    layout.slice_thickness_mm = o.slice_thickness;
    const auto index = scan_dataset(o.dataset, layout);
    const auto truth = to_table(load_annotations(o.truth, labels), o.truth);
    const auto pred = to_table(load_annotations(o.pred, labels), o.pred);
    require_known_slices(truth, index, o.truth);
    require_known_slices(pred, index, o.pred);

    std::size_t missing = 0;
    std::set<std::pair<std::string, std::uint32_t>> case_keys;
    for (const auto& [key, rle] : truth) {
        if (!pred.contains(key)) ++missing;
        case_keys.emplace(key.first.case_id, key.first.day);
    }
    if (missing > 0 && o.strict) {
        std::cerr << "error: " << missing << " truth rows have no prediction (--strict)\n";
        return kExitInvalid;
    }

    std::vector<const VolumeRecord*> volumes;
    for (const auto& [case_id, day] : case_keys) volumes.push_back(index.find(case_id, day));

    std::vector<CaseScore> results(volumes.size());
    parallel_for(volumes.size(), common.jobs, [&](std::size_t i) {
        const auto& vol = *volumes[i];
        results[i] = CaseScore{vol.volume_id(), score_case(assemble(vol, pred, o.pred), assemble(vol, truth, o.truth))};
    });
    write_score_report(o.out, results, labels);

    std::cerr << "scored " << results.size() << " cases; overall composite " << format_real(overall_composite(results))
              << '\n';
    if (missing > 0) std::cerr << "warning: " << missing << " missing prediction rows scored as blank\n";
    return kExitOk;
}

int cmd_preprocess(const PreprocessOptions& o, const CommonOptions& common) {
    if (o.mode != "gray" && o.mode != "25d") throw InvalidArgument("--mode must be 'gray' or '25d'");
    const auto labels = parse_labels(common.class_labels);
    auto spec = o.spec.empty() ? AugmentationSpec{} : load_augmentation_config(o.spec);
    if (o.seed) spec.seed = *o.seed;
    validate(spec);

    const auto index = scan_dataset(o.dataset);
    RowTable table;
    if (!o.masks.empty()) {
        table = to_table(load_annotations(o.masks, labels), o.masks);
        require_known_slices(table, index, o.masks);
    }
    const bool with_masks = !o.masks.empty();
    const fs::path out_dir(o.out);
    ensure_directory(out_dir);

    const auto volumes = index.volumes();
    std::vector<std::vector<NormalizedImage>> images(volumes.size());
    parallel_for(volumes.size(), common.jobs, [&](std::size_t i) { images[i] = load_volume(volumes[i]); });

    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t v = 0; v < volumes.size(); ++v)
        for (std::size_t z = 0; z < volumes[v].depth(); ++z) work.emplace_back(v, z);

    const bool stacked = o.mode == "25d";
    std::vector<std::string> manifest(work.size());
    parallel_for(work.size(), common.jobs, [&](std::size_t i) {
        const auto [v, z] = work[i];
        const auto& slice = volumes[v].slices()[z];
        const auto id = to_id(slice.key);
        const auto masks = decode_slice(table, slice, o.masks);
        const auto image_name = id + ".png";
        const auto mask_name = with_masks ? id + "_mask.png" : std::string{};
        PerClass<BinaryMask> out_masks = masks;
        if (stacked) {
            auto result = augment_stack(stack_25d(images[v], z), masks, slice.key, spec);
            std::vector<std::uint16_t> rgb(result.stack.width() * result.stack.height() * 3);
            for (std::size_t c = 0; c < 3; ++c) {
                const auto q = quantize(result.stack.channel(c).values());
                for (std::size_t p = 0; p < q.size(); ++p) rgb[3 * p + c] = q[p];
            }
            write_png_rgb16(out_dir / image_name, result.stack.width(), result.stack.height(), rgb);
            out_masks = std::move(result.masks);
        } else {
            auto result = augment(Sample(images[v][z], masks, slice.key), spec);
            write_normalized_png(out_dir / image_name, result.image());
            out_masks = result.masks();
        }
        if (with_masks) write_class_masks(out_dir / mask_name, out_masks);
        manifest[i] = id + "," + image_name + "," + mask_name + "," + std::to_string(spec.target_width) + "," +
                      std::to_string(spec.target_height) + "," + (stacked ? "3" : "1") + "\n";
    });

    std::string text = "id,image,mask,width,height,channels\n";
    for (const auto& line : manifest) text += line;
    write_text_file(out_dir / "manifest.csv", text);
    std::cerr << "preprocessed " << work.size() << " slices (" << o.mode << ")\n";
    return kExitOk;
}

int cmd_ensemble(const EnsembleOptions& o, const CommonOptions& common) {
    const auto labels = parse_labels(common.class_labels);
    const auto index = scan_dataset(o.dataset);
    const PresenceTable classifier(load_presence(o.presence, labels));
    const FileBacked path_a(o.probmaps_a);
    const FileBacked path_b(o.probmaps_b);
    const auto volumes = index.volumes();

    std::vector<std::vector<AnnotationRow>> rows(volumes.size());
    parallel_for(volumes.size(), common.jobs, [&](std::size_t v) {
        const auto& vol = volumes[v];
        const auto images = load_volume(vol);
        for (std::size_t z = 0; z < vol.depth(); ++z) {
            const auto& key = vol.slices()[z].key;
            const auto masks = predict_slice(key, stack_25d(images, z), images[z], classifier, path_a, path_b,
                                             o.gate_thr, o.bin_thr);
            for (auto c : kOrganClasses) rows[v].push_back(AnnotationRow{key, c, encode_rle(masks[index_of(c)])});
        }
    });

    std::vector<AnnotationRow> all;
    for (auto& r : rows) std::move(r.begin(), r.end(), std::back_inserter(all));
    const auto count = all.size();
    write_predictions(std::move(all), o.out, labels);
    std::cerr << "wrote " << count << " prediction rows\n";
    return kExitOk;
}

int cmd_overlay(const OverlayOptions& o, const CommonOptions& common) {
    const auto labels = parse_labels(common.class_labels);
    const auto index = scan_dataset(o.dataset);
    const auto table = to_table(load_annotations(o.masks, labels), o.masks);
    require_known_slices(table, index, o.masks);

    std::vector<const SliceRecord*> slices;
    for (const auto& [key, rle] : table) {
        const auto* s = index.find_slice(key.first);
        if (slices.empty() || slices.back() != s) slices.push_back(s);
    }
    const fs::path out_dir(o.out);
    ensure_directory(out_dir);
    parallel_for(slices.size(), common.jobs, [&](std::size_t i) {
        const auto& slice = *slices[i];
        const auto image = render_overlay(load_slice(slice), decode_slice(table, slice, o.masks));
        write_png_rgb8(out_dir / (to_id(slice.key) + ".png"), image.width, image.height, image.rgb);
    });
    std::cerr << "rendered " << slices.size() << " overlays\n";
    return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& common) {
    cmd->add_option("--class-labels", common.class_labels,
                    "Comma-separated labels for large bowel, small bowel, stomach");
    cmd->add_option("--jobs,-j", common.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

CLI::Option* add_dataset(CLI::App* cmd, std::string& target) {
    return cmd->add_option("--dataset", target, "Dataset root")
        ->envname(kDatasetEnv)
        ->required()
        ->check(CLI::ExistingDirectory);
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"GI-tract MRI segmentation toolkit: RLE masks, augmentation, gated ensembling, scoring"};
    app.name("gitseg");
    app.require_subcommand(1);

    CommonOptions common;

    DecodeOptions decode;
    auto* dec = app.add_subcommand("decode", "Decode an RLE string to a mask PNG");
    dec->add_option("--rle", decode.rle, "RLE text (may be empty)")->required();
    dec->add_option("--width", decode.width, "Mask width")->required()->check(CLI::PositiveNumber);
    dec->add_option("--height", decode.height, "Mask height")->required()->check(CLI::PositiveNumber);
    dec->add_option("--out", decode.out, "Output PNG")->required();

    ScoreOptions score;
    auto* sc = app.add_subcommand("score", "Score predictions against ground truth");
    sc->add_option("--pred", score.pred, "Prediction CSV")->required()->check(CLI::ExistingFile);
    sc->add_option("--truth", score.truth, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
    add_dataset(sc, score.dataset);
    sc->add_option("--out", score.out, "Report CSV")->required();
    sc->add_option("--slice-thickness", score.slice_thickness, "Inter-slice spacing in mm")
        ->check(CLI::PositiveNumber);
    sc->add_flag("--strict", score.strict, "Fail when a truth row has no prediction");
    add_common(sc, common);

    PreprocessOptions prep;
    auto* pp = app.add_subcommand("preprocess", "Resize and augment slices (gray) or 2.5D stacks (25d)");
    add_dataset(pp, prep.dataset);
    pp->add_option("--spec", prep.spec, "Augmentation config file")->check(CLI::ExistingFile);
    pp->add_option("--out", prep.out, "Output directory")->required();
    pp->add_option("--mode", prep.mode, "gray or 25d")->check(CLI::IsMember({"gray", "25d"}));
    pp->add_option("--masks", prep.masks, "Annotation CSV whose masks follow the images")->check(CLI::ExistingFile);
    pp->add_option("--seed", prep.seed, "Override the config seed");
    add_common(pp, common);

    EnsembleOptions ens;
    auto* en = app.add_subcommand("ensemble", "Gate, average and binarize pathway probability maps");
    add_dataset(en, ens.dataset);
    en->add_option("--probmaps-a", ens.probmaps_a, "2.5D pathway maps")->required()->check(CLI::ExistingDirectory);
    en->add_option("--probmaps-b", ens.probmaps_b, "Grayscale pathway maps")->required()->check(CLI::ExistingDirectory);
    en->add_option("--presence", ens.presence, "Presence CSV (id,class,probability)")
        ->required()
        ->check(CLI::ExistingFile);
    en->add_option("--gate-thr", ens.gate_thr, "Presence threshold")->check(CLI::Range(0.0, 1.0));
    en->add_option("--bin-thr", ens.bin_thr, "Binarization threshold")->check(CLI::Range(0.0, 1.0));
    en->add_option("--out", ens.out, "Prediction CSV")->required();
    add_common(en, common);

    OverlayOptions ov;
    auto* ovc = app.add_subcommand("overlay", "Render mask overlays on the source slices");
    add_dataset(ovc, ov.dataset);
    ovc->add_option("--masks", ov.masks, "Annotation or prediction CSV")->required()->check(CLI::ExistingFile);
    ovc->add_option("--out", ov.out, "Output directory")->required();
    add_common(ovc, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (dec->parsed()) return cmd_decode(decode);
        if (sc->parsed()) return cmd_score(score, common);
        if (pp->parsed()) return cmd_preprocess(prep, common);
        if (en->parsed()) return cmd_ensemble(ens, common);
        if (ovc->parsed()) return cmd_overlay(ov, common);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitInvalid;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"gitseg"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace gitseg::cli
