#include "gitseg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <map>

namespace gitseg {

namespace {

template <typename T>
bool parse_whole(std::string_view text, T& out) {
    if (text.empty()) return false;
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, out);
    return ec == std::errc{} && ptr == last;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

[[noreturn]] void bad_name(std::string_view name, std::string_view segment, const char* why) {
    throw ParseError("slice filename '" + std::string(name) + "': " + why + " '" + std::string(segment) + "'");
}

}  // namespace

SliceFileInfo parse_slice_filename(std::string_view name, std::string_view extension) {
    if (name.size() <= extension.size() || name.substr(name.size() - extension.size()) != extension) {
        bad_name(name, name, "expected extension");
    }
    const auto stem = name.substr(0, name.size() - extension.size());
    const auto parts = split(stem, '_');
    if (parts.size() != 6) bad_name(name, stem, "expected slice_{idx}_{w}_{h}_{sx}_{sy}, got");
    if (parts[0] != "slice") bad_name(name, parts[0], "expected prefix 'slice', got");

    SliceFileInfo info;
    if (parts[1].size() != 4 || !all_digits(parts[1]) || !parse_whole(parts[1], info.slice_index)) {
        bad_name(name, parts[1], "slice index must be 4 digits, got");
    }
    if (!all_digits(parts[2]) || !parse_whole(parts[2], info.width) || info.width == 0) {
        bad_name(name, parts[2], "bad width");
    }
    if (!all_digits(parts[3]) || !parse_whole(parts[3], info.height) || info.height == 0) {
        bad_name(name, parts[3], "bad height");
    }
    if (!parse_whole(parts[4], info.spacing_x) || !(info.spacing_x > 0.0)) bad_name(name, parts[4], "bad spacing");
    if (!parse_whole(parts[5], info.spacing_y) || !(info.spacing_y > 0.0)) bad_name(name, parts[5], "bad spacing");
    return info;
}

VolumeRecord::VolumeRecord(std::string case_id, std::uint32_t day, std::vector<SliceRecord> slices,
                           double slice_thickness_mm)
    : case_id_(std::move(case_id)), day_(day), slices_(std::move(slices)) {
    if (slices_.empty()) throw EmptyVolume("volume " + volume_id() + " has no slices");
    std::sort(slices_.begin(), slices_.end(),
              [](const SliceRecord& a, const SliceRecord& b) { return a.key.slice_index < b.key.slice_index; });
    for (std::size_t i = 1; i < slices_.size(); ++i) {
        const auto& prev = slices_[i - 1];
        const auto& cur = slices_[i];
        if (cur.key.slice_index == prev.key.slice_index) {
            throw DuplicateSlice("volume " + volume_id() + ": duplicate slice index " +
                                 std::to_string(cur.key.slice_index) + " (" + prev.file.filename().string() +
                                 ", " + cur.file.filename().string() + ")");
        }
        if (cur.key.slice_index != prev.key.slice_index + 1) {
            throw ParseError("volume " + volume_id() + ": slice indices jump from " +
                             std::to_string(prev.key.slice_index) + " to " + std::to_string(cur.key.slice_index));
        }
        if (cur.width != prev.width || cur.height != prev.height) {
            throw ShapeMismatch("volume " + volume_id() + ": slice " + cur.file.filename().string() + " is " +
                                std::to_string(cur.width) + "x" + std::to_string(cur.height) + ", expected " +
                                std::to_string(prev.width) + "x" + std::to_string(prev.height));
        }
    }
    spacing_ = Spacing{slices_.front().spacing_x, slices_.front().spacing_y, slice_thickness_mm};
    validate_spacing(spacing_);
}

std::string VolumeRecord::volume_id() const { return case_id_ + "_day" + std::to_string(day_); }

std::optional<std::size_t> VolumeRecord::position_of(std::uint32_t slice_index) const noexcept {
    const auto first = slices_.front().key.slice_index;
    if (slice_index < first || slice_index - first >= slices_.size()) return std::nullopt;
    return slice_index - first;
}

DatasetIndex::DatasetIndex(std::vector<VolumeRecord> volumes) : volumes_(std::move(volumes)) {
    std::sort(volumes_.begin(), volumes_.end(), [](const VolumeRecord& a, const VolumeRecord& b) {
        return std::pair{std::string_view(a.case_id()), a.day()} < std::pair{std::string_view(b.case_id()), b.day()};
    });
}

const VolumeRecord* DatasetIndex::find(std::string_view case_id, std::uint32_t day) const noexcept {
    const auto it = std::lower_bound(volumes_.begin(), volumes_.end(), std::pair{case_id, day},
                                     [](const VolumeRecord& v, const std::pair<std::string_view, std::uint32_t>& k) {
                                         return std::pair{std::string_view(v.case_id()), v.day()} < k;
                                     });
    if (it == volumes_.end() || it->case_id() != case_id || it->day() != day) return nullptr;
    return &*it;
}

const SliceRecord* DatasetIndex::find_slice(const SliceKey& key) const noexcept {
    const auto* vol = find(key.case_id, key.day);
    if (!vol) return nullptr;
    const auto pos = vol->position_of(key.slice_index);
    if (!pos) return nullptr;
    return &vol->slices()[*pos];
}

DatasetIndex scan_dataset(const std::filesystem::path& root, const DatasetLayout& layout) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw IoError("dataset root '" + root.string() + "' is not a directory");

    const auto sorted_dirs = [](const fs::path& dir) {
        std::vector<fs::path> out;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_directory()) out.push_back(e.path());
        }
        std::sort(out.begin(), out.end());
        return out;
    };

    std::vector<VolumeRecord> volumes;
    for (const auto& case_dir : sorted_dirs(root)) {
        const std::string case_id = case_dir.filename().string();
        if (case_id.rfind("case", 0) != 0 || !all_digits(std::string_view(case_id).substr(4))) continue;
        for (const auto& day_dir : sorted_dirs(case_dir)) {
            const std::string day_name = day_dir.filename().string();
            const std::string prefix = case_id + "_day";
            std::uint32_t day = 0;
            if (day_name.rfind(prefix, 0) != 0 || !all_digits(std::string_view(day_name).substr(prefix.size())) ||
                !parse_whole(std::string_view(day_name).substr(prefix.size()), day)) {
                continue;
            }
            const auto scans = day_dir / layout.scans_dir;
            if (!fs::is_directory(scans, ec)) continue;
            std::vector<SliceRecord> slices;
            for (const auto& e : fs::directory_iterator(scans)) {
                if (!e.is_regular_file()) continue;
                const auto name = e.path().filename().string();
                if (e.path().extension() != layout.extension) continue;
                const auto info = parse_slice_filename(name, layout.extension);
                slices.push_back(SliceRecord{make_slice_key(case_id, day, info.slice_index), e.path(), info.width,
                                             info.height, info.spacing_x, info.spacing_y});
            }
            if (slices.empty()) continue;
            volumes.emplace_back(case_id, day, std::move(slices), layout.slice_thickness_mm);
        }
    }
    return DatasetIndex(std::move(volumes));
}

std::vector<AnnotationRow> parse_annotations(std::string_view text, const ClassLabels& labels) {
    std::vector<AnnotationRow> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        const auto eol = text.find('\n', pos);
        auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!saw_header) {
            if (line != kAnnotationHeader) {
                throw ParseError("annotations line 1: expected header '" + std::string(kAnnotationHeader) +
                                 "', got '" + std::string(line) + "'");
            }
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw ParseError("annotations line " + std::to_string(line_no) + ": expected 3 fields, got " +
                             std::to_string(fields.size()));
        }
        try {
            rows.push_back(AnnotationRow{parse_slice_id(fields[0]), labels.parse(fields[1]), std::string(fields[2])});
        } catch (const UnknownClass& e) {
            throw UnknownClass("annotations line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw ParseError("annotations line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!saw_header) throw ParseError("annotations: missing header");
    return rows;
}

std::vector<AnnotationRow> load_annotations(const std::filesystem::path& csv, const ClassLabels& labels) {
    const auto text = read_file(csv);
    try {
        return parse_annotations(text, labels);
    } catch (const UnknownClass& e) {
        throw UnknownClass(csv.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(csv.string() + ": " + e.what());
    }
}

std::string format_predictions(std::vector<AnnotationRow> rows, const ClassLabels& labels) {
    std::stable_sort(rows.begin(), rows.end(), [](const AnnotationRow& a, const AnnotationRow& b) {
        return std::tie(a.key, a.organ) < std::tie(b.key, b.organ);
    });
    std::string out(kAnnotationHeader);
    out.push_back('\n');
    for (const auto& r : rows) {
        out += to_id(r.key);
        out.push_back(',');
        out += labels.label(r.organ);
        out.push_back(',');
        out += r.segmentation;
        out.push_back('\n');
    }
    return out;
}

void write_predictions(std::vector<AnnotationRow> rows, const std::filesystem::path& csv, const ClassLabels& labels) {
    write_text_file(csv, format_predictions(std::move(rows), labels));
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace gitseg
