#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gitseg/types.hpp"

namespace gitseg {

/// Fields encoded in "slice_{iiii}_{w}_{h}_{sx}_{sy}.png".
struct SliceFileInfo {
    std::uint32_t slice_index = 0;
    std::size_t width = 0;
    std::size_t height = 0;
    double spacing_x = 0.0;
    double spacing_y = 0.0;
};

/// Directory and file conventions. The defaults follow the public GI-tract
/// dataset: {root}/case{c}/case{c}_day{d}/scans/slice_*.png
struct DatasetLayout {
    std::string scans_dir = "scans";
    std::string extension = ".png";
    // Inter-slice distance; filenames carry only in-plane spacing.
    double slice_thickness_mm = 3.0;
};

SliceFileInfo parse_slice_filename(std::string_view name, std::string_view extension = ".png");

struct SliceRecord {
    SliceKey key;
    std::filesystem::path file;
    std::size_t width = 0;
    std::size_t height = 0;
    double spacing_x = 0.0;
    double spacing_y = 0.0;
};

/// All slices of one (case, day) scan, ordered by slice index; indices are
/// contiguous and every slice has the same dimensions.
class VolumeRecord {
public:
    VolumeRecord(std::string case_id, std::uint32_t day, std::vector<SliceRecord> slices, double slice_thickness_mm);

    const std::string& case_id() const noexcept { return case_id_; }
    std::uint32_t day() const noexcept { return day_; }
    /// "{case}_day{d}", the case identifier used in score reports.
    std::string volume_id() const;
    std::span<const SliceRecord> slices() const noexcept { return slices_; }
    std::size_t width() const noexcept { return slices_.front().width; }
    std::size_t height() const noexcept { return slices_.front().height; }
    std::size_t depth() const noexcept { return slices_.size(); }
    Spacing spacing() const noexcept { return spacing_; }
    /// 0-based position of a dataset slice index in this volume.
    std::optional<std::size_t> position_of(std::uint32_t slice_index) const noexcept;

private:
    std::string case_id_;
    std::uint32_t day_;
    std::vector<SliceRecord> slices_;
    Spacing spacing_;
};

class DatasetIndex {
public:
    DatasetIndex() = default;
    explicit DatasetIndex(std::vector<VolumeRecord> volumes);

    std::span<const VolumeRecord> volumes() const noexcept { return volumes_; }
    bool empty() const noexcept { return volumes_.empty(); }
    const VolumeRecord* find(std::string_view case_id, std::uint32_t day) const noexcept;
    const SliceRecord* find_slice(const SliceKey& key) const noexcept;

private:
    std::vector<VolumeRecord> volumes_;
};

/// Walks the dataset tree into a sorted index. Ordering is independent of
/// directory enumeration order. Directories not named like cases or days are
/// ignored; a day without a scans directory is skipped.
DatasetIndex scan_dataset(const std::filesystem::path& root, const DatasetLayout& layout = {});

/// One row of an annotation or prediction table.
struct AnnotationRow {
    SliceKey key;
    OrganClass organ = OrganClass::LargeBowel;
    std::string segmentation;  // RLE text, possibly empty

    friend bool operator==(const AnnotationRow&, const AnnotationRow&) = default;
};

inline constexpr std::string_view kAnnotationHeader = "id,class,segmentation";

std::vector<AnnotationRow> parse_annotations(std::string_view text, const ClassLabels& labels = {});
std::vector<AnnotationRow> load_annotations(const std::filesystem::path& csv, const ClassLabels& labels = {});

/// Canonical CSV text: header, then rows sorted by (case, day, slice, class),
/// LF line endings.
std::string format_predictions(std::vector<AnnotationRow> rows, const ClassLabels& labels = {});
void write_predictions(std::vector<AnnotationRow> rows, const std::filesystem::path& csv,
                       const ClassLabels& labels = {});

/// Writes a file atomically enough for our purposes: whole buffer, binary mode.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace gitseg
