#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "psa/grid.hpp"

namespace psa {

enum class Split { Train, Val, Test };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

/// One phantom "patient": the image, its organ masks, one ground-truth CTV
/// mask per contouring style, and which style is the clinical contour.
struct StyledSample {
    Grid image;
    BinaryMask bladder;
    BinaryMask rectum;
    std::vector<BinaryMask> ctv_by_style;
    int assigned_style = 1;  // 1-based index into ctv_by_style

    const BinaryMask& assigned_ctv() const { return ctv_by_style.at(assigned_style - 1); }

    /// Shared dimensions, valid assigned_style, nonempty CTV masks.
    void validate(int num_styles) const;

    bool operator==(const StyledSample&) const = default;
};

struct Dataset {
    int num_styles = 0;
    std::vector<StyledSample> samples;
    std::vector<Split> split_tags;  // one per sample

    std::vector<std::size_t> indices(Split s) const;
    void validate() const;

    /// Deterministic content hash (CRC-32 over all grids and metadata);
    /// used for checkpoint provenance.
    std::uint32_t content_hash() const;

    bool operator==(const Dataset&) const = default;
};

/// Writes manifest.json plus one blob per grid into `dir`. Round-trips
/// bit-exactly through load_dataset.
void save_dataset(const Dataset& d, const std::filesystem::path& dir);

/// Throws std::runtime_error on missing blobs, checksum mismatches, or a
/// manifest that disagrees with the blobs.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace psa
