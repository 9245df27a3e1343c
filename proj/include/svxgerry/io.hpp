#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "svxgerry/core.hpp"
#include "svxgerry/cues.hpp"

namespace svxgerry {

// -- single images ----------------------------------------------------------

/// Decode a PNG or binary PPM (P6) file to 8-bit RGB. Gray and paletted PNGs
/// are expanded; 16-bit samples are reduced to 8.
Grid2<Rgb8> read_image_rgb(const std::filesystem::path& file);

/// Decode a grayscale PNG. `max_value` receives 255 or 65535 per bit depth.
Grid2<std::uint16_t> read_image_gray(const std::filesystem::path& file, int& max_value);

/// Encode: ".ppm" writes binary PPM, anything else PNG.
void write_image_rgb(const std::filesystem::path& file, const Grid2<Rgb8>& img);
void write_image_gray8(const std::filesystem::path& file, const Grid2<std::uint8_t>& img);
void write_image_gray16(const std::filesystem::path& file, const Grid2<std::uint16_t>& img);

// -- Middlebury .flo --------------------------------------------------------

FlowField read_flo(const std::filesystem::path& file);
void write_flo(const std::filesystem::path& file, const FlowField& flow);

// -- directory-level loaders ------------------------------------------------

/// Image (or .flo) files under `dir`, ordered by the numeric value embedded in
/// the stem (trailing digit run), then by name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir,
                                               const std::vector<std::string>& extensions);

/// PNG/PPM frames in numeric order. Requires >= 2 frames of uniform size.
VideoVolume load_frames(const std::filesystem::path& dir);

/// Basenames (stems) of the frames `load_frames` would read, in load order.
std::vector<std::string> frame_names(const std::filesystem::path& dir);

/// One .flo per frame pair, numeric order.
std::vector<FlowField> load_flow_sequence(const std::filesystem::path& dir);

/// 8/16-bit grayscale PNGs mapped linearly to [0,1], numeric order.
std::vector<SaliencyMap> load_saliency(const std::filesystem::path& dir);

/// RGB label images, one per frame: each distinct color is one supervoxel,
/// ids assigned in first-appearance (t, y, x) order. `expected_frames` of 0
/// skips the frame-count check.
LabelGrid load_supervoxel_labels(const std::filesystem::path& dir, int expected_frames = 0);

/// Inverse of load_supervoxel_labels under the injective id->color map
/// r = id & 255, g = (id >> 8) & 255, b = (id >> 16) & 255.
void write_supervoxel_labels(const std::filesystem::path& dir, const LabelGrid& labels,
                             const std::vector<std::string>& names = {});

/// Binary masks, any nonzero sample -> 1.
MaskSequence load_ground_truth(const std::filesystem::path& dir);

/// One 0/255 grayscale PNG per frame. `names` (stems) defaults to zero-padded
/// frame indices.
void write_masks(const MaskSequence& masks, const std::filesystem::path& dir,
                 const std::vector<std::string>& names = {});

}  // namespace svxgerry
