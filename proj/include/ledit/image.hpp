#pragma once

#include <string>

#include "ledit/tensor.hpp"

namespace ledit {

// Images are Tensors of shape {H, W, 3} with values in [0, 1].
// Masks are Tensors of shape {H, W} with values 0 or 1.

// 8-bit RGB PNG, deterministic bytes for identical pixels.
void write_png_rgb(const std::string& path, const Tensor& image);
// 8-bit grayscale PNG from a {H,W} map in [0,1].
void write_png_gray(const std::string& path, const Tensor& map);

// Reads an 8-bit PNG into {H,W,3} in [0,1]; grayscale/palette/alpha inputs
// are expanded to RGB. Throws IoError on missing files or decode failures.
Tensor read_png_rgb(const std::string& path);
// Reads a PNG as a binary {H,W} mask (luma > 0.5).
Tensor read_png_mask(const std::string& path);

// Maps a {H,W} scalar field in [0,1] through a fixed perceptual colormap
// (viridis anchors, linear interpolation) into an {H,W,3} image.
Tensor colormap_heat(const Tensor& map);

// Mean absolute per-pixel difference over channels, in [0,1]: {H,W}.
Tensor abs_diff_map(const Tensor& a, const Tensor& b);

// Peak signal-to-noise ratio in dB over all channels, range 1.0.
double psnr(const Tensor& a, const Tensor& b);

} // namespace ledit
