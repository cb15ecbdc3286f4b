#pragma once

#include <vector>

#include "ledit/tensor.hpp"
#include "ledit/textenc.hpp"

namespace ledit {

class EpsilonNet;
struct NoiseSchedule;

// Binary edit mask at latent resolution with its source heat map.
struct EditMask {
    Tensor binary;        // {H,W}, values 0/1
    Tensor raw;           // {H,W}, channel-averaged mean pairwise |eps_i - eps_j|
    float threshold_frac = 0.4f;

    Tensor complement() const;
    double coverage() const; // fraction of 1s
};

// Mean over unique pairs of elementwise |eps_i - eps_j|, then averaged over
// channels to a single spatial map. Estimates are {C,H,W}; needs N >= 2.
Tensor noise_differences(const std::vector<Tensor>& eps_list);

// Min-max normalizes raw to [0,1], thresholds at threshold_frac. A constant
// map binarizes to all-zero.
EditMask binarize(const Tensor& raw, float threshold_frac);

// Runs one prediction per conditioning on the shared z_t and composes the
// two steps above. The predictions made here are never part of any gradient
// path; the mask is a constant within a training step.
EditMask make_mask(const EpsilonNet& net, const Tensor& z_t, int t,
                   const std::vector<PromptEmbedding>& cond_list,
                   float threshold_frac = 0.4f);

// Nearest-neighbour upsampling of the binary plane to image resolution.
Tensor upsample_mask(const Tensor& binary, int image_h, int image_w);

} // namespace ledit
