#pragma once

#include <optional>
#include <vector>

#include "ledit/maskgen.hpp"
#include "ledit/tensor.hpp"

namespace ledit {

struct LossWeights {
    float alpha = 1.0f; // weight of the contrastive term in the objective
    float beta = 1.0f;  // weight of the dissimilarity term inside it
};

enum class ClMode { Hard, Soft };

struct LossBreakdown {
    double l_ldm = 0.0;
    double l_d = 0.0;
    double l_p = 0.0;
    double l_cl = 0.0;
    double l_obj = 0.0;
    ClMode mode = ClMode::Hard;
};

using GammaMatrix = std::vector<std::vector<float>>;

// Root-mean-square distance over the mask-selected support (all channels at
// selected spatial positions). Empty support yields 0.
double masked_distance(const Tensor& z_a, const Tensor& z_b, const Tensor& mask);

// L_d = (1/Np) sum_{i<j} (1 - masked_distance(z_i, z_j, M)).
// Optional grads accumulate d l_d / d z_i (same shapes as z_list entries).
double dissimilarity_loss(const std::vector<Tensor>& z_list, const Tensor& mask,
                          std::vector<Tensor>* grads = nullptr);

// L_p = (1/Np) sum_{i<j} masked_distance(z_i, z_j, complement).
double preservation_loss(const std::vector<Tensor>& z_list, const Tensor& mask_complement,
                         std::vector<Tensor>* grads = nullptr);

// L_d_soft = (1/Np) sum_{i<j} (1 - masked_distance(z_i,z_j,M)^2 * gamma_ij).
double soft_dissimilarity_loss(const std::vector<Tensor>& z_list, const Tensor& mask,
                               const GammaMatrix& gamma, std::vector<Tensor>* grads = nullptr);

// l_cl = l_p + beta * l_d (hard or soft); l_obj = l_ldm + alpha * l_cl.
// Soft mode requires a gamma matrix.
LossBreakdown total_objective(double l_ldm, const std::vector<Tensor>& z_list,
                              const EditMask& mask, const std::optional<GammaMatrix>& gamma,
                              const LossWeights& weights, ClMode mode);

// Same, also accumulating alpha-scaled contrastive gradients w.r.t. each z_i
// (the l_ldm branch is not part of z_list and is handled by the caller).
LossBreakdown total_objective_grad(double l_ldm, const std::vector<Tensor>& z_list,
                                   const EditMask& mask, const std::optional<GammaMatrix>& gamma,
                                   const LossWeights& weights, ClMode mode,
                                   std::vector<Tensor>& z_grads);

} // namespace ledit
