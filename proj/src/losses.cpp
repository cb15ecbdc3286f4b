#include "ledit/losses.hpp"

#include <cmath>

#include "ledit/kernels.hpp"

namespace ledit {

namespace {

struct MaskView {
    std::vector<uint8_t> bytes;
    int64_t selected = 0;
    int h = 0, w = 0;

    explicit MaskView(const Tensor& mask) {
        h = mask.dim(0);
        w = mask.dim(1);
        bytes.resize(static_cast<size_t>(mask.size()));
        for (int64_t i = 0; i < mask.size(); ++i) {
            bytes[static_cast<size_t>(i)] = mask[i] != 0.0f ? 1 : 0;
            selected += bytes[static_cast<size_t>(i)];
        }
    }
};

void check_shapes(const std::vector<Tensor>& z_list, const Tensor& mask) {
    if (z_list.size() < 2) throw std::invalid_argument("pairwise loss: need at least 2 latents");
    const auto& shape = z_list.front().shape();
    if (shape.size() != 3) throw std::invalid_argument("pairwise loss: latents must be {C,H,W}");
    for (const auto& z : z_list)
        if (z.shape() != shape) throw std::invalid_argument("pairwise loss: latent shape mismatch");
    if (mask.shape().size() != 2 || mask.dim(0) != shape[1] || mask.dim(1) != shape[2])
        throw std::invalid_argument("pairwise loss: mask shape mismatch");
}

// Shared support count: selected spatial positions times channels.
double support_count(const MaskView& m, int channels) {
    return std::max<double>(1.0, static_cast<double>(m.selected) * channels);
}

} // namespace

double masked_distance(const Tensor& z_a, const Tensor& z_b, const Tensor& mask) {
    if (!z_a.same_shape(z_b)) throw std::invalid_argument("masked_distance: shape mismatch");
    if (mask.shape().size() != 2 || mask.dim(0) != z_a.dim(1) || mask.dim(1) != z_a.dim(2))
        throw std::invalid_argument("masked_distance: mask shape mismatch");
    MaskView m(mask);
    if (m.selected == 0) return 0.0;
    double s = kernels::masked_sq_diff_sum(z_a.data(), z_b.data(), m.bytes.data(), z_a.dim(0),
                                           m.h, m.w);
    return std::sqrt(s / support_count(m, z_a.dim(0)));
}

namespace {

// Pairwise loop shared by the three losses. `term` maps the pair's squared
// RMS distance to the loss term; `weight` scales the pair gradient
// d(loss)/d(d^2) passed back for accumulation.
template <typename TermFn>
double pairwise_loss(const std::vector<Tensor>& z_list, const Tensor& mask,
                     std::vector<Tensor>* grads, TermFn term) {
    check_shapes(z_list, mask);
    MaskView m(mask);
    int n = static_cast<int>(z_list.size());
    int c = z_list.front().dim(0);
    double np = static_cast<double>(n) * (n - 1) / 2.0;
    double count = support_count(m, c);
    int64_t hw = static_cast<int64_t>(m.h) * m.w;

    if (grads) {
        for (auto& g : *grads)
            if (g.empty()) g = Tensor(z_list.front().shape());
    }

    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            if (m.selected > 0)
                d2 = kernels::masked_sq_diff_sum(z_list[static_cast<size_t>(i)].data(),
                                                 z_list[static_cast<size_t>(j)].data(),
                                                 m.bytes.data(), c, m.h, m.w) /
                     count;
            double dterm_dd2 = 0.0;
            total += term(i, j, d2, dterm_dd2) / np;
            if (grads && dterm_dd2 != 0.0 && m.selected > 0) {
                // d(d2)/d(z_i) = 2 (z_i - z_j) mask / count
                double scale = dterm_dd2 * 2.0 / (count * np);
                Tensor& gi = (*grads)[static_cast<size_t>(i)];
                Tensor& gj = (*grads)[static_cast<size_t>(j)];
                const Tensor& zi = z_list[static_cast<size_t>(i)];
                const Tensor& zj = z_list[static_cast<size_t>(j)];
                for (int ci = 0; ci < c; ++ci)
                    for (int64_t s = 0; s < hw; ++s) {
                        if (!m.bytes[static_cast<size_t>(s)]) continue;
                        int64_t idx = ci * hw + s;
                        float diff = zi[idx] - zj[idx];
                        gi[idx] += static_cast<float>(scale * diff);
                        gj[idx] -= static_cast<float>(scale * diff);
                    }
            }
        }
    }
    return total;
}

} // namespace

double dissimilarity_loss(const std::vector<Tensor>& z_list, const Tensor& mask,
                          std::vector<Tensor>* grads) {
    return pairwise_loss(z_list, mask, grads, [](int, int, double d2, double& dterm_dd2) {
        double d = std::sqrt(d2);
        // d(1 - d)/d(d2) = -1/(2 d); flat subgradient at coincident latents.
        dterm_dd2 = d > 0.0 ? -0.5 / d : 0.0;
        return 1.0 - d;
    });
}

double preservation_loss(const std::vector<Tensor>& z_list, const Tensor& mask_complement,
                         std::vector<Tensor>* grads) {
    return pairwise_loss(z_list, mask_complement, grads,
                         [](int, int, double d2, double& dterm_dd2) {
                             double d = std::sqrt(d2);
                             dterm_dd2 = d > 0.0 ? 0.5 / d : 0.0;
                             return d;
                         });
}

double soft_dissimilarity_loss(const std::vector<Tensor>& z_list, const Tensor& mask,
                               const GammaMatrix& gamma, std::vector<Tensor>* grads) {
    size_t n = z_list.size();
    if (gamma.size() != n) throw std::invalid_argument("soft loss: gamma size mismatch");
    for (size_t i = 0; i < n; ++i) {
        if (gamma[i].size() != n) throw std::invalid_argument("soft loss: gamma not square");
        if (gamma[i][i] != 0.0f) throw std::invalid_argument("soft loss: gamma diagonal not zero");
        for (size_t j = 0; j < n; ++j) {
            if (gamma[i][j] < 0.0f || gamma[i][j] > 1.0f)
                throw std::invalid_argument("soft loss: gamma entries must be in [0,1]");
            if (gamma[i][j] != gamma[j][i])
                throw std::invalid_argument("soft loss: gamma not symmetric");
        }
    }
    return pairwise_loss(z_list, mask, grads,
                         [&gamma](int i, int j, double d2, double& dterm_dd2) {
                             double g = gamma[static_cast<size_t>(i)][static_cast<size_t>(j)];
                             dterm_dd2 = -g;
                             return 1.0 - d2 * g;
                         });
}

LossBreakdown total_objective(double l_ldm, const std::vector<Tensor>& z_list,
                              const EditMask& mask, const std::optional<GammaMatrix>& gamma,
                              const LossWeights& weights, ClMode mode) {
    if (mode == ClMode::Soft && !gamma)
        throw std::invalid_argument("total_objective: soft mode requires a gamma matrix");
    LossBreakdown out;
    out.mode = mode;
    out.l_ldm = l_ldm;
    out.l_d = mode == ClMode::Soft ? soft_dissimilarity_loss(z_list, mask.binary, *gamma)
                                   : dissimilarity_loss(z_list, mask.binary);
    out.l_p = preservation_loss(z_list, mask.complement());
    out.l_cl = out.l_p + static_cast<double>(weights.beta) * out.l_d;
    out.l_obj = out.l_ldm + static_cast<double>(weights.alpha) * out.l_cl;
    return out;
}

LossBreakdown total_objective_grad(double l_ldm, const std::vector<Tensor>& z_list,
                                   const EditMask& mask, const std::optional<GammaMatrix>& gamma,
                                   const LossWeights& weights, ClMode mode,
                                   std::vector<Tensor>& z_grads) {
    if (mode == ClMode::Soft && !gamma)
        throw std::invalid_argument("total_objective: soft mode requires a gamma matrix");
    LossBreakdown out;
    out.mode = mode;
    out.l_ldm = l_ldm;

    z_grads.assign(z_list.size(), Tensor());
    std::vector<Tensor> gd(z_list.size()), gp(z_list.size());
    out.l_d = mode == ClMode::Soft ? soft_dissimilarity_loss(z_list, mask.binary, *gamma, &gd)
                                   : dissimilarity_loss(z_list, mask.binary, &gd);
    out.l_p = preservation_loss(z_list, mask.complement(), &gp);
    out.l_cl = out.l_p + static_cast<double>(weights.beta) * out.l_d;
    out.l_obj = out.l_ldm + static_cast<double>(weights.alpha) * out.l_cl;

    double a = weights.alpha, b = weights.beta;
    for (size_t i = 0; i < z_list.size(); ++i) {
        Tensor g(z_list[i].shape());
        for (int64_t k = 0; k < g.size(); ++k)
            g[k] = static_cast<float>(a * (gp[i][k] + b * gd[i][k]));
        z_grads[i] = std::move(g);
    }
    return out;
}

} // namespace ledit
