#include "ledit/maskgen.hpp"

#include <algorithm>
#include <cmath>

#include "ledit/diffusion.hpp"
#include "ledit/kernels.hpp"

namespace ledit {

Tensor EditMask::complement() const {
    Tensor out(binary.shape());
    for (int64_t i = 0; i < binary.size(); ++i) out[i] = 1.0f - binary[i];
    return out;
}

double EditMask::coverage() const {
    if (binary.empty()) return 0.0;
    double s = 0.0;
    for (int64_t i = 0; i < binary.size(); ++i) s += binary[i];
    return s / static_cast<double>(binary.size());
}

Tensor noise_differences(const std::vector<Tensor>& eps_list) {
    if (eps_list.size() < 2)
        throw std::invalid_argument("noise_differences: need at least 2 estimates");
    const auto& shape = eps_list.front().shape();
    if (shape.size() != 3) throw std::invalid_argument("noise_differences: estimates must be {C,H,W}");
    for (const auto& e : eps_list)
        if (e.shape() != shape) throw std::invalid_argument("noise_differences: shape mismatch");
    int c = shape[0], h = shape[1], w = shape[2];
    std::vector<const float*> ptrs;
    ptrs.reserve(eps_list.size());
    for (const auto& e : eps_list) ptrs.push_back(e.data());
    Tensor delta({h, w});
    kernels::pairwise_absdiff_mean(ptrs.data(), static_cast<int>(eps_list.size()), c, h, w,
                                   delta.data());
    return delta;
}

EditMask binarize(const Tensor& raw, float threshold_frac) {
    if (threshold_frac <= 0.0f || threshold_frac >= 1.0f)
        throw std::invalid_argument("binarize: threshold_frac must be in (0,1)");
    for (int64_t i = 0; i < raw.size(); ++i)
        if (!std::isfinite(raw[i])) throw std::invalid_argument("binarize: raw map must be finite");
    EditMask mask;
    mask.raw = raw;
    mask.threshold_frac = threshold_frac;
    mask.binary = Tensor(raw.shape());
    float lo = raw[0], hi = raw[0];
    for (int64_t i = 0; i < raw.size(); ++i) {
        lo = std::min(lo, raw[i]);
        hi = std::max(hi, raw[i]);
    }
    if (hi <= lo) return mask; // degenerate range: all-zero mask
    float range = hi - lo;
    for (int64_t i = 0; i < raw.size(); ++i)
        mask.binary[i] = (raw[i] - lo) / range >= threshold_frac ? 1.0f : 0.0f;
    return mask;
}

EditMask make_mask(const EpsilonNet& net, const Tensor& z_t, int t,
                   const std::vector<PromptEmbedding>& cond_list, float threshold_frac) {
    if (cond_list.size() < 2)
        throw std::invalid_argument("make_mask: need at least 2 conditionings");
    std::vector<Tensor> eps_list;
    eps_list.reserve(cond_list.size());
    for (const auto& cond : cond_list) eps_list.push_back(net.predict(z_t, t, cond));
    return binarize(noise_differences(eps_list), threshold_frac);
}

Tensor upsample_mask(const Tensor& binary, int image_h, int image_w) {
    int lh = binary.dim(0), lw = binary.dim(1);
    Tensor out({image_h, image_w});
    for (int y = 0; y < image_h; ++y)
        for (int x = 0; x < image_w; ++x)
            out.at(y, x) = binary.at(y * lh / image_h, x * lw / image_w);
    return out;
}

} // namespace ledit
