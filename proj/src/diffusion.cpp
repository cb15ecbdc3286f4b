#include "ledit/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "ledit/kernels.hpp"

namespace ledit {

namespace {
constexpr uint64_t kDenoiseStream = 0xd390;
constexpr uint64_t kReplaceStream = 0x4e91;
} // namespace

NoiseSchedule NoiseSchedule::linear(int T, double beta_start, double beta_end) {
    NoiseSchedule s;
    s.T = T;
    s.betas.resize(static_cast<size_t>(T));
    s.alphas_bar.resize(static_cast<size_t>(T) + 1);
    s.alphas_bar[0] = 1.0f;
    double prod = 1.0;
    for (int t = 1; t <= T; ++t) {
        double beta = T == 1 ? beta_start
                             : beta_start + (beta_end - beta_start) * (t - 1) / (T - 1);
        s.betas[static_cast<size_t>(t - 1)] = static_cast<float>(beta);
        prod *= 1.0 - beta;
        s.alphas_bar[static_cast<size_t>(t)] = static_cast<float>(prod);
    }
    return s;
}

Latent encode_image(const Tensor& image) {
    if (image.shape().size() != 3 || image.dim(2) != 3)
        throw std::invalid_argument("encode_image expects {H,W,3}");
    int h = image.dim(0), w = image.dim(1);
    if (h % 2 || w % 2) throw std::invalid_argument("encode_image: size must be even");
    int lh = h / kLatentDownsample, lw = w / kLatentDownsample;
    Latent z;
    z.image_h = h;
    z.image_w = w;
    z.data = Tensor({3, lh, lw});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < lh; ++y)
            for (int x = 0; x < lw; ++x) {
                float s = image[((static_cast<int64_t>(2 * y) * w) + 2 * x) * 3 + c] +
                          image[((static_cast<int64_t>(2 * y) * w) + 2 * x + 1) * 3 + c] +
                          image[((static_cast<int64_t>(2 * y + 1) * w) + 2 * x) * 3 + c] +
                          image[((static_cast<int64_t>(2 * y + 1) * w) + 2 * x + 1) * 3 + c];
                z.data.at(c, y, x) = 2.0f * (0.25f * s - 0.5f);
            }
    return z;
}

Tensor decode_latent(const Latent& z) {
    if (z.data.shape().size() != 3 || z.data.dim(0) != 3)
        throw std::invalid_argument("decode_latent expects {3,H',W'}");
    int lh = z.data.dim(1), lw = z.data.dim(2);
    int h = lh * kLatentDownsample, w = lw * kLatentDownsample;
    Tensor img({h, w, 3});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img[(static_cast<int64_t>(y) * w + x) * 3 + c] =
                    0.5f * z.data.at(c, y / 2, x / 2) + 0.5f;
    return img;
}

Tensor corrupt(const Tensor& z0, int t, const Tensor& eps, const NoiseSchedule& sched) {
    if (t < 1 || t > sched.T) throw std::invalid_argument("corrupt: t out of range");
    if (!z0.same_shape(eps)) throw std::invalid_argument("corrupt: eps shape mismatch");
    float a = std::sqrt(sched.ab(t));
    float b = std::sqrt(1.0f - sched.ab(t));
    Tensor out(z0.shape());
    for (int64_t i = 0; i < z0.size(); ++i) out[i] = a * z0[i] + b * eps[i];
    return out;
}

double ldm_loss(const EpsilonNet& net, const Tensor& z0, int t, const Tensor& eps,
                const PromptEmbedding& cond, const NoiseSchedule& sched) {
    Tensor z_t = corrupt(z0, t, eps, sched);
    Tensor eps_hat = net.predict(z_t, t, cond);
    return kernels::sq_diff_sum(eps.data(), eps_hat.data(), eps.size()) /
           static_cast<double>(eps.size());
}

Tensor estimate_x0(const Tensor& z_t, int t, const Tensor& eps_hat, const NoiseSchedule& sched) {
    if (t < 1 || t > sched.T) throw std::invalid_argument("estimate_x0: t out of range");
    float a = std::sqrt(sched.ab(t));
    float b = std::sqrt(1.0f - sched.ab(t));
    Tensor out(z_t.shape());
    for (int64_t i = 0; i < z_t.size(); ++i) out[i] = (z_t[i] - b * eps_hat[i]) / a;
    return out;
}

Tensor gaussian_like(const Tensor& shape_like, Rng& rng) {
    Tensor out(shape_like.shape());
    for (int64_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(rng.normal());
    return out;
}

namespace {

std::vector<int> step_grid(int start_t, int steps) {
    std::vector<int> grid;
    grid.push_back(start_t);
    for (int k = 1; k <= steps; ++k) {
        int t = static_cast<int>(std::lround(static_cast<double>(start_t) * (steps - k) / steps));
        if (t < grid.back()) grid.push_back(t);
    }
    if (grid.back() != 0) grid.push_back(0);
    return grid;
}

// One ancestral update from t_cur to t_next given the prediction.
void denoise_update(Tensor& z, const Tensor& eps_hat, int t_cur, int t_next,
                    const NoiseSchedule& sched, Rng& rng) {
    float ab_c = sched.ab(t_cur);
    float sq_ab_c = std::sqrt(ab_c);
    float sq1m_c = std::sqrt(1.0f - ab_c);
    if (t_next == 0) {
        for (int64_t i = 0; i < z.size(); ++i) z[i] = (z[i] - sq1m_c * eps_hat[i]) / sq_ab_c;
        return;
    }
    float ab_n = sched.ab(t_next);
    double sigma2 = (1.0 - ab_n) / (1.0 - ab_c) * (1.0 - ab_c / ab_n);
    sigma2 = std::max(0.0, sigma2);
    float sigma = static_cast<float>(std::sqrt(sigma2));
    float coef_eps = static_cast<float>(std::sqrt(std::max(0.0, 1.0 - ab_n - sigma2)));
    float sq_ab_n = std::sqrt(ab_n);
    for (int64_t i = 0; i < z.size(); ++i) {
        float x0 = (z[i] - sq1m_c * eps_hat[i]) / sq_ab_c;
        z[i] = sq_ab_n * x0 + coef_eps * eps_hat[i] +
               sigma * static_cast<float>(rng.normal());
    }
}

} // namespace

Latent sample_latent(const EpsilonNet& net, const NoiseSchedule& sched,
                     const PromptEmbedding& cond, int steps, uint64_t seed, int image_size,
                     const Latent* init, int start_t) {
    if (init && start_t < 0)
        throw std::invalid_argument("sample: start_t required when init is given");
    if (start_t > sched.T) throw std::invalid_argument("sample: start_t > T");
    if (steps < 1) throw std::invalid_argument("sample: steps must be >= 1");

    Rng rng = substream(seed, kDenoiseStream);
    Latent z;
    if (init) {
        z = *init;
        if (start_t == 0) return z;
        Tensor eps = gaussian_like(z.data, rng);
        z.data = corrupt(z.data, start_t, eps, sched);
    } else {
        if (start_t < 0) start_t = sched.T;
        int lat = image_size / kLatentDownsample;
        z.image_h = z.image_w = image_size;
        z.data = Tensor({3, lat, lat});
        z.data = gaussian_like(z.data, rng);
    }

    std::vector<int> grid = step_grid(start_t, steps);
    for (size_t k = 0; k + 1 < grid.size(); ++k) {
        Tensor eps_hat = net.predict(z.data, grid[k], cond);
        denoise_update(z.data, eps_hat, grid[k], grid[k + 1], sched, rng);
    }
    return z;
}

Tensor sample(const EpsilonNet& net, const NoiseSchedule& sched, const PromptEmbedding& cond,
              int steps, uint64_t seed, int image_size, const Latent* init, int start_t) {
    return decode_latent(sample_latent(net, sched, cond, steps, seed, image_size, init, start_t));
}

Tensor sample_masked(const EpsilonNet& net, const NoiseSchedule& sched,
                     const PromptEmbedding& cond_src, const PromptEmbedding& cond_tgt,
                     const Latent& init, int start_t, const EditMask& mask, uint64_t seed,
                     int steps) {
    (void)cond_src; // the source enters through the replacement latents
    if (mask.binary.shape().size() != 2 || mask.binary.dim(0) != init.data.dim(1) ||
        mask.binary.dim(1) != init.data.dim(2))
        throw std::invalid_argument("sample_masked: mask shape mismatch");
    if (start_t < 0 || start_t > sched.T)
        throw std::invalid_argument("sample_masked: start_t out of range");

    Rng rng_d = substream(seed, kDenoiseStream);
    Rng rng_r = substream(seed, kReplaceStream);

    Latent z = init;
    if (start_t == 0) return decode_latent(init);
    Tensor eps = gaussian_like(z.data, rng_d);
    z.data = corrupt(z.data, start_t, eps, sched);

    int lh = init.data.dim(1), lw = init.data.dim(2);
    int64_t hw = static_cast<int64_t>(lh) * lw;
    std::vector<int> grid = step_grid(start_t, steps);
    for (size_t k = 0; k + 1 < grid.size(); ++k) {
        Tensor eps_hat = net.predict(z.data, grid[k], cond_tgt);
        denoise_update(z.data, eps_hat, grid[k], grid[k + 1], sched, rng_d);
        int t_next = grid[k + 1];
        Tensor repl = t_next == 0 ? init.data
                                  : corrupt(init.data, t_next, gaussian_like(init.data, rng_r), sched);
        for (int c = 0; c < 3; ++c)
            for (int64_t s = 0; s < hw; ++s) {
                if (mask.binary[s] == 0.0f) z.data[c * hw + s] = repl[c * hw + s];
            }
    }
    return decode_latent(z);
}

} // namespace ledit
