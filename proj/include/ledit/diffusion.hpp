#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ledit/maskgen.hpp"
#include "ledit/rng.hpp"
#include "ledit/tensor.hpp"
#include "ledit/textenc.hpp"

namespace ledit {

// Linear beta schedule with cumulative alpha products. alphas_bar is indexed
// by timestep t in [0, T], with alphas_bar[0] == 1.
struct NoiseSchedule {
    int T = 256;
    std::vector<float> betas;      // betas[t-1] belongs to step t
    std::vector<float> alphas_bar; // size T+1, strictly decreasing

    static NoiseSchedule linear(int T = 256, double beta_start = 1e-4, double beta_end = 2e-2);
    float ab(int t) const { return alphas_bar[static_cast<size_t>(t)]; }
};

inline constexpr int kLatentDownsample = 2;

// Latent code: {C, H/2, W/2} with image-size metadata.
struct Latent {
    Tensor data; // {3, H', W'}
    int image_h = 0;
    int image_w = 0;
};

// 2x average pooling followed by an affine map to roughly zero-mean
// unit-scale; decode inverts the affine map and nearest-upsamples.
Latent encode_image(const Tensor& image);
Tensor decode_latent(const Latent& z);

// Noise estimation network interface. predict must be deterministic given
// parameters and inputs, and is safe to call concurrently.
class EpsilonNet {
public:
    virtual ~EpsilonNet() = default;
    virtual Tensor predict(const Tensor& z_t, int t, const PromptEmbedding& cond) const = 0;
};

struct ParamRef {
    std::string name;
    Tensor* value;
};

using Grads = std::vector<std::vector<double>>;

// Trainable extension: cached forward plus backprop producing parameter
// gradients (accumulated in double), input gradients, and conditioning
// gradients.
class TrainableEpsilonNet : public EpsilonNet {
public:
    class Trace {
    public:
        virtual ~Trace() = default;
    };
    virtual std::unique_ptr<Trace> forward(const Tensor& z_t, int t, const PromptEmbedding& cond,
                                           Tensor& out) const = 0;
    virtual void backward(const Trace& trace, const Tensor& dout, Grads& param_grads,
                          Tensor* dz = nullptr, std::vector<double>* dcond = nullptr) const = 0;
    virtual std::vector<ParamRef> parameters() = 0;

    Grads zero_grads() {
        Grads g;
        for (const auto& p : parameters()) g.emplace_back(static_cast<size_t>(p.value->size()), 0.0);
        return g;
    }
};

// z_t = sqrt(ab_t) z0 + sqrt(1 - ab_t) eps, 1 <= t <= T.
Tensor corrupt(const Tensor& z0, int t, const Tensor& eps, const NoiseSchedule& sched);

// Mean squared error between eps and the prediction on the corrupted latent.
double ldm_loss(const EpsilonNet& net, const Tensor& z0, int t, const Tensor& eps,
                const PromptEmbedding& cond, const NoiseSchedule& sched);

// Algebraic inverse of corrupt: (z_t - sqrt(1 - ab_t) eps_hat) / sqrt(ab_t).
Tensor estimate_x0(const Tensor& z_t, int t, const Tensor& eps_hat, const NoiseSchedule& sched);

Tensor gaussian_like(const Tensor& shape_like, Rng& rng);

// Ancestral denoising over `steps` sub-sampled timesteps from start_t (or T)
// down to 0. With init absent, starts from a standard-normal latent of
// image_size. With start_t == 0 and init present, returns decode(init).
// All draws derive from `seed`; repeated calls are bit-identical.
Tensor sample(const EpsilonNet& net, const NoiseSchedule& sched, const PromptEmbedding& cond,
              int steps, uint64_t seed, int image_size, const Latent* init = nullptr,
              int start_t = -1);

// Same, returning the final latent (used by tests and sample_masked).
Latent sample_latent(const EpsilonNet& net, const NoiseSchedule& sched,
                     const PromptEmbedding& cond, int steps, uint64_t seed, int image_size,
                     const Latent* init = nullptr, int start_t = -1);

// Mask-restricted editing: denoise with cond_tgt inside the mask while
// outside-mask latents are replaced by forward-noised source latents each
// step (the source latent itself at t = 0). The denoise stream of `seed`
// matches sample()'s, so a full mask reproduces sample() bit-exactly and
// outside-mask decoded pixels equal decode(init) bit-exactly.
Tensor sample_masked(const EpsilonNet& net, const NoiseSchedule& sched,
                     const PromptEmbedding& cond_src, const PromptEmbedding& cond_tgt,
                     const Latent& init, int start_t, const EditMask& mask, uint64_t seed,
                     int steps);

} // namespace ledit
