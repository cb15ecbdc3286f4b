#pragma once

#include "ledit/diffusion.hpp"

namespace ledit {

// Default noise-prediction network: a small U-shaped convolutional net with
// two down and two up stages and skip connections. The conditioning vector
// and a sinusoidal timestep embedding are injected at every stage through
// learned linear projections added to the pre-activation channels. The
// architecture is a documented default, not a contract.
class ConvEpsilonNet : public TrainableEpsilonNet {
public:
    struct Config {
        int latent_channels = 3;
        int base_channels = 8;
        int d_text = 64;
        int time_dim = 16;
        uint64_t init_seed = 1;
    };

    explicit ConvEpsilonNet(const Config& cfg);

    Tensor predict(const Tensor& z_t, int t, const PromptEmbedding& cond) const override;
    std::unique_ptr<Trace> forward(const Tensor& z_t, int t, const PromptEmbedding& cond,
                                   Tensor& out) const override;
    void backward(const Trace& trace, const Tensor& dout, Grads& param_grads, Tensor* dz,
                  std::vector<double>* dcond) const override;
    std::vector<ParamRef> parameters() override;

    const Config& config() const { return cfg_; }
    std::vector<float> time_embedding(int t) const;

private:
    struct ConvLayer {
        Tensor w; // {oc, ic, 3, 3}
        Tensor b; // {oc}
    };
    struct Inject {
        Tensor wc; // {F, d_text}
        Tensor wt; // {F, time_dim}
        Tensor b;  // {F}
    };

    struct NetTrace;

    std::vector<float> inject_vector(const Inject& inj, const std::vector<float>& cond,
                                     const std::vector<float>& temb) const;

    Config cfg_;
    ConvLayer conv0_, conv1_, convm_, convd1_, convd0_, convh_;
    Inject inj_[5];
};

} // namespace ledit
