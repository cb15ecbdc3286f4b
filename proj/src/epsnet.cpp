#include "ledit/epsnet.hpp"

#include <cmath>

#include "ledit/kernels.hpp"

namespace ledit {

namespace k = ledit::kernels;

struct ConvEpsilonNet::NetTrace : public TrainableEpsilonNet::Trace {
    int t = 0;
    Tensor z;
    std::vector<float> cond;
    std::vector<float> temb;
    Tensor pre0, a0, p1, pre1, a1, p2, prem, am, cat1, pred1, ad1, cat0, pred0, ad0;
};

namespace {

void add_channel_vector(Tensor& x, const std::vector<float>& v) {
    int c = x.dim(0);
    int64_t hw = static_cast<int64_t>(x.dim(1)) * x.dim(2);
    for (int ci = 0; ci < c; ++ci) {
        float* plane = x.data() + ci * hw;
        float b = v[static_cast<size_t>(ci)];
        for (int64_t i = 0; i < hw; ++i) plane[i] += b;
    }
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    Tensor out({a.dim(0) + b.dim(0), a.dim(1), a.dim(2)});
    std::copy(a.data(), a.data() + a.size(), out.data());
    std::copy(b.data(), b.data() + b.size(), out.data() + a.size());
    return out;
}

// Per-channel spatial sum of a gradient tensor, in double.
std::vector<double> channel_sums(const Tensor& g) {
    int c = g.dim(0);
    int64_t hw = static_cast<int64_t>(g.dim(1)) * g.dim(2);
    std::vector<double> out(static_cast<size_t>(c), 0.0);
    for (int ci = 0; ci < c; ++ci) {
        const float* plane = g.data() + ci * hw;
        double acc = 0.0;
        for (int64_t i = 0; i < hw; ++i) acc += plane[i];
        out[static_cast<size_t>(ci)] = acc;
    }
    return out;
}

} // namespace

ConvEpsilonNet::ConvEpsilonNet(const Config& cfg) : cfg_(cfg) {
    int C = cfg.latent_channels, F = cfg.base_channels;
    auto make_conv = [&](int oc, int ic, Rng& rng) {
        ConvLayer l;
        l.w = Tensor({oc, ic, 3, 3});
        l.b = Tensor({oc});
        l.w.fill_normal(rng, std::sqrt(2.0f / (static_cast<float>(ic) * 9.0f)));
        return l;
    };
    Rng rng(mix_seed(cfg.init_seed, 0xe9511e7));
    conv0_ = make_conv(F, C, rng);
    conv1_ = make_conv(F, F, rng);
    convm_ = make_conv(F, F, rng);
    convd1_ = make_conv(F, 2 * F, rng);
    convd0_ = make_conv(F, 2 * F, rng);
    convh_ = make_conv(C, F, rng);
    for (auto& inj : inj_) {
        inj.wc = Tensor({F, cfg.d_text});
        inj.wt = Tensor({F, cfg.time_dim});
        inj.b = Tensor({F});
        inj.wc.fill_normal(rng, 1.0f / std::sqrt(static_cast<float>(cfg.d_text)));
        inj.wt.fill_normal(rng, 1.0f / std::sqrt(static_cast<float>(cfg.time_dim)));
    }
}

std::vector<float> ConvEpsilonNet::time_embedding(int t) const {
    int d = cfg_.time_dim;
    std::vector<float> e(static_cast<size_t>(d));
    int half = d / 2;
    for (int i = 0; i < half; ++i) {
        double freq = std::exp(-std::log(10000.0) * i / half);
        e[static_cast<size_t>(2 * i)] = static_cast<float>(std::sin(t * freq));
        e[static_cast<size_t>(2 * i + 1)] = static_cast<float>(std::cos(t * freq));
    }
    return e;
}

std::vector<float> ConvEpsilonNet::inject_vector(const Inject& inj, const std::vector<float>& cond,
                                                 const std::vector<float>& temb) const {
    int F = cfg_.base_channels;
    std::vector<float> v(static_cast<size_t>(F));
    for (int f = 0; f < F; ++f) {
        double acc = inj.b[f];
        const float* wc = inj.wc.data() + static_cast<size_t>(f) * cfg_.d_text;
        for (int i = 0; i < cfg_.d_text; ++i) acc += static_cast<double>(wc[i]) * cond[static_cast<size_t>(i)];
        const float* wt = inj.wt.data() + static_cast<size_t>(f) * cfg_.time_dim;
        for (int i = 0; i < cfg_.time_dim; ++i) acc += static_cast<double>(wt[i]) * temb[static_cast<size_t>(i)];
        v[static_cast<size_t>(f)] = static_cast<float>(acc);
    }
    return v;
}

std::unique_ptr<TrainableEpsilonNet::Trace> ConvEpsilonNet::forward(const Tensor& z_t, int t,
                                                                    const PromptEmbedding& cond,
                                                                    Tensor& out) const {
    if (z_t.shape().size() != 3 || z_t.dim(0) != cfg_.latent_channels)
        throw std::invalid_argument("epsnet: latent channel mismatch");
    int H = z_t.dim(1), W = z_t.dim(2);
    if (H % 4 || W % 4) throw std::invalid_argument("epsnet: spatial dims must be divisible by 4");
    if (static_cast<int>(cond.v.size()) != cfg_.d_text)
        throw std::invalid_argument("epsnet: conditioning dim mismatch");
    int F = cfg_.base_channels, C = cfg_.latent_channels;
    int H2 = H / 2, W2 = W / 2, H4 = H / 4, W4 = W / 4;

    auto tr = std::make_unique<NetTrace>();
    tr->t = t;
    tr->z = z_t;
    tr->cond = cond.v;
    tr->temb = time_embedding(t);

    std::vector<float> iv[5];
    for (int s = 0; s < 5; ++s) iv[s] = inject_vector(inj_[s], tr->cond, tr->temb);

    tr->pre0 = Tensor({F, H, W});
    k::conv3x3_forward(z_t.data(), C, H, W, conv0_.w.data(), conv0_.b.data(), tr->pre0.data(), F);
    add_channel_vector(tr->pre0, iv[0]);
    tr->a0 = Tensor({F, H, W});
    k::silu(tr->pre0.data(), tr->a0.data(), tr->pre0.size());

    tr->p1 = Tensor({F, H2, W2});
    k::avgpool2(tr->a0.data(), F, H, W, tr->p1.data());
    tr->pre1 = Tensor({F, H2, W2});
    k::conv3x3_forward(tr->p1.data(), F, H2, W2, conv1_.w.data(), conv1_.b.data(), tr->pre1.data(), F);
    add_channel_vector(tr->pre1, iv[1]);
    tr->a1 = Tensor({F, H2, W2});
    k::silu(tr->pre1.data(), tr->a1.data(), tr->pre1.size());

    tr->p2 = Tensor({F, H4, W4});
    k::avgpool2(tr->a1.data(), F, H2, W2, tr->p2.data());
    tr->prem = Tensor({F, H4, W4});
    k::conv3x3_forward(tr->p2.data(), F, H4, W4, convm_.w.data(), convm_.b.data(), tr->prem.data(), F);
    add_channel_vector(tr->prem, iv[2]);
    tr->am = Tensor({F, H4, W4});
    k::silu(tr->prem.data(), tr->am.data(), tr->prem.size());

    Tensor u1({F, H2, W2});
    k::upsample2(tr->am.data(), F, H4, W4, u1.data());
    tr->cat1 = concat_channels(u1, tr->a1);
    tr->pred1 = Tensor({F, H2, W2});
    k::conv3x3_forward(tr->cat1.data(), 2 * F, H2, W2, convd1_.w.data(), convd1_.b.data(),
                       tr->pred1.data(), F);
    add_channel_vector(tr->pred1, iv[3]);
    tr->ad1 = Tensor({F, H2, W2});
    k::silu(tr->pred1.data(), tr->ad1.data(), tr->pred1.size());

    Tensor u0({F, H, W});
    k::upsample2(tr->ad1.data(), F, H2, W2, u0.data());
    tr->cat0 = concat_channels(u0, tr->a0);
    tr->pred0 = Tensor({F, H, W});
    k::conv3x3_forward(tr->cat0.data(), 2 * F, H, W, convd0_.w.data(), convd0_.b.data(),
                       tr->pred0.data(), F);
    add_channel_vector(tr->pred0, iv[4]);
    tr->ad0 = Tensor({F, H, W});
    k::silu(tr->pred0.data(), tr->ad0.data(), tr->pred0.size());

    out = Tensor({C, H, W});
    k::conv3x3_forward(tr->ad0.data(), F, H, W, convh_.w.data(), convh_.b.data(), out.data(), C);
    return tr;
}

Tensor ConvEpsilonNet::predict(const Tensor& z_t, int t, const PromptEmbedding& cond) const {
    Tensor out;
    forward(z_t, t, cond, out);
    return out;
}

std::vector<ParamRef> ConvEpsilonNet::parameters() {
    std::vector<ParamRef> p;
    auto conv = [&](const char* name, ConvLayer& l) {
        p.push_back({std::string("net.") + name + ".w", &l.w});
        p.push_back({std::string("net.") + name + ".b", &l.b});
    };
    conv("conv0", conv0_);
    conv("conv1", conv1_);
    conv("convm", convm_);
    conv("convd1", convd1_);
    conv("convd0", convd0_);
    conv("convh", convh_);
    for (int s = 0; s < 5; ++s) {
        std::string base = "net.inj" + std::to_string(s);
        p.push_back({base + ".wc", &inj_[s].wc});
        p.push_back({base + ".wt", &inj_[s].wt});
        p.push_back({base + ".b", &inj_[s].b});
    }
    return p;
}

void ConvEpsilonNet::backward(const Trace& trace, const Tensor& dout, Grads& grads, Tensor* dz,
                              std::vector<double>* dcond) const {
    const auto& tr = static_cast<const NetTrace&>(trace);
    int F = cfg_.base_channels, C = cfg_.latent_channels;
    int H = tr.z.dim(1), W = tr.z.dim(2);
    int H2 = H / 2, W2 = W / 2, H4 = H / 4, W4 = W / 4;

    // Parameter indices follow the order in parameters().
    enum { kConv0 = 0, kConv1 = 2, kConvM = 4, kConvD1 = 6, kConvD0 = 8, kConvH = 10, kInj = 12 };

    auto accum_conv = [&](int slot, const Tensor& dpre, const Tensor& input, int ic) {
        std::vector<double> dw(grads[static_cast<size_t>(slot)].size());
        std::vector<double> db(grads[static_cast<size_t>(slot) + 1].size());
        k::conv3x3_backward_params(dpre.data(), dpre.dim(0), input.data(), ic, dpre.dim(1),
                                   dpre.dim(2), dw.data(), db.data());
        auto& gw = grads[static_cast<size_t>(slot)];
        auto& gb = grads[static_cast<size_t>(slot) + 1];
        for (size_t i = 0; i < dw.size(); ++i) gw[i] += dw[i];
        for (size_t i = 0; i < db.size(); ++i) gb[i] += db[i];
    };
    auto accum_inject = [&](int s, const Tensor& dpre) {
        std::vector<double> dinj = channel_sums(dpre);
        auto& gwc = grads[static_cast<size_t>(kInj + 3 * s)];
        auto& gwt = grads[static_cast<size_t>(kInj + 3 * s + 1)];
        auto& gb = grads[static_cast<size_t>(kInj + 3 * s + 2)];
        for (int f = 0; f < F; ++f) {
            gb[static_cast<size_t>(f)] += dinj[static_cast<size_t>(f)];
            for (int i = 0; i < cfg_.d_text; ++i)
                gwc[static_cast<size_t>(f) * cfg_.d_text + i] +=
                    dinj[static_cast<size_t>(f)] * tr.cond[static_cast<size_t>(i)];
            for (int i = 0; i < cfg_.time_dim; ++i)
                gwt[static_cast<size_t>(f) * cfg_.time_dim + i] +=
                    dinj[static_cast<size_t>(f)] * tr.temb[static_cast<size_t>(i)];
        }
        if (dcond) {
            for (int i = 0; i < cfg_.d_text; ++i) {
                double acc = 0.0;
                for (int f = 0; f < F; ++f)
                    acc += static_cast<double>(inj_[s].wc[static_cast<size_t>(f) * cfg_.d_text + i]) *
                           dinj[static_cast<size_t>(f)];
                (*dcond)[static_cast<size_t>(i)] += acc;
            }
        }
    };

    // Head.
    Tensor dad0({F, H, W});
    k::conv3x3_backward_input(dout.data(), C, H, W, convh_.w.data(), F, dad0.data());
    accum_conv(kConvH, dout, tr.ad0, F);

    Tensor dpred0({F, H, W});
    k::silu_backward(tr.pred0.data(), dad0.data(), dpred0.data(), dpred0.size());
    accum_inject(4, dpred0);
    Tensor dcat0({2 * F, H, W});
    k::conv3x3_backward_input(dpred0.data(), F, H, W, convd0_.w.data(), 2 * F, dcat0.data());
    accum_conv(kConvD0, dpred0, tr.cat0, 2 * F);

    // Split the concat gradient into the upsampled branch and the skip.
    Tensor du0({F, H, W}), da0_skip({F, H, W});
    std::copy(dcat0.data(), dcat0.data() + du0.size(), du0.data());
    std::copy(dcat0.data() + du0.size(), dcat0.data() + dcat0.size(), da0_skip.data());

    Tensor dad1({F, H2, W2});
    k::upsample2_backward(du0.data(), F, H2, W2, dad1.data());
    Tensor dpred1({F, H2, W2});
    k::silu_backward(tr.pred1.data(), dad1.data(), dpred1.data(), dpred1.size());
    accum_inject(3, dpred1);
    Tensor dcat1({2 * F, H2, W2});
    k::conv3x3_backward_input(dpred1.data(), F, H2, W2, convd1_.w.data(), 2 * F, dcat1.data());
    accum_conv(kConvD1, dpred1, tr.cat1, 2 * F);

    Tensor du1({F, H2, W2}), da1_skip({F, H2, W2});
    std::copy(dcat1.data(), dcat1.data() + du1.size(), du1.data());
    std::copy(dcat1.data() + du1.size(), dcat1.data() + dcat1.size(), da1_skip.data());

    Tensor dam({F, H4, W4});
    k::upsample2_backward(du1.data(), F, H4, W4, dam.data());
    Tensor dprem({F, H4, W4});
    k::silu_backward(tr.prem.data(), dam.data(), dprem.data(), dprem.size());
    accum_inject(2, dprem);
    Tensor dp2({F, H4, W4});
    k::conv3x3_backward_input(dprem.data(), F, H4, W4, convm_.w.data(), F, dp2.data());
    accum_conv(kConvM, dprem, tr.p2, F);

    Tensor da1({F, H2, W2});
    k::avgpool2_backward(dp2.data(), F, H2, W2, da1.data());
    for (int64_t i = 0; i < da1.size(); ++i) da1[i] += da1_skip[i];
    Tensor dpre1({F, H2, W2});
    k::silu_backward(tr.pre1.data(), da1.data(), dpre1.data(), dpre1.size());
    accum_inject(1, dpre1);
    Tensor dp1({F, H2, W2});
    k::conv3x3_backward_input(dpre1.data(), F, H2, W2, conv1_.w.data(), F, dp1.data());
    accum_conv(kConv1, dpre1, tr.p1, F);

    Tensor da0({F, H, W});
    k::avgpool2_backward(dp1.data(), F, H, W, da0.data());
    for (int64_t i = 0; i < da0.size(); ++i) da0[i] += da0_skip[i];
    Tensor dpre0({F, H, W});
    k::silu_backward(tr.pre0.data(), da0.data(), dpre0.data(), dpre0.size());
    accum_inject(0, dpre0);
    accum_conv(kConv0, dpre0, tr.z, C);
    if (dz) {
        *dz = Tensor({C, H, W});
        k::conv3x3_backward_input(dpre0.data(), F, H, W, conv0_.w.data(), C, dz->data());
    }
}

} // namespace ledit
