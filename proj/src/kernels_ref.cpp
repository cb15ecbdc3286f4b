#include "ledit/kernels.hpp"

#include <algorithm>
#include <cmath>

// Naive serial versions, kept deliberately literal so that kernel tests and
// the benchmark compare against an independent implementation.

namespace ledit::kernels::ref {

namespace {
inline size_t idx3(int c, int y, int x, int h, int w) {
    return (static_cast<size_t>(c) * h + y) * w + x;
}
} // namespace

void conv3x3_forward(const float* in, int ic, int h, int w,
                     const float* wgt, const float* bias,
                     float* out, int oc) {
    for (int o = 0; o < oc; ++o)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int c = 0; c < ic; ++c)
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            int yy = y + dy, xx = x + dx;
                            if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                            acc += static_cast<double>(in[idx3(c, yy, xx, h, w)]) *
                                   wgt[((static_cast<size_t>(o) * ic + c) * 3 + dy + 1) * 3 + dx + 1];
                        }
                out[idx3(o, y, x, h, w)] = static_cast<float>(acc + bias[o]);
            }
}

void conv3x3_backward_input(const float* dout, int oc, int h, int w,
                            const float* wgt, int ic, float* din) {
    std::fill(din, din + static_cast<size_t>(ic) * h * w, 0.0f);
    for (int o = 0; o < oc; ++o)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                float g = dout[idx3(o, y, x, h, w)];
                for (int c = 0; c < ic; ++c)
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            int yy = y + dy, xx = x + dx;
                            if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                            din[idx3(c, yy, xx, h, w)] +=
                                g * wgt[((static_cast<size_t>(o) * ic + c) * 3 + dy + 1) * 3 + dx + 1];
                        }
            }
}

void conv3x3_backward_params(const float* dout, int oc, const float* in, int ic,
                             int h, int w, double* dwgt, double* dbias) {
    std::fill(dwgt, dwgt + static_cast<size_t>(oc) * ic * 9, 0.0);
    std::fill(dbias, dbias + oc, 0.0);
    for (int o = 0; o < oc; ++o)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double g = dout[idx3(o, y, x, h, w)];
                dbias[o] += g;
                for (int c = 0; c < ic; ++c)
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dx = -1; dx <= 1; ++dx) {
                            int yy = y + dy, xx = x + dx;
                            if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                            dwgt[((static_cast<size_t>(o) * ic + c) * 3 + dy + 1) * 3 + dx + 1] +=
                                g * in[idx3(c, yy, xx, h, w)];
                        }
            }
}

void avgpool2(const float* in, int c, int h, int w, float* out) {
    int oh = h / 2, ow = w / 2;
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x)
                out[idx3(ci, y, x, oh, ow)] =
                    0.25f * (in[idx3(ci, 2 * y, 2 * x, h, w)] + in[idx3(ci, 2 * y, 2 * x + 1, h, w)] +
                             in[idx3(ci, 2 * y + 1, 2 * x, h, w)] + in[idx3(ci, 2 * y + 1, 2 * x + 1, h, w)]);
}

void avgpool2_backward(const float* dout, int c, int h, int w, float* din) {
    int oh = h / 2, ow = w / 2;
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                din[idx3(ci, y, x, h, w)] = 0.25f * dout[idx3(ci, y / 2, x / 2, oh, ow)];
}

void upsample2(const float* in, int c, int h, int w, float* out) {
    int oh = 2 * h, ow = 2 * w;
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x)
                out[idx3(ci, y, x, oh, ow)] = in[idx3(ci, y / 2, x / 2, h, w)];
}

void upsample2_backward(const float* dout, int c, int h, int w, float* din) {
    int oh = 2 * h, ow = 2 * w;
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                float acc = 0.0f;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx)
                        acc += dout[idx3(ci, 2 * y + dy, 2 * x + dx, oh, ow)];
                din[idx3(ci, y, x, h, w)] = acc;
            }
}

void silu(const float* in, float* out, int64_t n) {
    for (int64_t i = 0; i < n; ++i) out[i] = in[i] / (1.0f + std::exp(-in[i]));
}

void silu_backward(const float* in, const float* dout, float* din, int64_t n) {
    for (int64_t i = 0; i < n; ++i) {
        float s = 1.0f / (1.0f + std::exp(-in[i]));
        din[i] = dout[i] * (s + in[i] * s * (1.0f - s));
    }
}

void pairwise_absdiff_mean(const float* const* est, int n_est,
                           int c, int h, int w, float* delta) {
    int64_t hw = static_cast<int64_t>(h) * w;
    int np = n_est * (n_est - 1) / 2;
    for (int64_t s = 0; s < hw; ++s) delta[s] = 0.0f;
    for (int i = 0; i < n_est; ++i)
        for (int j = i + 1; j < n_est; ++j)
            for (int ci = 0; ci < c; ++ci)
                for (int64_t s = 0; s < hw; ++s)
                    delta[s] += std::fabs(est[i][ci * hw + s] - est[j][ci * hw + s]) /
                                (static_cast<float>(np) * c);
    // Accumulated in float on purpose: this is the naive formulation.
}

double masked_sq_diff_sum(const float* a, const float* b, const uint8_t* mask,
                          int c, int h, int w) {
    int64_t hw = static_cast<int64_t>(h) * w;
    double acc = 0.0;
    for (int ci = 0; ci < c; ++ci)
        for (int64_t s = 0; s < hw; ++s)
            if (mask[s]) {
                double d = static_cast<double>(a[ci * hw + s]) - b[ci * hw + s];
                acc += d * d;
            }
    return acc;
}

double sq_diff_sum(const float* a, const float* b, int64_t n) {
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) {
        double d = static_cast<double>(a[i]) - b[i];
        acc += d * d;
    }
    return acc;
}

void ssim_map(const float* a, const float* b, int h, int w, int ch,
              int win, float k1, float k2, float* map) {
    int r = win / 2;
    double c1 = static_cast<double>(k1) * k1;
    double c2 = static_cast<double>(k2) * k2;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double total = 0.0;
            for (int c = 0; c < ch; ++c) {
                double ma = 0, mb = 0, n = 0;
                for (int yy = y - r; yy <= y + r; ++yy)
                    for (int xx = x - r; xx <= x + r; ++xx) {
                        if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                        ma += a[(static_cast<size_t>(yy) * w + xx) * ch + c];
                        mb += b[(static_cast<size_t>(yy) * w + xx) * ch + c];
                        n += 1.0;
                    }
                ma /= n;
                mb /= n;
                double va = 0, vb = 0, cov = 0;
                for (int yy = y - r; yy <= y + r; ++yy)
                    for (int xx = x - r; xx <= x + r; ++xx) {
                        if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                        double da = a[(static_cast<size_t>(yy) * w + xx) * ch + c] - ma;
                        double db = b[(static_cast<size_t>(yy) * w + xx) * ch + c] - mb;
                        va += da * da;
                        vb += db * db;
                        cov += da * db;
                    }
                va /= n;
                vb /= n;
                cov /= n;
                total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                         ((ma * ma + mb * mb + c1) * (va + vb + c2));
            }
            map[static_cast<size_t>(y) * w + x] = static_cast<float>(total / ch);
        }
}

} // namespace ledit::kernels::ref
