#include "ledit/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ledit::kernels {

namespace {

inline float sigmoidf(float x) { return 1.0f / (1.0f + std::exp(-x)); }

// One output pixel of a 3x3 zero-padded convolution. Fixed summation order:
// input channel, then kernel row, then kernel column, accumulated in double.
inline double conv_pixel(const float* in, int ic, int h, int w,
                         const float* wk, int y, int x) {
    double acc = 0.0;
    for (int c = 0; c < ic; ++c) {
        const float* plane = in + static_cast<size_t>(c) * h * w;
        const float* k = wk + c * 9;
        for (int dy = -1; dy <= 1; ++dy) {
            int yy = y + dy;
            if (yy < 0 || yy >= h) continue;
            const float* row = plane + static_cast<size_t>(yy) * w;
            const float* kr = k + (dy + 1) * 3;
            for (int dx = -1; dx <= 1; ++dx) {
                int xx = x + dx;
                if (xx < 0 || xx >= w) continue;
                acc += static_cast<double>(row[xx]) * kr[dx + 1];
            }
        }
    }
    return acc;
}

constexpr int kReduceBlocks = 256;

} // namespace

void conv3x3_forward(const float* in, int ic, int h, int w,
                     const float* wgt, const float* bias,
                     float* out, int oc) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int o = 0; o < oc; ++o) {
        for (int y = 0; y < h; ++y) {
            const float* wk = wgt + static_cast<size_t>(o) * ic * 9;
            float* orow = out + (static_cast<size_t>(o) * h + y) * w;
            for (int x = 0; x < w; ++x)
                orow[x] = static_cast<float>(conv_pixel(in, ic, h, w, wk, y, x) + bias[o]);
        }
    }
}

void conv3x3_backward_input(const float* dout, int oc, int h, int w,
                            const float* wgt, int ic, float* din) {
    // Gather form: din(c,y,x) = sum_o sum_k dout(o, y-dy, x-dx) * w(o,c,dy,dx).
#pragma omp parallel for collapse(2) schedule(static)
    for (int c = 0; c < ic; ++c) {
        for (int y = 0; y < h; ++y) {
            float* drow = din + (static_cast<size_t>(c) * h + y) * w;
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int o = 0; o < oc; ++o) {
                    const float* plane = dout + static_cast<size_t>(o) * h * w;
                    const float* k = wgt + (static_cast<size_t>(o) * ic + c) * 9;
                    for (int dy = -1; dy <= 1; ++dy) {
                        int yy = y - dy;
                        if (yy < 0 || yy >= h) continue;
                        const float* row = plane + static_cast<size_t>(yy) * w;
                        const float* kr = k + (dy + 1) * 3;
                        for (int dx = -1; dx <= 1; ++dx) {
                            int xx = x - dx;
                            if (xx < 0 || xx >= w) continue;
                            acc += static_cast<double>(row[xx]) * kr[dx + 1];
                        }
                    }
                }
                drow[x] = static_cast<float>(acc);
            }
        }
    }
}

void conv3x3_backward_params(const float* dout, int oc, const float* in, int ic,
                             int h, int w, double* dwgt, double* dbias) {
    // Each thread owns one output channel's weight slice; no races.
#pragma omp parallel for schedule(static)
    for (int o = 0; o < oc; ++o) {
        const float* dplane = dout + static_cast<size_t>(o) * h * w;
        double* dwo = dwgt + static_cast<size_t>(o) * ic * 9;
        std::fill(dwo, dwo + static_cast<size_t>(ic) * 9, 0.0);
        double db = 0.0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double g = dplane[static_cast<size_t>(y) * w + x];
                db += g;
                for (int c = 0; c < ic; ++c) {
                    const float* plane = in + static_cast<size_t>(c) * h * w;
                    double* k = dwo + c * 9;
                    for (int dy = -1; dy <= 1; ++dy) {
                        int yy = y + dy;
                        if (yy < 0 || yy >= h) continue;
                        const float* row = plane + static_cast<size_t>(yy) * w;
                        double* kr = k + (dy + 1) * 3;
                        for (int dx = -1; dx <= 1; ++dx) {
                            int xx = x + dx;
                            if (xx < 0 || xx >= w) continue;
                            kr[dx + 1] += g * row[xx];
                        }
                    }
                }
            }
        }
        dbias[o] = db;
    }
}

void avgpool2(const float* in, int c, int h, int w, float* out) {
    int oh = h / 2, ow = w / 2;
#pragma omp parallel for collapse(2) schedule(static)
    for (int ci = 0; ci < c; ++ci) {
        for (int y = 0; y < oh; ++y) {
            const float* p0 = in + (static_cast<size_t>(ci) * h + 2 * y) * w;
            const float* p1 = p0 + w;
            float* orow = out + (static_cast<size_t>(ci) * oh + y) * ow;
            for (int x = 0; x < ow; ++x)
                orow[x] = 0.25f * (p0[2 * x] + p0[2 * x + 1] + p1[2 * x] + p1[2 * x + 1]);
        }
    }
}

void avgpool2_backward(const float* dout, int c, int h, int w, float* din) {
    int oh = h / 2, ow = w / 2;
#pragma omp parallel for collapse(2) schedule(static)
    for (int ci = 0; ci < c; ++ci) {
        for (int y = 0; y < h; ++y) {
            const float* drow = dout + (static_cast<size_t>(ci) * oh + y / 2) * ow;
            float* irow = din + (static_cast<size_t>(ci) * h + y) * w;
            for (int x = 0; x < w; ++x) irow[x] = 0.25f * drow[x / 2];
        }
    }
}

void upsample2(const float* in, int c, int h, int w, float* out) {
    int oh = 2 * h, ow = 2 * w;
#pragma omp parallel for collapse(2) schedule(static)
    for (int ci = 0; ci < c; ++ci) {
        for (int y = 0; y < oh; ++y) {
            const float* irow = in + (static_cast<size_t>(ci) * h + y / 2) * w;
            float* orow = out + (static_cast<size_t>(ci) * oh + y) * ow;
            for (int x = 0; x < ow; ++x) orow[x] = irow[x / 2];
        }
    }
}

void upsample2_backward(const float* dout, int c, int h, int w, float* din) {
    int oh = 2 * h, ow = 2 * w;
#pragma omp parallel for collapse(2) schedule(static)
    for (int ci = 0; ci < c; ++ci) {
        for (int y = 0; y < h; ++y) {
            float* irow = din + (static_cast<size_t>(ci) * h + y) * w;
            const float* d0 = dout + (static_cast<size_t>(ci) * oh + 2 * y) * ow;
            const float* d1 = d0 + ow;
            for (int x = 0; x < w; ++x)
                irow[x] = d0[2 * x] + d0[2 * x + 1] + d1[2 * x] + d1[2 * x + 1];
        }
    }
}

void silu(const float* in, float* out, int64_t n) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) out[i] = in[i] * sigmoidf(in[i]);
}

void silu_backward(const float* in, const float* dout, float* din, int64_t n) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) {
        float s = sigmoidf(in[i]);
        din[i] = dout[i] * (s * (1.0f + in[i] * (1.0f - s)));
    }
}

void pairwise_absdiff_mean(const float* const* est, int n_est,
                           int c, int h, int w, float* delta) {
    int64_t hw = static_cast<int64_t>(h) * w;
    double inv = 1.0 / (static_cast<double>(n_est) * (n_est - 1) / 2 * c);
#pragma omp parallel for schedule(static)
    for (int64_t s = 0; s < hw; ++s) {
        double acc = 0.0;
        for (int i = 0; i < n_est; ++i) {
            for (int j = i + 1; j < n_est; ++j) {
                for (int ci = 0; ci < c; ++ci) {
                    int64_t idx = ci * hw + s;
                    acc += std::fabs(static_cast<double>(est[i][idx]) - est[j][idx]);
                }
            }
        }
        delta[s] = static_cast<float>(acc * inv);
    }
}

double masked_sq_diff_sum(const float* a, const float* b, const uint8_t* mask,
                          int c, int h, int w) {
    int64_t hw = static_cast<int64_t>(h) * w;
    double partial[kReduceBlocks] = {0.0};
    int64_t chunk = (hw + kReduceBlocks - 1) / kReduceBlocks;
#pragma omp parallel for schedule(static)
    for (int blk = 0; blk < kReduceBlocks; ++blk) {
        int64_t lo = blk * chunk;
        int64_t hi = std::min(hw, lo + chunk);
        double acc = 0.0;
        for (int64_t s = lo; s < hi; ++s) {
            if (!mask[s]) continue;
            for (int ci = 0; ci < c; ++ci) {
                int64_t idx = ci * hw + s;
                double d = static_cast<double>(a[idx]) - b[idx];
                acc += d * d;
            }
        }
        partial[blk] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

double sq_diff_sum(const float* a, const float* b, int64_t n) {
    double partial[kReduceBlocks] = {0.0};
    int64_t chunk = (n + kReduceBlocks - 1) / kReduceBlocks;
#pragma omp parallel for schedule(static)
    for (int blk = 0; blk < kReduceBlocks; ++blk) {
        int64_t lo = blk * chunk;
        int64_t hi = std::min(n, lo + chunk);
        double acc = 0.0;
        for (int64_t i = lo; i < hi; ++i) {
            double d = static_cast<double>(a[i]) - b[i];
            acc += d * d;
        }
        partial[blk] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

void ssim_map(const float* a, const float* b, int h, int w, int ch,
              int win, float k1, float k2, float* map) {
    int r = win / 2;
    double c1 = static_cast<double>(k1) * k1;
    double c2 = static_cast<double>(k2) * k2;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r);
        for (int x = 0; x < w; ++x) {
            int x0 = std::max(0, x - r), x1 = std::min(w - 1, x + r);
            double n = static_cast<double>(y1 - y0 + 1) * (x1 - x0 + 1);
            double ssim_sum = 0.0;
            for (int c = 0; c < ch; ++c) {
                double ma = 0.0, mb = 0.0;
                for (int yy = y0; yy <= y1; ++yy) {
                    const float* ra = a + (static_cast<size_t>(yy) * w + x0) * ch + c;
                    const float* rb = b + (static_cast<size_t>(yy) * w + x0) * ch + c;
                    for (int xx = 0; xx <= x1 - x0; ++xx) {
                        ma += ra[xx * ch];
                        mb += rb[xx * ch];
                    }
                }
                ma /= n;
                mb /= n;
                double va = 0.0, vb = 0.0, cov = 0.0;
                for (int yy = y0; yy <= y1; ++yy) {
                    const float* ra = a + (static_cast<size_t>(yy) * w + x0) * ch + c;
                    const float* rb = b + (static_cast<size_t>(yy) * w + x0) * ch + c;
                    for (int xx = 0; xx <= x1 - x0; ++xx) {
                        double da = ra[xx * ch] - ma;
                        double db = rb[xx * ch] - mb;
                        va += da * da;
                        vb += db * db;
                        cov += da * db;
                    }
                }
                va /= n;
                vb /= n;
                cov /= n;
                double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
                double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
                ssim_sum += num / den;
            }
            map[static_cast<size_t>(y) * w + x] = static_cast<float>(ssim_sum / ch);
        }
    }
}

} // namespace ledit::kernels
