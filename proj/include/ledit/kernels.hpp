#pragma once

#include <cstdint>

namespace ledit::kernels {

// OpenMP-parallel compute kernels. All kernels assign each output element to
// exactly one thread with a fixed inner summation order, and scalar
// reductions go through fixed-size block partial sums, so results are
// bit-identical regardless of thread count. Serial reference
// implementations for testing live in ledit::kernels::ref.

// 3x3 convolution with zero padding, stride 1, CHW layout.
// in:   ic * h * w,  wgt: oc * ic * 3 * 3,  bias: oc,  out: oc * h * w
void conv3x3_forward(const float* in, int ic, int h, int w,
                     const float* wgt, const float* bias,
                     float* out, int oc);

// Gradient w.r.t. the convolution input. din is overwritten.
void conv3x3_backward_input(const float* dout, int oc, int h, int w,
                            const float* wgt, int ic, float* din);

// Gradients w.r.t. weights and bias. dwgt/dbias are accumulated in double
// and written (overwritten) as double.
void conv3x3_backward_params(const float* dout, int oc, const float* in, int ic,
                             int h, int w, double* dwgt, double* dbias);

// 2x2 average pooling, CHW. out: c * (h/2) * (w/2). h and w must be even.
void avgpool2(const float* in, int c, int h, int w, float* out);
void avgpool2_backward(const float* dout, int c, int h, int w, float* din);

// 2x nearest-neighbour upsampling, CHW. out: c * 2h * 2w.
void upsample2(const float* in, int c, int h, int w, float* out);
void upsample2_backward(const float* dout, int c, int h, int w, float* din);

// SiLU x * sigmoid(x), elementwise.
void silu(const float* in, float* out, int64_t n);
// din = dout * silu'(in); overwritten.
void silu_backward(const float* in, const float* dout, float* din, int64_t n);

// Mean over unique pairs of |eps_i - eps_j|, averaged over channels to one
// spatial map. est: array of n_est pointers, each c*h*w. delta: h*w.
void pairwise_absdiff_mean(const float* const* est, int n_est,
                           int c, int h, int w, float* delta);

// Sum over channels and mask-selected spatial positions of (a-b)^2.
// mask: h*w of 0/1 bytes. Returns a double accumulated block-wise.
double masked_sq_diff_sum(const float* a, const float* b, const uint8_t* mask,
                          int c, int h, int w);

// Plain sum of squared differences over n elements.
double sq_diff_sum(const float* a, const float* b, int64_t n);

// Per-pixel SSIM map with a uniform win x win window (clipped at borders),
// channel-interleaved images a,b of shape h*w*ch in [0,1], dynamic range 1.
// map: h*w, mean of per-channel SSIM at each pixel.
void ssim_map(const float* a, const float* b, int h, int w, int ch,
              int win, float k1, float k2, float* map);

namespace ref {

// Serial reference implementations (naive loops, no OpenMP).
void conv3x3_forward(const float* in, int ic, int h, int w,
                     const float* wgt, const float* bias,
                     float* out, int oc);
void conv3x3_backward_input(const float* dout, int oc, int h, int w,
                            const float* wgt, int ic, float* din);
void conv3x3_backward_params(const float* dout, int oc, const float* in, int ic,
                             int h, int w, double* dwgt, double* dbias);
void avgpool2(const float* in, int c, int h, int w, float* out);
void avgpool2_backward(const float* dout, int c, int h, int w, float* din);
void upsample2(const float* in, int c, int h, int w, float* out);
void upsample2_backward(const float* dout, int c, int h, int w, float* din);
void silu(const float* in, float* out, int64_t n);
void silu_backward(const float* in, const float* dout, float* din, int64_t n);
void pairwise_absdiff_mean(const float* const* est, int n_est,
                           int c, int h, int w, float* delta);
double masked_sq_diff_sum(const float* a, const float* b, const uint8_t* mask,
                          int c, int h, int w);
double sq_diff_sum(const float* a, const float* b, int64_t n);
void ssim_map(const float* a, const float* b, int h, int w, int ch,
              int win, float k1, float k2, float* map);

} // namespace ref

} // namespace ledit::kernels
