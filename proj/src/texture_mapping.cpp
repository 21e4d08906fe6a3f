#include "nvr/texture_mapping.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "nvr/errors.hpp"

namespace nvr {

namespace {

std::atomic<std::int64_t> g_clamped{0};

// Bilinear tap positions/weights along one axis for a clamped unit coordinate.
template <typename scalar_t>
struct Axis {
  int i0 = 0;
  int i1 = 0;
  scalar_t frac = 0;
  bool inside = true;  // false when the coordinate was clamped

  Axis(scalar_t t, int resolution) {
    const scalar_t clamped = std::clamp(t, scalar_t(0), scalar_t(1));
    inside = clamped == t;
    if (resolution == 1) return;
    const scalar_t pos = clamped * scalar_t(resolution - 1);
    i0 = std::min(static_cast<int>(std::floor(pos)), resolution - 2);
    i1 = i0 + 1;
    frac = pos - scalar_t(i0);
  }
};

template <typename scalar_t>
void sample_forward_kernel(const torch::Tensor& texture, const torch::Tensor& coords, torch::Tensor& out) {
  const int64_t N = texture.size(0), C = texture.size(1), R = texture.size(2);
  const int64_t B = coords.size(0), H = coords.size(2), W = coords.size(3);
  const scalar_t* tex = texture.data_ptr<scalar_t>();
  const scalar_t* uv = coords.data_ptr<scalar_t>();
  scalar_t* dst = out.data_ptr<scalar_t>();
  const int64_t plane = H * W;
  std::int64_t clamped = 0;
  for (int64_t b = 0; b < B; ++b) {
    for (int64_t n = 0; n < N; ++n) {
      const scalar_t* tn = tex + n * C * R * R;
      scalar_t* on = dst + (b * N + n) * C * plane;
      const scalar_t* cn = uv + (b * N + n) * plane * 2;
      for (int64_t p = 0; p < plane; ++p) {
        const Axis<scalar_t> ax(cn[2 * p], static_cast<int>(R));
        const Axis<scalar_t> ay(cn[2 * p + 1], static_cast<int>(R));
        clamped += !(ax.inside && ay.inside);
        const scalar_t w00 = (1 - ax.frac) * (1 - ay.frac), w01 = ax.frac * (1 - ay.frac);
        const scalar_t w10 = (1 - ax.frac) * ay.frac, w11 = ax.frac * ay.frac;
        const int64_t o00 = ay.i0 * R + ax.i0, o01 = ay.i0 * R + ax.i1;
        const int64_t o10 = ay.i1 * R + ax.i0, o11 = ay.i1 * R + ax.i1;
        for (int64_t c = 0; c < C; ++c) {
          const scalar_t* tc = tn + c * R * R;
          on[c * plane + p] = w00 * tc[o00] + w01 * tc[o01] + w10 * tc[o10] + w11 * tc[o11];
        }
      }
    }
  }
  if (clamped) g_clamped += clamped;
}

template <typename scalar_t>
void sample_backward_kernel(const torch::Tensor& texture, const torch::Tensor& coords, const torch::Tensor& grad_out,
                            torch::Tensor& grad_tex, torch::Tensor& grad_coords) {
  const int64_t N = texture.size(0), C = texture.size(1), R = texture.size(2);
  const int64_t B = coords.size(0), H = coords.size(2), W = coords.size(3);
  const scalar_t* tex = texture.data_ptr<scalar_t>();
  const scalar_t* uv = coords.data_ptr<scalar_t>();
  const scalar_t* g = grad_out.data_ptr<scalar_t>();
  scalar_t* gt = grad_tex.data_ptr<scalar_t>();
  scalar_t* gc = grad_coords.data_ptr<scalar_t>();
  const int64_t plane = H * W;
  const scalar_t scale = static_cast<scalar_t>(R - 1);
  for (int64_t b = 0; b < B; ++b) {
    for (int64_t n = 0; n < N; ++n) {
      const scalar_t* tn = tex + n * C * R * R;
      scalar_t* gtn = gt + n * C * R * R;
      const scalar_t* gn = g + (b * N + n) * C * plane;
      const scalar_t* cn = uv + (b * N + n) * plane * 2;
      scalar_t* gcn = gc + (b * N + n) * plane * 2;
      for (int64_t p = 0; p < plane; ++p) {
        const Axis<scalar_t> ax(cn[2 * p], static_cast<int>(R));
        const Axis<scalar_t> ay(cn[2 * p + 1], static_cast<int>(R));
        const scalar_t fx = ax.frac, fy = ay.frac;
        const int64_t o00 = ay.i0 * R + ax.i0, o01 = ay.i0 * R + ax.i1;
        const int64_t o10 = ay.i1 * R + ax.i0, o11 = ay.i1 * R + ax.i1;
        scalar_t du = 0, dv = 0;
        for (int64_t c = 0; c < C; ++c) {
          const scalar_t go = gn[c * plane + p];
          if (go == 0) continue;
          const scalar_t* tc = tn + c * R * R;
          scalar_t* gtc = gtn + c * R * R;
          gtc[o00] += go * (1 - fx) * (1 - fy);
          gtc[o01] += go * fx * (1 - fy);
          gtc[o10] += go * (1 - fx) * fy;
          gtc[o11] += go * fx * fy;
          du += go * ((1 - fy) * (tc[o01] - tc[o00]) + fy * (tc[o11] - tc[o10]));
          dv += go * ((1 - fx) * (tc[o10] - tc[o00]) + fx * (tc[o11] - tc[o01]));
        }
        gcn[2 * p] = ax.inside ? du * scale : scalar_t(0);
        gcn[2 * p + 1] = ay.inside ? dv * scale : scalar_t(0);
      }
    }
  }
}

void check_sample_shapes(const torch::Tensor& texture, const torch::Tensor& coords) {
  if (texture.dim() != 4 || texture.size(2) != texture.size(3)) throw ShapeError("texture must be {N, C, R, R}");
  if (coords.dim() != 5 || coords.size(4) != 2) throw ShapeError("coords must be {B, N, H, W, 2}");
  if (coords.size(1) != texture.size(0)) throw ShapeError("coords part count differs from texture part count");
  if (texture.scalar_type() != coords.scalar_type()) throw ShapeError("texture and coords dtypes differ");
}

class SamplePartsFunction : public torch::autograd::Function<SamplePartsFunction> {
 public:
  static torch::Tensor forward(torch::autograd::AutogradContext* ctx, const torch::Tensor& texture,
                               const torch::Tensor& coords) {
    auto tex = texture.contiguous();
    auto uv = coords.contiguous();
    ctx->save_for_backward({tex, uv});
    auto out = torch::empty({uv.size(0), tex.size(0), tex.size(1), uv.size(2), uv.size(3)}, tex.options());
    AT_DISPATCH_FLOATING_TYPES(tex.scalar_type(), "sample_parts_forward",
                               [&] { sample_forward_kernel<scalar_t>(tex, uv, out); });
    return out;
  }

  static torch::autograd::variable_list backward(torch::autograd::AutogradContext* ctx,
                                                 torch::autograd::variable_list grads) {
    const auto saved = ctx->get_saved_variables();
    const auto& tex = saved[0];
    const auto& uv = saved[1];
    auto grad_out = grads[0].contiguous();
    auto grad_tex = torch::zeros_like(tex);
    auto grad_uv = torch::zeros_like(uv);
    AT_DISPATCH_FLOATING_TYPES(tex.scalar_type(), "sample_parts_backward",
                               [&] { sample_backward_kernel<scalar_t>(tex, uv, grad_out, grad_tex, grad_uv); });
    return {grad_tex, grad_uv};
  }
};

}  // namespace

torch::Tensor sample_parts(const torch::Tensor& texture, const torch::Tensor& coords) {
  check_sample_shapes(texture, coords);
  return SamplePartsFunction::apply(texture, coords);
}

torch::Tensor sample_part(const torch::Tensor& texture, const torch::Tensor& coords) {
  if (texture.dim() != 3) throw ShapeError("sample_part texture must be {C, R, R}");
  if (coords.dim() != 3) throw ShapeError("sample_part coords must be {H, W, 2}");
  return sample_parts(texture.unsqueeze(0), coords.unsqueeze(0).unsqueeze(0)).squeeze(1).squeeze(0);
}

torch::Tensor blend_parts(const torch::Tensor& probs, const torch::Tensor& samples) {
  if (probs.dim() != 4 || samples.dim() != 5) throw ShapeError("blend_parts expects probs {B,N+1,H,W}, samples {B,N,C,H,W}");
  if (probs.size(0) != samples.size(0) || probs.size(1) != samples.size(1) + 1 || probs.size(2) != samples.size(3) ||
      probs.size(3) != samples.size(4)) {
    throw ShapeError("blend_parts: probability and sample shapes disagree");
  }
  const auto fg = probs.narrow(1, 1, samples.size(1)).unsqueeze(2);
  return (fg * samples).sum(1);
}

torch::Tensor static_component(const torch::Tensor& feature) {
  if (feature.dim() != 4 || feature.size(1) < 3) throw ShapeError("static_component expects {B, C>=3, H, W}");
  return feature.narrow(1, 0, 3);
}

std::int64_t clamped_uv_count() { return g_clamped.load(); }
void reset_clamped_uv_count() { g_clamped = 0; }

}  // namespace nvr
