#include "nvr/flow_warp.hpp"

#include <atomic>
#include <cmath>

#include "nvr/errors.hpp"

namespace nvr {

namespace {

std::atomic<std::int64_t> g_warp_calls{0};

struct Tap {
  int64_t offset[4];
  double weight[4];
  int count = 0;
};

// Collects the in-bounds bilinear taps with nonzero weight.
template <typename flow_t>
Tap make_tap(int x, int y, flow_t fx, flow_t fy, int height, int width) {
  const double sx = x + static_cast<double>(fx);
  const double sy = y + static_cast<double>(fy);
  const double x0 = std::floor(sx);
  const double y0 = std::floor(sy);
  const double ax = sx - x0;
  const double ay = sy - y0;
  Tap tap;
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      const double w = (i ? ax : 1.0 - ax) * (j ? ay : 1.0 - ay);
      if (w == 0.0) continue;
      const double px = x0 + i;
      const double py = y0 + j;
      if (px < 0 || py < 0 || px > width - 1 || py > height - 1) continue;
      tap.offset[tap.count] = static_cast<int64_t>(py) * width + static_cast<int64_t>(px);
      tap.weight[tap.count] = w;
      ++tap.count;
    }
  }
  return tap;
}

template <typename scalar_t, typename flow_t>
void warp_chw(const scalar_t* src, const flow_t* flow_x, const flow_t* flow_y, scalar_t* dst, int channels, int height,
              int width) {
  const int64_t plane = static_cast<int64_t>(height) * width;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int64_t p = static_cast<int64_t>(y) * width + x;
      const Tap tap = make_tap(x, y, flow_x[p], flow_y[p], height, width);
      for (int c = 0; c < channels; ++c) {
        const scalar_t* sc = src + c * plane;
        if (tap.count == 1 && tap.weight[0] == 1.0) {
          dst[c * plane + p] = sc[tap.offset[0]];
          continue;
        }
        double acc = 0.0;
        for (int k = 0; k < tap.count; ++k) acc += tap.weight[k] * static_cast<double>(sc[tap.offset[k]]);
        dst[c * plane + p] = static_cast<scalar_t>(acc);
      }
    }
  }
}

template <typename scalar_t>
void warp_backward_chw(const scalar_t* grad_out, const scalar_t* flow_x, const scalar_t* flow_y, scalar_t* grad_src,
                       int channels, int height, int width) {
  const int64_t plane = static_cast<int64_t>(height) * width;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int64_t p = static_cast<int64_t>(y) * width + x;
      const Tap tap = make_tap(x, y, flow_x[p], flow_y[p], height, width);
      for (int c = 0; c < channels; ++c) {
        const scalar_t g = grad_out[c * plane + p];
        for (int k = 0; k < tap.count; ++k) grad_src[c * plane + tap.offset[k]] += static_cast<scalar_t>(tap.weight[k]) * g;
      }
    }
  }
}

class WarpFunction : public torch::autograd::Function<WarpFunction> {
 public:
  static torch::Tensor forward(torch::autograd::AutogradContext* ctx, const torch::Tensor& image,
                               const torch::Tensor& flow) {
    auto src = image.contiguous();
    auto fl = flow.to(image.scalar_type()).contiguous();
    ctx->save_for_backward({fl});
    auto out = torch::empty_like(src);
    const int B = static_cast<int>(src.size(0)), C = static_cast<int>(src.size(1));
    const int H = static_cast<int>(src.size(2)), W = static_cast<int>(src.size(3));
    const int64_t plane = static_cast<int64_t>(H) * W;
    AT_DISPATCH_FLOATING_TYPES(src.scalar_type(), "warp_forward", [&] {
      for (int b = 0; b < B; ++b) {
        const scalar_t* f = fl.data_ptr<scalar_t>() + b * 2 * plane;
        warp_chw<scalar_t, scalar_t>(src.data_ptr<scalar_t>() + b * C * plane, f, f + plane,
                                             out.data_ptr<scalar_t>() + b * C * plane, C, H, W);
      }
    });
    return out;
  }

  static torch::autograd::variable_list backward(torch::autograd::AutogradContext* ctx,
                                                 torch::autograd::variable_list grads) {
    const auto fl = ctx->get_saved_variables()[0];
    auto g = grads[0].contiguous();
    auto grad_src = torch::zeros_like(g);
    const int B = static_cast<int>(g.size(0)), C = static_cast<int>(g.size(1));
    const int H = static_cast<int>(g.size(2)), W = static_cast<int>(g.size(3));
    const int64_t plane = static_cast<int64_t>(H) * W;
    AT_DISPATCH_FLOATING_TYPES(g.scalar_type(), "warp_backward", [&] {
      for (int b = 0; b < B; ++b) {
        const scalar_t* f = fl.data_ptr<scalar_t>() + b * 2 * plane;
        warp_backward_chw<scalar_t>(g.data_ptr<scalar_t>() + b * C * plane, f, f + plane,
                                    grad_src.data_ptr<scalar_t>() + b * C * plane, C, H, W);
      }
    });
    return {grad_src, torch::Tensor()};
  }
};

}  // namespace


torch::Tensor warp(const torch::Tensor& image, const torch::Tensor& flow) {
  const bool batched = image.dim() == 4;
  if (!(image.dim() == 4 || image.dim() == 3) || flow.dim() != image.dim()) {
    throw ShapeError("warp expects image {B,C,H,W} with flow {B,2,H,W} (or unbatched)");
  }
  const auto img = batched ? image : image.unsqueeze(0);
  const auto fl = batched ? flow : flow.unsqueeze(0);
  if (fl.size(0) != img.size(0) || fl.size(1) != 2 || fl.size(2) != img.size(2) || fl.size(3) != img.size(3)) {
    throw ShapeError("warp: flow shape does not match image");
  }
  ++g_warp_calls;
  auto out = WarpFunction::apply(img, fl);
  return batched ? out : out.squeeze(0);
}

std::vector<double> warp_planar(const Image& image, const Image& flow) {
  if (flow.channels != 2 || flow.height != image.height || flow.width != image.width) {
    throw ShapeError("warp: flow shape does not match image");
  }
  ++g_warp_calls;
  const int H = image.height, W = image.width, C = image.channels;
  const std::size_t plane = image.pixel_count();
  std::vector<double> src(plane * C), dst(plane * C);
  std::vector<float> fx(plane), fy(plane);
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < C; ++c) src[c * plane + p] = image.data[p * C + c];
    fx[p] = flow.data[2 * p];
    fy[p] = flow.data[2 * p + 1];
  }
  warp_chw<double, float>(src.data(), fx.data(), fy.data(), dst.data(), C, H, W);
  return dst;
}

Image warp(const Image& image, const Image& flow) {
  const auto planar = warp_planar(image, flow);
  const std::size_t plane = image.pixel_count();
  const int C = image.channels;
  Image out(image.height, image.width, C);
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < C; ++c) out.data[p * C + c] = static_cast<float>(planar[c * plane + p]);
  }
  return out;
}

std::int64_t warp_invocations() { return g_warp_calls.load(); }
void reset_warp_invocations() { g_warp_calls = 0; }

}  // namespace nvr
