#pragma once

#include <Eigen/Core>

#include "housegan/nn/dual.hpp"

namespace housegan::nn {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// C[m x n] (+)= op(A) * op(B) on row-major buffers. op(A) is m x k; A is
/// stored k x m when trans_a is set, likewise for B.
template <typename T>
void gemm(bool trans_a, bool trans_b, int m, int n, int k, const T* a, const T* b, T* c,
          bool accumulate) {
  using ConstMap = Eigen::Map<const RowMatrix<T>>;
  Eigen::Map<RowMatrix<T>> cm(c, m, n);
  if (!accumulate) cm.setZero();
  if (m == 0 || n == 0 || k == 0) return;
  ConstMap am(a, trans_a ? k : m, trans_a ? m : k);
  ConstMap bm(b, trans_b ? n : k, trans_b ? k : n);
  if (!trans_a && !trans_b) {
    cm.noalias() += am * bm;
  } else if (trans_a && !trans_b) {
    cm.noalias() += am.transpose() * bm;
  } else if (!trans_a && trans_b) {
    cm.noalias() += am * bm.transpose();
  } else {
    cm.noalias() += am.transpose() * bm.transpose();
  }
}

/// Geometry of a 2-D convolution sweep over an image of `channels` planes.
struct ConvGeometry {
  int channels = 0;
  int height = 0;
  int width = 0;
  int kernel = 3;
  int stride = 1;
  int padding = 1;

  int out_height() const { return (height + 2 * padding - kernel) / stride + 1; }
  int out_width() const { return (width + 2 * padding - kernel) / stride + 1; }
  int rows() const { return channels * kernel * kernel; }
  int cols() const { return out_height() * out_width(); }
};

/// Unfolds image patches: cols[(c*k + ki)*k + kj][oh*Wo + ow] =
/// img[c][oh*s - p + ki][ow*s - p + kj], zero outside the image.
template <typename T>
void im2col(const T* img, const ConvGeometry& g, T* cols) {
  const int ho = g.out_height(), wo = g.out_width();
  for (int c = 0; c < g.channels; ++c) {
    for (int ki = 0; ki < g.kernel; ++ki) {
      for (int kj = 0; kj < g.kernel; ++kj) {
        T* row = cols + static_cast<std::ptrdiff_t>((c * g.kernel + ki) * g.kernel + kj) * ho * wo;
        for (int oh = 0; oh < ho; ++oh) {
          const int ih = oh * g.stride - g.padding + ki;
          T* out = row + static_cast<std::ptrdiff_t>(oh) * wo;
          if (ih < 0 || ih >= g.height) {
            for (int ow = 0; ow < wo; ++ow) out[ow] = T(0);
            continue;
          }
          const T* in = img + (static_cast<std::ptrdiff_t>(c) * g.height + ih) * g.width;
          for (int ow = 0; ow < wo; ++ow) {
            const int iw = ow * g.stride - g.padding + kj;
            out[ow] = (iw >= 0 && iw < g.width) ? in[iw] : T(0);
          }
        }
      }
    }
  }
}

/// Adjoint of im2col: scatters (accumulates) columns back into the image.
template <typename T>
void col2im(const T* cols, const ConvGeometry& g, T* img) {
  const int ho = g.out_height(), wo = g.out_width();
  for (int c = 0; c < g.channels; ++c) {
    for (int ki = 0; ki < g.kernel; ++ki) {
      for (int kj = 0; kj < g.kernel; ++kj) {
        const T* row = cols + static_cast<std::ptrdiff_t>((c * g.kernel + ki) * g.kernel + kj) * ho * wo;
        for (int oh = 0; oh < ho; ++oh) {
          const int ih = oh * g.stride - g.padding + ki;
          if (ih < 0 || ih >= g.height) continue;
          const T* in = row + static_cast<std::ptrdiff_t>(oh) * wo;
          T* out = img + (static_cast<std::ptrdiff_t>(c) * g.height + ih) * g.width;
          for (int ow = 0; ow < wo; ++ow) {
            const int iw = ow * g.stride - g.padding + kj;
            if (iw >= 0 && iw < g.width) out[iw] += in[ow];
          }
        }
      }
    }
  }
}

}  // namespace housegan::nn
