// Copyright 2026 The TPGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tpgn/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "tpgn/errors.hpp"
#include "tpgn/parallel.hpp"

namespace tpgn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Stride = Eigen::OuterStride<>;
using ConstMap = Eigen::Map<const RowMat, 0, Stride>;
using MutMap = Eigen::Map<RowMat, 0, Stride>;

ConstMap cmap(const double* p, std::size_t rows, std::size_t cols, std::size_t stride) {
  return ConstMap(p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols),
                  Stride(static_cast<Eigen::Index>(stride)));
}
MutMap mmap(double* p, std::size_t rows, std::size_t cols, std::size_t stride) {
  return MutMap(p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols),
                Stride(static_cast<Eigen::Index>(stride)));
}

Tensor finish(OpKind kind, std::initializer_list<const Tensor*> inputs, Tensor value,
              Graph::BackwardFn fn) {
  std::vector<const Tensor*> v(inputs);
  Graph* g = common_graph(v);
  if (!g) return value;
  return g->record(kind, v, std::move(value), std::move(fn));
}

Tensor finish_many(OpKind kind, const std::vector<Tensor>& inputs, Tensor value,
                   Graph::BackwardFn fn) {
  std::vector<const Tensor*> v;
  v.reserve(inputs.size());
  for (const Tensor& t : inputs) v.push_back(&t);
  Graph* g = common_graph(v);
  if (!g) return value;
  return g->record(kind, v, std::move(value), std::move(fn));
}

std::size_t product(const Shape& s, std::size_t begin, std::size_t end) {
  std::size_t p = 1;
  for (std::size_t i = begin; i < end; ++i) p *= s[i];
  return p;
}

// ---------------------------------------------------------------------------
// Broadcasting helpers

// Strides of `in` expressed over the axes of `out` (0 where `in` stretches).
std::vector<std::size_t> aligned_strides(const Shape& in, const Shape& out) {
  std::vector<std::size_t> own(in.size());
  std::size_t s = 1;
  for (std::size_t i = in.size(); i-- > 0;) {
    own[i] = s;
    s *= in[i];
  }
  std::vector<std::size_t> res(out.size(), 0);
  const std::size_t offset = out.size() - in.size();
  for (std::size_t i = offset; i < out.size(); ++i) {
    const std::size_t j = i - offset;
    res[i] = (in[j] == 1 && out[i] != 1) ? 0 : own[j];
  }
  return res;
}

// Calls f(out_flat, a_flat, b_flat) for every element of `out` in row-major
// order.
template <class F>
void for_each_broadcast(const Shape& out, const std::vector<std::size_t>& sa,
                        const std::vector<std::size_t>& sb, F&& f) {
  const std::size_t n = element_count(out);
  if (n == 0) return;
  const std::size_t rank = out.size();
  if (rank == 0) {
    f(0, 0, 0);
    return;
  }
  std::vector<std::size_t> idx(rank, 0);
  std::size_t ia = 0, ib = 0;
  const std::size_t last = rank - 1;
  const std::size_t inner = out[last];
  for (std::size_t flat = 0; flat < n; flat += inner) {
    for (std::size_t k = 0; k < inner; ++k) f(flat + k, ia + k * sa[last], ib + k * sb[last]);
    // Advance the odometer over the leading axes.
    for (std::size_t ax = last; ax-- > 0;) {
      ++idx[ax];
      ia += sa[ax];
      ib += sb[ax];
      if (idx[ax] < out[ax]) break;
      ia -= sa[ax] * out[ax];
      ib -= sb[ax] * out[ax];
      idx[ax] = 0;
    }
  }
}

// Sums g (of some broadcast shape) down to `target`.
Tensor reduce_to(const Tensor& g, const Shape& target) {
  if (g.shape() == target) return g.detach();
  Tensor out = Tensor::zeros(target);
  auto dst = out.mutable_values();
  auto src = g.values();
  const auto st = aligned_strides(target, g.shape());
  const std::vector<std::size_t> unused(g.rank(), 0);
  for_each_broadcast(g.shape(), st, unused,
                     [&](std::size_t o, std::size_t t, std::size_t) { dst[t] += src[o]; });
  return out;
}

Tensor broadcast_kernel(const Tensor& a, const Shape& shape) {
  Tensor out(shape);
  auto dst = out.mutable_values();
  auto src = a.values();
  const auto sa = aligned_strides(a.shape(), shape);
  const std::vector<std::size_t> unused(shape.size(), 0);
  for_each_broadcast(shape, sa, unused,
                     [&](std::size_t o, std::size_t i, std::size_t) { dst[o] = src[i]; });
  return out;
}

// ---------------------------------------------------------------------------
// Layout kernels (no recording)

Tensor permute_kernel(const Tensor& a, const std::vector<std::size_t>& order) {
  const Shape& in = a.shape();
  Shape out_shape(order.size());
  std::vector<std::size_t> in_strides(in.size());
  std::size_t s = 1;
  for (std::size_t i = in.size(); i-- > 0;) {
    in_strides[i] = s;
    s *= in[i];
  }
  std::vector<std::size_t> sa(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out_shape[i] = in[order[i]];
    sa[i] = in_strides[order[i]];
  }
  Tensor out(out_shape);
  auto dst = out.mutable_values();
  auto src = a.values();
  const std::vector<std::size_t> unused(order.size(), 0);
  for_each_broadcast(out_shape, sa, unused,
                     [&](std::size_t o, std::size_t i, std::size_t) { dst[o] = src[i]; });
  return out;
}

Tensor slice_kernel(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length) {
  const Shape& in = a.shape();
  Shape out_shape = in;
  out_shape[axis] = length;
  const std::size_t outer = product(in, 0, axis);
  const std::size_t inner = product(in, axis + 1, in.size());
  Tensor out(out_shape);
  auto dst = out.mutable_values();
  auto src = a.values();
  for (std::size_t o = 0; o < outer; ++o) {
    const double* from = src.data() + (o * in[axis] + start) * inner;
    std::copy(from, from + length * inner, dst.data() + o * length * inner);
  }
  return out;
}

// Places g into a zero tensor of `shape` at [start, start + len) along axis.
Tensor scatter_slice(const Tensor& g, const Shape& shape, std::size_t axis, std::size_t start) {
  const std::size_t outer = product(shape, 0, axis);
  const std::size_t inner = product(shape, axis + 1, shape.size());
  const std::size_t length = g.shape()[axis];
  Tensor out = Tensor::zeros(shape);
  auto dst = out.mutable_values();
  auto src = g.values();
  for (std::size_t o = 0; o < outer; ++o) {
    const double* from = src.data() + o * length * inner;
    std::copy(from, from + length * inner, dst.data() + (o * shape[axis] + start) * inner);
  }
  return out;
}

void check_axis(const Tensor& a, std::size_t axis, const char* op) {
  if (axis >= a.rank()) {
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for shape " + to_string(a.shape()));
  }
}

}  // namespace

Shape broadcast_shape(const Shape& a, const Shape& b) {
  const std::size_t rank = std::max(a.size(), b.size());
  Shape out(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const std::size_t db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1) {
      throw DimensionError("shapes " + to_string(a) + " and " + to_string(b) +
                           " are not broadcastable");
    }
    out[i] = da == 1 ? db : da;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense products

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + to_string(a.shape()) + " by " +
                         to_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor out(Shape{m, n});
  if (m && n && k) {
    mmap(out.mutable_values().data(), m, n, n).noalias() =
        cmap(a.values().data(), m, k, k) * cmap(b.values().data(), k, n, n);
  }
  add_macs(static_cast<std::uint64_t>(m) * k * n);
  Tensor ad = a.detach(), bd = b.detach();
  return finish(OpKind::kMatMul, {&a, &b}, std::move(out),
                [ad, bd, m, k, n](const Tensor& g, const std::vector<bool>& needs) {
                  std::vector<Tensor> res(2);
                  const auto G = cmap(g.values().data(), m, n, n);
                  if (needs[0]) {
                    res[0] = Tensor(Shape{m, k});
                    mmap(res[0].mutable_values().data(), m, k, k).noalias() =
                        G * cmap(bd.values().data(), k, n, n).transpose();
                    add_macs(static_cast<std::uint64_t>(m) * k * n);
                  }
                  if (needs[1]) {
                    res[1] = Tensor(Shape{k, n});
                    mmap(res[1].mutable_values().data(), k, n, n).noalias() =
                        cmap(ad.values().data(), m, k, k).transpose() * G;
                    add_macs(static_cast<std::uint64_t>(m) * k * n);
                  }
                  return res;
                });
}

Tensor affine(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (x.rank() < 1 || weight.rank() != 2 || bias.rank() != 1 ||
      x.shape().back() != weight.dim(1) || bias.dim(0) != weight.dim(0)) {
    throw DimensionError("affine: input " + to_string(x.shape()) + ", weight " +
                         to_string(weight.shape()) + ", bias " + to_string(bias.shape()));
  }
  const std::size_t k = weight.dim(1), n = weight.dim(0);
  const std::size_t rows = k ? x.size() / k : element_count(Shape(x.shape().begin(), x.shape().end() - 1));
  Shape out_shape = x.shape();
  out_shape.back() = n;
  Tensor out(out_shape);
  {
    auto Y = mmap(out.mutable_values().data(), rows, n, n);
    if (k) {
      Y.noalias() = cmap(x.values().data(), rows, k, k) *
                    cmap(weight.values().data(), n, k, k).transpose();
    } else {
      Y.setZero();
    }
    const auto B = cmap(bias.values().data(), 1, n, n);
    Y.rowwise() += B.row(0);
  }
  add_macs(static_cast<std::uint64_t>(rows) * k * n);
  Tensor xd = x.detach(), wd = weight.detach();
  return finish(OpKind::kAffine, {&x, &weight, &bias}, std::move(out),
                [xd, wd, rows, k, n](const Tensor& g, const std::vector<bool>& needs) {
                  std::vector<Tensor> res(3);
                  const auto G = cmap(g.values().data(), rows, n, n);
                  if (needs[0]) {
                    res[0] = Tensor(xd.shape());
                    if (k) {
                      mmap(res[0].mutable_values().data(), rows, k, k).noalias() =
                          G * cmap(wd.values().data(), n, k, k);
                    }
                    add_macs(static_cast<std::uint64_t>(rows) * k * n);
                  }
                  if (needs[1]) {
                    res[1] = Tensor(Shape{n, k});
                    if (k) {
                      mmap(res[1].mutable_values().data(), n, k, k).noalias() =
                          G.transpose() * cmap(xd.values().data(), rows, k, k);
                    }
                    add_macs(static_cast<std::uint64_t>(rows) * k * n);
                  }
                  if (needs[2]) {
                    res[2] = Tensor(Shape{n});
                    auto db = res[2].mutable_values();
                    for (std::size_t r = 0; r < rows; ++r) {
                      const double* row = g.values().data() + r * n;
                      for (std::size_t j = 0; j < n; ++j) db[j] += row[j];
                    }
                  }
                  return res;
                });
}

Tensor window_linear(const Tensor& x, const Tensor& weight, const Tensor& bias,
                     std::size_t window) {
  if (x.rank() < 2 || weight.rank() != 2 || bias.rank() != 1 || window == 0 ||
      weight.dim(1) != window * x.shape().back() || bias.dim(0) != weight.dim(0)) {
    throw DimensionError("window_linear: input " + to_string(x.shape()) + ", weight " +
                         to_string(weight.shape()) + ", bias " + to_string(bias.shape()) +
                         ", window " + std::to_string(window));
  }
  const std::size_t c = x.shape().back();
  const std::size_t len = x.shape()[x.rank() - 2];
  const std::size_t batch = (len * c) != 0 ? x.size() / (len * c) : 0;
  const std::size_t d = weight.dim(0);
  const std::size_t wc = window * c;
  Shape out_shape = x.shape();
  out_shape.back() = d;
  Tensor out(out_shape);

  const double* xp = x.values().data();
  const double* wp = weight.values().data();
  const double* bp = bias.values().data();
  double* hp = out.mutable_values().data();
  std::uint64_t macs = 0;
  for (std::size_t t = 0; t < len; ++t) macs += std::min(t, window);
  macs *= static_cast<std::uint64_t>(batch) * c * d;

  parallel_for(len, 16, [&](std::size_t t0, std::size_t t1) {
    for (std::size_t t = t0; t < t1; ++t) {
      auto H = mmap(hp + t * d, batch, d, len * d);
      const std::size_t m = std::min(t, window);
      if (m == 0) {
        H.setZero();
      } else {
        const auto X = cmap(xp + (t - m) * c, batch, m * c, len * c);
        const auto W = cmap(wp + (window - m) * c, d, m * c, wc);
        H.noalias() = X * W.transpose();
      }
      H.rowwise() += cmap(bp, 1, d, d).row(0);
    }
  });
  add_macs(macs);

  Tensor xd = x.detach(), wd = weight.detach();
  return finish(
      OpKind::kWindowLinear, {&x, &weight, &bias}, std::move(out),
      [xd, wd, batch, len, c, d, window, wc, macs](const Tensor& g,
                                                   const std::vector<bool>& needs) {
        std::vector<Tensor> res(3);
        const double* gp = g.values().data();
        const double* xp = xd.values().data();
        const double* wp = wd.values().data();
        if (needs[0]) {
          res[0] = Tensor::zeros(xd.shape());
          double* dx = res[0].mutable_values().data();
          for (std::size_t t = 1; t < len; ++t) {
            const std::size_t m = std::min(t, window);
            auto dX = mmap(dx + (t - m) * c, batch, m * c, len * c);
            dX.noalias() += cmap(gp + t * d, batch, d, len * d) *
                            cmap(wp + (window - m) * c, d, m * c, wc);
          }
          add_macs(macs);
        }
        if (needs[1]) {
          res[1] = Tensor::zeros(wd.shape());
          double* dw = res[1].mutable_values().data();
          for (std::size_t t = 1; t < len; ++t) {
            const std::size_t m = std::min(t, window);
            auto dW = mmap(dw + (window - m) * c, d, m * c, wc);
            dW.noalias() += cmap(gp + t * d, batch, d, len * d).transpose() *
                            cmap(xp + (t - m) * c, batch, m * c, len * c);
          }
          add_macs(macs);
        }
        if (needs[2]) {
          res[2] = Tensor::zeros(Shape{d});
          auto db = res[2].mutable_values();
          const std::size_t rows = batch * len;
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < d; ++j) db[j] += gp[r * d + j];
          }
        }
        return res;
      });
}

// ---------------------------------------------------------------------------
// Element-wise

Tensor elementwise(Elementwise op, const Tensor& a, const Tensor& b) {
  const Shape out_shape = broadcast_shape(a.shape(), b.shape());
  Tensor out(out_shape);
  auto dst = out.mutable_values();
  auto x = a.values();
  auto y = b.values();
  auto apply = [op](double u, double v) {
    switch (op) {
      case Elementwise::kAdd: return u + v;
      case Elementwise::kSub: return u - v;
      case Elementwise::kMul: return u * v;
    }
    return 0.0;
  };
  using Arr = Eigen::Map<const Eigen::ArrayXd>;
  const auto n = static_cast<Eigen::Index>(dst.size());
  auto out_arr = Eigen::Map<Eigen::ArrayXd>(dst.data(), n);
  const auto run = [&](const auto& u, const auto& v) {
    switch (op) {
      case Elementwise::kAdd: out_arr = u + v; break;
      case Elementwise::kSub: out_arr = u - v; break;
      case Elementwise::kMul: out_arr = u * v; break;
    }
  };
  if (a.shape() == b.shape()) {
    run(Arr(x.data(), n), Arr(y.data(), n));
  } else if (a.size() == 1 && b.size() == dst.size()) {
    run(Eigen::ArrayXd::Constant(n, x[0]), Arr(y.data(), n));
  } else if (b.size() == 1 && a.size() == dst.size()) {
    run(Arr(x.data(), n), Eigen::ArrayXd::Constant(n, y[0]));
  } else {
    const auto sa = aligned_strides(a.shape(), out_shape);
    const auto sb = aligned_strides(b.shape(), out_shape);
    for_each_broadcast(out_shape, sa, sb, [&](std::size_t o, std::size_t i, std::size_t j) {
      dst[o] = apply(x[i], y[j]);
    });
  }
  const OpKind kind = op == Elementwise::kAdd   ? OpKind::kAdd
                      : op == Elementwise::kSub ? OpKind::kSub
                                                : OpKind::kMul;
  Tensor ad = a.detach(), bd = b.detach();
  return finish(kind, {&a, &b}, std::move(out),
                [op, ad, bd, out_shape](const Tensor& g, const std::vector<bool>& needs) {
                  std::vector<Tensor> res(2);
                  if (op == Elementwise::kAdd || op == Elementwise::kSub) {
                    if (needs[0]) res[0] = reduce_to(g, ad.shape());
                    if (needs[1]) {
                      Tensor gb = reduce_to(g, bd.shape());
                      if (op == Elementwise::kSub) {
                        for (double& v : gb.mutable_values()) v = -v;
                      }
                      res[1] = std::move(gb);
                    }
                    return res;
                  }
                  // d(a*b): each side receives g times the other operand.
                  const auto sa = aligned_strides(ad.shape(), out_shape);
                  const auto sb = aligned_strides(bd.shape(), out_shape);
                  auto gv = g.values();
                  if (needs[0]) {
                    Tensor full(out_shape);
                    auto f = full.mutable_values();
                    auto y = bd.values();
                    for_each_broadcast(out_shape, sa, sb,
                                       [&](std::size_t o, std::size_t, std::size_t j) {
                                         f[o] = gv[o] * y[j];
                                       });
                    res[0] = reduce_to(full, ad.shape());
                  }
                  if (needs[1]) {
                    Tensor full(out_shape);
                    auto f = full.mutable_values();
                    auto x = ad.values();
                    for_each_broadcast(out_shape, sa, sb,
                                       [&](std::size_t o, std::size_t i, std::size_t) {
                                         f[o] = gv[o] * x[i];
                                       });
                    res[1] = reduce_to(full, bd.shape());
                  }
                  return res;
                });
}

Tensor one_minus(const Tensor& a) { return sub(Tensor::scalar(1.0), a); }

Tensor scale(const Tensor& a, double factor) { return mul(a, Tensor::scalar(factor)); }

Tensor activation(Activation op, const Tensor& a) {
  Tensor out(a.shape());
  const std::size_t n = a.size();
  const auto x = Eigen::Map<const Eigen::ArrayXd>(a.values().data(), static_cast<Eigen::Index>(n));
  auto ys = Eigen::Map<Eigen::ArrayXd>(out.mutable_values().data(), static_cast<Eigen::Index>(n));
  // Both forms saturate cleanly when exp overflows to inf.
  if (op == Activation::kSigmoid) {
    ys = 1.0 / (1.0 + (-x).exp());
  } else {
    ys = 1.0 - 2.0 / ((2.0 * x).exp() + 1.0);
  }
  Tensor y = out.detach();
  return finish(op == Activation::kSigmoid ? OpKind::kSigmoid : OpKind::kTanh, {&a},
                std::move(out), [op, y](const Tensor& g, const std::vector<bool>&) {
                  Tensor d(y.shape());
                  auto dv = d.mutable_values();
                  auto yv = y.values();
                  auto gv = g.values();
                  if (op == Activation::kSigmoid) {
                    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = gv[i] * yv[i] * (1.0 - yv[i]);
                  } else {
                    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = gv[i] * (1.0 - yv[i] * yv[i]);
                  }
                  return std::vector<Tensor>{std::move(d)};
                });
}

// ---------------------------------------------------------------------------
// Layout

Tensor concat(std::size_t axis, const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat: no parts");
  const Shape& ref = parts.front().shape();
  check_axis(parts.front(), axis, "concat");
  Shape out_shape = ref;
  out_shape[axis] = 0;
  for (const Tensor& p : parts) {
    bool ok = p.rank() == ref.size();
    for (std::size_t i = 0; ok && i < ref.size(); ++i) {
      if (i != axis && p.shape()[i] != ref[i]) ok = false;
    }
    if (!ok) {
      throw DimensionError("concat along axis " + std::to_string(axis) + ": " +
                           to_string(ref) + " vs " + to_string(p.shape()));
    }
    out_shape[axis] += p.shape()[axis];
  }
  const std::size_t outer = product(ref, 0, axis);
  const std::size_t inner = product(ref, axis + 1, ref.size());
  Tensor out(out_shape);
  auto dst = out.mutable_values();
  std::size_t offset = 0;
  std::vector<std::size_t> widths;
  for (const Tensor& p : parts) {
    const std::size_t block = p.shape()[axis] * inner;
    auto src = p.values();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy(src.data() + o * block, src.data() + (o + 1) * block,
                dst.data() + o * out_shape[axis] * inner + offset * inner);
    }
    widths.push_back(p.shape()[axis]);
    offset += p.shape()[axis];
  }
  return finish_many(OpKind::kConcat, parts, std::move(out),
                     [axis, widths](const Tensor& g, const std::vector<bool>& needs) {
                       std::vector<Tensor> res(widths.size());
                       std::size_t start = 0;
                       for (std::size_t i = 0; i < widths.size(); ++i) {
                         if (needs[i]) res[i] = slice_kernel(g, axis, start, widths[i]);
                         start += widths[i];
                       }
                       return res;
                     });
}

Tensor pad_front(const Tensor& a, std::size_t count, std::size_t axis) {
  check_axis(a, axis, "pad_front");
  Shape out_shape = a.shape();
  out_shape[axis] += count;
  Tensor out = scatter_slice(a, out_shape, axis, count);
  const std::size_t n = a.shape()[axis];
  return finish(OpKind::kPadFront, {&a}, std::move(out),
                [axis, count, n](const Tensor& g, const std::vector<bool>&) {
                  return std::vector<Tensor>{slice_kernel(g, axis, count, n)};
                });
}

Tensor reduce(Reduction op, const Tensor& a, std::size_t axis) {
  check_axis(a, axis, "reduce");
  const Shape& in = a.shape();
  const std::size_t outer = product(in, 0, axis);
  const std::size_t n = in[axis];
  const std::size_t inner = product(in, axis + 1, in.size());
  Shape out_shape = in;
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  Tensor out = Tensor::zeros(out_shape);
  auto dst = out.mutable_values();
  auto src = a.values();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < inner; ++i) dst[o * inner + i] += src[(o * n + j) * inner + i];
    }
  }
  const double factor = op == Reduction::kMean ? 1.0 / static_cast<double>(n) : 1.0;
  if (op == Reduction::kMean) {
    for (double& v : dst) v *= factor;
  }
  return finish(op == Reduction::kMean ? OpKind::kMean : OpKind::kSum, {&a}, std::move(out),
                [in, outer, n, inner, factor](const Tensor& g, const std::vector<bool>&) {
                  Tensor d(in);
                  auto dv = d.mutable_values();
                  auto gv = g.values();
                  for (std::size_t o = 0; o < outer; ++o) {
                    for (std::size_t j = 0; j < n; ++j) {
                      for (std::size_t i = 0; i < inner; ++i) {
                        dv[(o * n + j) * inner + i] = gv[o * inner + i] * factor;
                      }
                    }
                  }
                  return std::vector<Tensor>{std::move(d)};
                });
}

Tensor sum_all(const Tensor& a) { return reduce(Reduction::kSum, reshape(a, Shape{a.size()}), 0); }

Tensor mean_all(const Tensor& a) {
  return reduce(Reduction::kMean, reshape(a, Shape{a.size()}), 0);
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (element_count(shape) != a.size()) {
    throw DimensionError("reshape: cannot view " + to_string(a.shape()) + " as " +
                         to_string(shape));
  }
  Tensor out = a.reshaped(std::move(shape));
  const Shape in = a.shape();
  return finish(OpKind::kReshape, {&a}, std::move(out),
                [in](const Tensor& g, const std::vector<bool>&) {
                  return std::vector<Tensor>{g.reshaped(in)};
                });
}

Tensor permute(const Tensor& a, const std::vector<std::size_t>& order) {
  std::vector<bool> seen(a.rank(), false);
  bool valid = order.size() == a.rank();
  for (std::size_t i = 0; valid && i < order.size(); ++i) {
    if (order[i] >= a.rank() || seen[order[i]]) valid = false;
    else seen[order[i]] = true;
  }
  if (!valid) {
    throw DimensionError("permute: invalid axis order for shape " + to_string(a.shape()));
  }
  std::vector<std::size_t> inverse(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) inverse[order[i]] = i;
  return finish(OpKind::kPermute, {&a}, permute_kernel(a, order),
                [inverse](const Tensor& g, const std::vector<bool>&) {
                  return std::vector<Tensor>{permute_kernel(g, inverse)};
                });
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length) {
  check_axis(a, axis, "slice");
  if (start + length > a.shape()[axis]) {
    throw DimensionError("slice [" + std::to_string(start) + ", " +
                         std::to_string(start + length) + ") out of range for axis " +
                         std::to_string(axis) + " of " + to_string(a.shape()));
  }
  const Shape in = a.shape();
  return finish(OpKind::kSlice, {&a}, slice_kernel(a, axis, start, length),
                [in, axis, start](const Tensor& g, const std::vector<bool>&) {
                  return std::vector<Tensor>{scatter_slice(g, in, axis, start)};
                });
}

Tensor broadcast_to(const Tensor& a, const Shape& shape) {
  if (broadcast_shape(a.shape(), shape) != shape) {
    throw DimensionError("broadcast_to: " + to_string(a.shape()) + " cannot expand to " +
                         to_string(shape));
  }
  const Shape in = a.shape();
  return finish(OpKind::kBroadcast, {&a}, broadcast_kernel(a, shape),
                [in](const Tensor& g, const std::vector<bool>&) {
                  return std::vector<Tensor>{reduce_to(g, in)};
                });
}

Tensor mse_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) {
    throw DimensionError("mse_loss: " + to_string(pred.shape()) + " vs " +
                         to_string(target.shape()));
  }
  const Tensor diff = sub(pred, target.detach());
  return mean_all(mul(diff, diff));
}

}  // namespace tpgn
