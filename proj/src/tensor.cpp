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

#include "tpgn/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <functional>
#include <new>
#include <numeric>
#include <sstream>

#include "tpgn/errors.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace tpgn {

namespace {

std::atomic<std::size_t> g_live_bytes{0};
std::atomic<std::size_t> g_peak_bytes{0};
std::atomic<std::uint64_t> g_macs{0};

void account_alloc(std::size_t bytes) {
  const std::size_t live = g_live_bytes.fetch_add(bytes) + bytes;
  std::size_t peak = g_peak_bytes.load();
  while (live > peak && !g_peak_bytes.compare_exchange_weak(peak, live)) {
  }
}

}  // namespace

#if defined(__GLIBC__)
// Large activations are allocated and freed on every step. Keeping them on
// the heap instead of fresh mmap'd pages avoids a page-fault storm per op.
[[maybe_unused]] static const bool g_malloc_tuned = [] {
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  return true;
}();
#endif

// Vectorized kernels pick their peeling and summation order from the buffer
// address, so every buffer starts on a cache line to keep results independent
// of where the allocator put it.
template <class T>
struct CacheAligned {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};
  CacheAligned() = default;
  template <class U>
  CacheAligned(const CacheAligned<U>&) noexcept {}
  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }
  bool operator==(const CacheAligned&) const noexcept { return true; }
};

struct Tensor::Storage {
  using Buffer = std::vector<double, CacheAligned<double>>;
  Storage(std::size_t n, double fill) : data(n, fill) { account(); }
  explicit Storage(std::span<const double> v) : data(v.begin(), v.end()) { account(); }
  Storage(const Storage&) = delete;
  Storage& operator=(const Storage&) = delete;
  ~Storage() { g_live_bytes.fetch_sub(data.size() * sizeof(double)); }

  Buffer data;

 private:
  void account() { account_alloc(data.size() * sizeof(double)); }
};

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

MemoryStats memory_stats() { return {g_live_bytes.load(), g_peak_bytes.load()}; }

void reset_peak_bytes() { g_peak_bytes.store(g_live_bytes.load()); }

std::uint64_t mac_count() { return g_macs.load(std::memory_order_relaxed); }
void reset_mac_count() { g_macs.store(0); }
void add_macs(std::uint64_t n) { g_macs.fetch_add(n, std::memory_order_relaxed); }

Tensor::Tensor() : Tensor(Shape{}, 0.0) {}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)),
      storage_(std::make_shared<Storage>(element_count(shape_), fill)) {}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)) {
  if (values.size() != element_count(shape_)) {
    throw DimensionError("tensor of shape " + to_string(shape_) + " needs " +
                         std::to_string(element_count(shape_)) + " values, got " +
                         std::to_string(values.size()));
  }
  storage_ = std::make_shared<Storage>(std::span<const double>(values));
}

Tensor Tensor::scalar(double value) { return Tensor(Shape{}, value); }

Tensor Tensor::from(std::initializer_list<double> values) {
  return Tensor(Shape{values.size()}, std::vector<double>(values));
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         to_string(shape_));
  }
  return shape_[axis];
}

std::size_t Tensor::size() const noexcept { return storage_->data.size(); }

std::span<const double> Tensor::values() const noexcept { return storage_->data; }

std::span<double> Tensor::mutable_values() {
  if (storage_.use_count() > 1) {
    storage_ = std::make_shared<Storage>(std::span<const double>(storage_->data));
  }
  return storage_->data;
}

std::vector<double> Tensor::to_vector() const {
  return {storage_->data.begin(), storage_->data.end()};
}

double Tensor::at(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw DimensionError("index rank " + std::to_string(index.size()) +
                         " does not match shape " + to_string(shape_));
  }
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (std::size_t i : index) {
    if (i >= shape_[axis]) {
      throw DimensionError("index out of range for shape " + to_string(shape_));
    }
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return storage_->data[flat];
}

double Tensor::item() const {
  if (size() != 1) {
    throw ContractError("item() on tensor of shape " + to_string(shape_));
  }
  return storage_->data[0];
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(storage_->data.begin(), storage_->data.end(),
                     [](double v) { return std::isfinite(v); });
}

Tensor Tensor::detach() const {
  Tensor t = *this;
  t.graph_ = nullptr;
  t.node_.reset();
  return t;
}

Tensor Tensor::reshaped(Shape shape) const {
  if (element_count(shape) != size()) {
    throw DimensionError("cannot view " + to_string(shape_) + " as " + to_string(shape));
  }
  Tensor t = detach();
  t.shape_ = std::move(shape);
  return t;
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  auto x = a.values();
  auto y = b.values();
  return std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("max_abs_diff shape mismatch " + to_string(a.shape()) +
                         " vs " + to_string(b.shape()));
  }
  double m = 0.0;
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace tpgn
