#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "sanne/tensor.hpp"
#include "sanne/threadpool.hpp"

namespace sanne {

namespace kernels {

// C(m x n) += A(m x k) * B(k x n)
template <typename T>
void mm_nn_acc(const T* a, const T* b, T* c, int m, int k, int n) {
  parallel_for(m, 8, [&](std::int64_t r0, std::int64_t r1) {
    for (std::int64_t i = r0; i < r1; ++i) {
      const T* ai = a + i * k;
      T* ci = c + i * n;
      for (int p = 0; p < k; ++p) {
        const T av = ai[p];
        if (av == T(0)) continue;
        const T* bp = b + static_cast<std::int64_t>(p) * n;
        for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
      }
    }
  });
}

// C(m x n) += A(m x k) * B(n x k)^T
template <typename T>
void mm_nt_acc(const T* a, const T* b, T* c, int m, int k, int n) {
  parallel_for(m, 8, [&](std::int64_t r0, std::int64_t r1) {
    for (std::int64_t i = r0; i < r1; ++i) {
      const T* ai = a + i * k;
      T* ci = c + i * n;
      for (int j = 0; j < n; ++j) {
        const T* bj = b + static_cast<std::int64_t>(j) * k;
        T acc = T(0);
        for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
        ci[j] += acc;
      }
    }
  });
}

// C(k x n) += A(m x k)^T * B(m x n)
template <typename T>
void mm_tn_acc(const T* a, const T* b, T* c, int m, int k, int n) {
  parallel_for(k, 8, [&](std::int64_t x0, std::int64_t x1) {
    for (std::int64_t x = x0; x < x1; ++x) {
      T* cx = c + x * n;
      for (int i = 0; i < m; ++i) {
        const T av = a[static_cast<std::int64_t>(i) * k + x];
        if (av == T(0)) continue;
        const T* bi = b + static_cast<std::int64_t>(i) * n;
        for (int j = 0; j < n; ++j) cx[j] += av * bi[j];
      }
    }
  });
}

}  // namespace kernels

// Reverse-mode tape. Ops append nodes in topological (creation) order;
// backward() walks the list once in reverse. One tape per training step,
// never shared across threads; parallelism lives inside the kernels.
template <typename T>
class TapeT {
 public:
  using Id = std::int32_t;

  TapeT() = default;
  TapeT(const TapeT&) = delete;
  TapeT& operator=(const TapeT&) = delete;

  Id leaf(TensorT<T> v) { return push("leaf", std::move(v)); }

  const TensorT<T>& val(Id id) const { return nodes_[id].value; }
  const TensorT<T>& grad(Id id) const { return nodes_[id].grad; }
  TensorT<T>& grad_mut(Id id) { return nodes_[id].grad; }
  std::size_t size() const { return nodes_.size(); }

  // ---------------------------------------------------------------- matmul
  Id matmul(Id a, Id b) {
    const auto& A = val(a);
    const auto& B = val(b);
    if (A.rank() != 2 || B.rank() != 2 || A.shape[1] != B.shape[0]) {
      fail("matmul", A.shape, B.shape);
    }
    const int m = A.shape[0], k = A.shape[1], n = B.shape[1];
    TensorT<T> out({m, n});
    kernels::mm_nn_acc(A.data.data(), B.data.data(), out.data.data(), m, k, n);
    const Id id = push("matmul", std::move(out));
    nodes_[id].back = [a, b, id, m, k, n](TapeT& t) {
      const T* dc = t.grad(id).data.data();
      kernels::mm_nt_acc(dc, t.val(b).data.data(), t.grad_mut(a).data.data(), m, n, k);
      kernels::mm_tn_acc(t.val(a).data.data(), dc, t.grad_mut(b).data.data(), m, k, n);
    };
    return id;
  }

  Id transpose(Id a) {
    const auto& A = val(a);
    if (A.rank() != 2) fail("transpose", A.shape);
    const int m = A.shape[0], n = A.shape[1];
    TensorT<T> out({n, m});
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) out.data[static_cast<std::int64_t>(j) * m + i] = A.data[static_cast<std::int64_t>(i) * n + j];
    const Id id = push("transpose", std::move(out));
    nodes_[id].back = [a, id, m, n](TapeT& t) {
      const auto& dc = t.grad(id);
      auto& da = t.grad_mut(a);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) da.data[static_cast<std::int64_t>(i) * n + j] += dc.data[static_cast<std::int64_t>(j) * m + i];
    };
    return id;
  }

  // Batched matmul over the leading dimension: [B,m,k] x [B,k,n] -> [B,m,n].
  Id bmm(Id a, Id b) {
    const auto& A = val(a);
    const auto& B = val(b);
    if (A.rank() != 3 || B.rank() != 3 || A.shape[0] != B.shape[0] || A.shape[2] != B.shape[1]) {
      fail("bmm", A.shape, B.shape);
    }
    const int nb = A.shape[0], m = A.shape[1], k = A.shape[2], n = B.shape[2];
    TensorT<T> out({nb, m, n});
    parallel_for(nb, 1, [&](std::int64_t b0, std::int64_t b1) {
      for (std::int64_t i = b0; i < b1; ++i) {
        mm_nn_serial(A.data.data() + i * m * k, B.data.data() + i * k * n,
                     out.data.data() + i * m * n, m, k, n);
      }
    });
    const Id id = push("bmm", std::move(out));
    nodes_[id].back = [a, b, id, nb, m, k, n](TapeT& t) {
      const auto& dc = t.grad(id);
      auto& da = t.grad_mut(a);
      auto& db = t.grad_mut(b);
      const auto& A2 = t.val(a);
      const auto& B2 = t.val(b);
      parallel_for(nb, 1, [&](std::int64_t b0, std::int64_t b1) {
        for (std::int64_t i = b0; i < b1; ++i) {
          mm_nt_serial(dc.data.data() + i * m * n, B2.data.data() + i * k * n,
                       da.data.data() + i * m * k, m, n, k);
          mm_tn_serial(A2.data.data() + i * m * k, dc.data.data() + i * m * n,
                       db.data.data() + i * k * n, m, k, n);
        }
      });
    };
    return id;
  }

  Id transpose_last2(Id a) {
    const auto& A = val(a);
    if (A.rank() != 3) fail("transpose_last2", A.shape);
    const int nb = A.shape[0], m = A.shape[1], n = A.shape[2];
    TensorT<T> out({nb, n, m});
    for (std::int64_t b = 0; b < nb; ++b) {
      const T* src = A.data.data() + b * m * n;
      T* dst = out.data.data() + b * m * n;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) dst[static_cast<std::int64_t>(j) * m + i] = src[static_cast<std::int64_t>(i) * n + j];
    }
    const Id id = push("transpose_last2", std::move(out));
    nodes_[id].back = [a, id, nb, m, n](TapeT& t) {
      const auto& dc = t.grad(id);
      auto& da = t.grad_mut(a);
      for (std::int64_t b = 0; b < nb; ++b) {
        const T* src = dc.data.data() + b * m * n;
        T* dst = da.data.data() + b * m * n;
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < m; ++i) dst[static_cast<std::int64_t>(i) * n + j] += src[static_cast<std::int64_t>(j) * m + i];
      }
    };
    return id;
  }

  // ------------------------------------------------------------ pointwise
  Id add(Id a, Id b) {
    const auto& A = val(a);
    const auto& B = val(b);
    if (!A.same_shape(B)) fail("add", A.shape, B.shape);
    TensorT<T> out = A;
    for (std::int64_t i = 0; i < out.numel(); ++i) out.data[i] += B.data[i];
    const Id id = push("add", std::move(out));
    nodes_[id].back = [a, b, id](TapeT& t) {
      const auto& dc = t.grad(id);
      auto& da = t.grad_mut(a);
      auto& db = t.grad_mut(b);
      for (std::int64_t i = 0; i < dc.numel(); ++i) {
        da.data[i] += dc.data[i];
        db.data[i] += dc.data[i];
      }
    };
    return id;
  }

  // a[..., C] + bias[C], broadcast over rows.
  Id bias_add(Id a, Id bias) {
    const auto& A = val(a);
    const auto& B = val(bias);
    if (B.rank() != 1 || B.shape[0] != A.last_dim()) fail("bias_add", A.shape, B.shape);
    const int c = A.last_dim();
    TensorT<T> out = A;
    for (std::int64_t r = 0; r < out.row_count(); ++r) {
      T* row = out.row(r);
      for (int j = 0; j < c; ++j) row[j] += B.data[j];
    }
    const Id id = push("bias_add", std::move(out));
    nodes_[id].back = [a, bias, id, c](TapeT& t) {
      const auto& dc = t.grad(id);
      auto& da = t.grad_mut(a);
      auto& db = t.grad_mut(bias);
      for (std::int64_t i = 0; i < dc.numel(); ++i) da.data[i] += dc.data[i];
      for (std::int64_t r = 0; r < dc.row_count(); ++r) {
        const T* row = dc.row(r);
        for (int j = 0; j < c; ++j) db.data[j] += row[j];
      }
    };
    return id;
  }

  Id relu(Id a) {
    TensorT<T> out = val(a);
    for (T& v : out.data) v = v > T(0) ? v : T(0);
    const Id id = push("relu", std::move(out));
    nodes_[id].back = [a, id](TapeT& t) {
      const auto& dc = t.grad(id);
      const auto& x = t.val(a);
      auto& da = t.grad_mut(a);
      for (std::int64_t i = 0; i < dc.numel(); ++i) {
        if (x.data[i] > T(0)) da.data[i] += dc.data[i];
      }
    };
    return id;
  }

  Id mul(Id a, Id b) {
    const auto& A = val(a);
    const auto& B = val(b);
    if (!A.same_shape(B)) fail("mul", A.shape, B.shape);
    TensorT<T> out = A;
    for (std::int64_t i = 0; i < out.numel(); ++i) out.data[i] *= B.data[i];
    const Id id = push("mul", std::move(out));
    nodes_[id].back = [a, b, id](TapeT& t) {
      const auto& dc = t.grad(id);
      const auto& A2 = t.val(a);
      const auto& B2 = t.val(b);
      auto& da = t.grad_mut(a);
      auto& db = t.grad_mut(b);
      for (std::int64_t i = 0; i < dc.numel(); ++i) {
        da.data[i] += dc.data[i] * B2.data[i];
        db.data[i] += dc.data[i] * A2.data[i];
      }
    };
    return id;
  }

  Id scale(Id a, double c) {
    TensorT<T> out = val(a);
    const T cv = static_cast<T>(c);
    for (T& v : out.data) v *= cv;
    const Id id = push("scale", std::move(out));
    nodes_[id].back = [a, id, cv](TapeT& t) {
      const auto& dc = t.grad(id);
      auto& da = t.grad_mut(a);
      for (std::int64_t i = 0; i < dc.numel(); ++i) da.data[i] += cv * dc.data[i];
    };
    return id;
  }

  // --------------------------------------------------------- restructuring
  Id concat_last(const std::vector<Id>& parts) {
    if (parts.empty()) throw ShapeError("concat_last: no inputs");
    const auto& first = val(parts[0]);
    std::vector<int> lead(first.shape.begin(), first.shape.end() - 1);
    int total = 0;
    std::vector<int> widths;
    for (Id p : parts) {
      const auto& v = val(p);
      std::vector<int> l(v.shape.begin(), v.shape.end() - 1);
      if (l != lead) fail("concat_last", first.shape, v.shape);
      widths.push_back(v.last_dim());
      total += v.last_dim();
    }
    std::vector<int> shape = lead;
    shape.push_back(total);
    TensorT<T> out(shape);
    const std::int64_t rows = out.row_count();
    for (std::int64_t r = 0; r < rows; ++r) {
      T* dst = out.row(r);
      for (std::size_t p = 0; p < parts.size(); ++p) {
        const T* src = val(parts[p]).row(r);
        std::copy(src, src + widths[p], dst);
        dst += widths[p];
      }
    }
    const Id id = push("concat_last", std::move(out));
    auto parts_copy = parts;
    nodes_[id].back = [parts_copy, widths, id](TapeT& t) {
      const auto& dc = t.grad(id);
      const std::int64_t rows = dc.row_count();
      for (std::int64_t r = 0; r < rows; ++r) {
        const T* src = dc.row(r);
        for (std::size_t p = 0; p < parts_copy.size(); ++p) {
          T* dst = t.grad_mut(parts_copy[p]).row(r);
          for (int j = 0; j < widths[p]; ++j) dst[j] += src[j];
          src += widths[p];
        }
      }
    };
    return id;
  }

  // Gather rows of a 2-D tensor; duplicate indices allowed.
  Id row_gather(Id a, std::vector<int> rows) {
    const auto& A = val(a);
    if (A.rank() != 2) fail("row_gather", A.shape);
    const int c = A.shape[1];
    for (int r : rows) {
      if (r < 0 || r >= A.shape[0]) {
        throw ShapeError("row_gather: index " + std::to_string(r) + " out of range for " +
                         shape_str(A.shape));
      }
    }
    TensorT<T> out({static_cast<int>(rows.size()), c});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const T* src = A.row(rows[i]);
      std::copy(src, src + c, out.row(static_cast<std::int64_t>(i)));
    }
    const Id id = push("row_gather", std::move(out));
    nodes_[id].back = [a, id, rows = std::move(rows), c](TapeT& t) {
      const auto& dc = t.grad(id);
      auto& da = t.grad_mut(a);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const T* src = dc.row(static_cast<std::int64_t>(i));
        T* dst = da.row(rows[i]);
        for (int j = 0; j < c; ++j) dst[j] += src[j];
      }
    };
    return id;
  }

  Id reshape(Id a, std::vector<int> shape) {
    const auto& A = val(a);
    TensorT<T> out;
    out.shape = std::move(shape);
    if (TensorT<T>::checked_count(out.shape) != A.numel()) fail("reshape", A.shape, out.shape);
    out.data = A.data;
    const Id id = push("reshape", std::move(out));
    nodes_[id].back = [a, id](TapeT& t) {
      const auto& dc = t.grad(id);
      auto& da = t.grad_mut(a);
      for (std::int64_t i = 0; i < dc.numel(); ++i) da.data[i] += dc.data[i];
    };
    return id;
  }

  // ------------------------------------------------------------ reductions
  Id softmax_rows(Id a) {
    const auto& A = val(a);
    const int c = A.last_dim();
    if (c < 1) fail("softmax_rows", A.shape);
    TensorT<T> out = A;
    const std::int64_t rows = out.row_count();
    parallel_for(rows, 32, [&](std::int64_t r0, std::int64_t r1) {
      for (std::int64_t r = r0; r < r1; ++r) {
        T* row = out.row(r);
        T mx = row[0];
        for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
        T sum = T(0);
        for (int j = 0; j < c; ++j) {
          row[j] = std::exp(row[j] - mx);
          sum += row[j];
        }
        for (int j = 0; j < c; ++j) row[j] /= sum;
      }
    });
    const Id id = push("softmax_rows", std::move(out));
    nodes_[id].back = [a, id, c](TapeT& t) {
      const auto& y = t.val(id);
      const auto& dy = t.grad(id);
      auto& da = t.grad_mut(a);
      const std::int64_t rows = y.row_count();
      parallel_for(rows, 32, [&](std::int64_t r0, std::int64_t r1) {
        for (std::int64_t r = r0; r < r1; ++r) {
          const T* yr = y.row(r);
          const T* dr = dy.row(r);
          T* dx = da.row(r);
          T dot = T(0);
          for (int j = 0; j < c; ++j) dot += yr[j] * dr[j];
          for (int j = 0; j < c; ++j) dx[j] += yr[j] * (dr[j] - dot);
        }
      });
    };
    return id;
  }

  // Row-wise log(sum(exp(x))) with max subtraction; output [..., 1].
  Id logsumexp_rows(Id a) {
    const auto& A = val(a);
    const int c = A.last_dim();
    if (c < 1) fail("logsumexp_rows", A.shape);
    std::vector<int> shape(A.shape.begin(), A.shape.end() - 1);
    shape.push_back(1);
    TensorT<T> out(shape);
    const std::int64_t rows = A.row_count();
    parallel_for(rows, 32, [&](std::int64_t r0, std::int64_t r1) {
      for (std::int64_t r = r0; r < r1; ++r) {
        const T* row = A.row(r);
        T mx = row[0];
        for (int j = 1; j < c; ++j) mx = std::max(mx, row[j]);
        T sum = T(0);
        for (int j = 0; j < c; ++j) sum += std::exp(row[j] - mx);
        out.data[r] = mx + std::log(sum);
      }
    });
    const Id id = push("logsumexp_rows", std::move(out));
    nodes_[id].back = [a, id, c](TapeT& t) {
      const auto& x = t.val(a);
      const auto& lse = t.val(id);
      const auto& dy = t.grad(id);
      auto& da = t.grad_mut(a);
      const std::int64_t rows = x.row_count();
      parallel_for(rows, 32, [&](std::int64_t r0, std::int64_t r1) {
        for (std::int64_t r = r0; r < r1; ++r) {
          const T* xr = x.row(r);
          T* dx = da.row(r);
          const T g = dy.data[r];
          const T l = lse.data[r];
          for (int j = 0; j < c; ++j) dx[j] += g * std::exp(xr[j] - l);
        }
      });
    };
    return id;
  }

  // Standardize the last axis (biased 1/d variance), then gamma * x + beta.
  Id layer_norm(Id a, Id gamma, Id beta, double eps) {
    const auto& A = val(a);
    const auto& G = val(gamma);
    const auto& Bt = val(beta);
    const int c = A.last_dim();
    if (c < 1 || G.rank() != 1 || G.shape[0] != c || Bt.rank() != 1 || Bt.shape[0] != c) {
      fail("layer_norm", A.shape, G.shape);
    }
    TensorT<T> out = A;
    const std::int64_t rows = out.row_count();
    const T te = static_cast<T>(eps);
    parallel_for(rows, 32, [&](std::int64_t r0, std::int64_t r1) {
      for (std::int64_t r = r0; r < r1; ++r) {
        T* row = out.row(r);
        T mean = T(0);
        for (int j = 0; j < c; ++j) mean += row[j];
        mean /= static_cast<T>(c);
        T var = T(0);
        for (int j = 0; j < c; ++j) {
          const T d = row[j] - mean;
          var += d * d;
        }
        var /= static_cast<T>(c);
        const T inv = T(1) / std::sqrt(var + te);
        for (int j = 0; j < c; ++j) row[j] = G.data[j] * ((row[j] - mean) * inv) + Bt.data[j];
      }
    });
    const Id id = push("layer_norm", std::move(out));
    nodes_[id].back = [a, gamma, beta, id, c, te](TapeT& t) {
      const auto& x = t.val(a);
      const auto& G2 = t.val(gamma);
      const auto& dy = t.grad(id);
      auto& da = t.grad_mut(a);
      auto& dg = t.grad_mut(gamma);
      auto& db = t.grad_mut(beta);
      const std::int64_t rows = x.row_count();
      // gamma/beta reductions run single-threaded; dx is per-row parallel.
      std::vector<T> xhat(static_cast<std::size_t>(rows) * c);
      std::vector<T> inv_std(rows);
      parallel_for(rows, 32, [&](std::int64_t r0, std::int64_t r1) {
        for (std::int64_t r = r0; r < r1; ++r) {
          const T* xr = x.row(r);
          T mean = T(0);
          for (int j = 0; j < c; ++j) mean += xr[j];
          mean /= static_cast<T>(c);
          T var = T(0);
          for (int j = 0; j < c; ++j) {
            const T d = xr[j] - mean;
            var += d * d;
          }
          var /= static_cast<T>(c);
          const T inv = T(1) / std::sqrt(var + te);
          inv_std[r] = inv;
          T* xh = xhat.data() + r * c;
          for (int j = 0; j < c; ++j) xh[j] = (xr[j] - mean) * inv;
        }
      });
      for (std::int64_t r = 0; r < rows; ++r) {
        const T* dr = dy.row(r);
        const T* xh = xhat.data() + r * c;
        for (int j = 0; j < c; ++j) {
          dg.data[j] += dr[j] * xh[j];
          db.data[j] += dr[j];
        }
      }
      parallel_for(rows, 32, [&](std::int64_t r0, std::int64_t r1) {
        for (std::int64_t r = r0; r < r1; ++r) {
          const T* dr = dy.row(r);
          const T* xh = xhat.data() + r * c;
          T* dx = da.row(r);
          T mean_g = T(0), mean_gx = T(0);
          for (int j = 0; j < c; ++j) {
            const T g = dr[j] * G2.data[j];
            mean_g += g;
            mean_gx += g * xh[j];
          }
          mean_g /= static_cast<T>(c);
          mean_gx /= static_cast<T>(c);
          for (int j = 0; j < c; ++j) {
            const T g = dr[j] * G2.data[j];
            dx[j] += (g - mean_g - xh[j] * mean_gx) * inv_std[r];
          }
        }
      });
    };
    return id;
  }

  Id sum_all(Id a) {
    const auto& A = val(a);
    TensorT<T> out({1});
    T acc = T(0);
    for (const T& v : A.data) acc += v;
    out.data[0] = acc;
    const Id id = push("sum_all", std::move(out));
    nodes_[id].back = [a, id](TapeT& t) {
      const T g = t.grad(id).data[0];
      auto& da = t.grad_mut(a);
      for (T& v : da.data) v += g;
    };
    return id;
  }

  // Sum of selected flat entries; duplicates accumulate.
  Id pick_sum(Id a, std::vector<std::int64_t> idx) {
    const auto& A = val(a);
    for (std::int64_t i : idx) {
      if (i < 0 || i >= A.numel()) {
        throw ShapeError("pick_sum: flat index " + std::to_string(i) + " out of range for " +
                         shape_str(A.shape));
      }
    }
    TensorT<T> out({1});
    T acc = T(0);
    for (std::int64_t i : idx) acc += A.data[i];
    out.data[0] = acc;
    const Id id = push("pick_sum", std::move(out));
    nodes_[id].back = [a, id, idx = std::move(idx)](TapeT& t) {
      const T g = t.grad(id).data[0];
      auto& da = t.grad_mut(a);
      for (std::int64_t i : idx) da.data[i] += g;
    };
    return id;
  }

  // ------------------------------------------------------------- backward
  void backward(Id loss) {
    if (val(loss).numel() != 1) {
      throw ShapeError("backward: loss must be scalar, got " + shape_str(val(loss).shape));
    }
    for (auto& n : nodes_) {
      n.grad = TensorT<T>(n.value.shape);
    }
    nodes_[loss].grad.data[0] = T(1);
    for (Id i = loss; i >= 0; --i) {
      if (nodes_[i].back) nodes_[i].back(*this);
    }
  }

 private:
  struct Node {
    const char* op;
    TensorT<T> value;
    TensorT<T> grad;
    std::function<void(TapeT&)> back;
  };

  std::vector<Node> nodes_;

  Id push(const char* op, TensorT<T> value) {
    if (!value.all_finite()) {
      throw NumericError(std::string(op) + ": non-finite value in output " +
                         shape_str(value.shape));
    }
    nodes_.push_back(Node{op, std::move(value), {}, nullptr});
    return static_cast<Id>(nodes_.size() - 1);
  }

  [[noreturn]] static void fail(const char* op, const std::vector<int>& a,
                                const std::vector<int>& b = {}) {
    std::string msg = std::string(op) + ": incompatible shapes " + shape_str(a);
    if (!b.empty()) msg += " and " + shape_str(b);
    throw ShapeError(msg);
  }

  // Serial kernels for per-slice work inside bmm (already parallel per batch).
  static void mm_nn_serial(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
      const T* ai = a + static_cast<std::int64_t>(i) * k;
      T* ci = c + static_cast<std::int64_t>(i) * n;
      for (int p = 0; p < k; ++p) {
        const T av = ai[p];
        if (av == T(0)) continue;
        const T* bp = b + static_cast<std::int64_t>(p) * n;
        for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
      }
    }
  }
  static void mm_nt_serial(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
      const T* ai = a + static_cast<std::int64_t>(i) * k;
      T* ci = c + static_cast<std::int64_t>(i) * n;
      for (int j = 0; j < n; ++j) {
        const T* bj = b + static_cast<std::int64_t>(j) * k;
        T acc = T(0);
        for (int p = 0; p < k; ++p) acc += ai[p] * bj[p];
        ci[j] += acc;
      }
    }
  }
  static void mm_tn_serial(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int x = 0; x < k; ++x) {
      T* cx = c + static_cast<std::int64_t>(x) * n;
      for (int i = 0; i < m; ++i) {
        const T av = a[static_cast<std::int64_t>(i) * k + x];
        if (av == T(0)) continue;
        const T* bi = b + static_cast<std::int64_t>(i) * n;
        for (int j = 0; j < n; ++j) cx[j] += av * bi[j];
      }
    }
  }
};

using Tape = TapeT<float>;
using Tape64 = TapeT<double>;

}  // namespace sanne
