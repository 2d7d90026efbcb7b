#include "hout/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace hout {

namespace {

std::size_t pow_st(int d, int k) {
    std::size_t p = 1;
    for (int i = 0; i < k; ++i) p *= static_cast<std::size_t>(d);
    return p;
}

void check_order(int order) {
    if (order < 1 || order > 4) throw OrderError("tensor order must be in {1,2,3,4}, got " + std::to_string(order));
}

}  // namespace

SymTensor::SymTensor(int order, int dim) : order_(order), dim_(dim) {
    check_order(order);
    if (dim < 1) throw ShapeError("tensor dimension must be >= 1");
    entries_.assign(pow_st(dim, order), 0.0);
}

SymTensor::SymTensor(int order, int dim, std::vector<double> entries) : order_(order), dim_(dim), entries_(std::move(entries)) {
    check_order(order);
    if (dim < 1) throw ShapeError("tensor dimension must be >= 1");
    if (entries_.size() != pow_st(dim, order))
        throw ShapeError("entry count does not match d^k");
}

double SymTensor::at(int i, int j) const { return entries_[static_cast<std::size_t>(i) * dim_ + j]; }
double& SymTensor::at(int i, int j) { return entries_[static_cast<std::size_t>(i) * dim_ + j]; }
double SymTensor::at(int i, int j, int k) const { return entries_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k]; }
double& SymTensor::at(int i, int j, int k) { return entries_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k]; }
double SymTensor::at(int i, int j, int k, int l) const {
    return entries_[((static_cast<std::size_t>(i) * dim_ + j) * dim_ + k) * dim_ + l];
}
double& SymTensor::at(int i, int j, int k, int l) {
    return entries_[((static_cast<std::size_t>(i) * dim_ + j) * dim_ + k) * dim_ + l];
}

std::array<int, 4> SymTensor::unravel(std::size_t flat) const {
    std::array<int, 4> idx{0, 0, 0, 0};
    for (int m = order_ - 1; m >= 0; --m) {
        idx[m] = static_cast<int>(flat % dim_);
        flat /= dim_;
    }
    return idx;
}

Vector SymTensor::to_vector() const {
    if (order_ != 1) throw OrderError("to_vector requires an order-1 tensor");
    return Eigen::Map<const Vector>(entries_.data(), dim_);
}

Matrix SymTensor::to_matrix() const {
    if (order_ != 2) throw OrderError("to_matrix requires an order-2 tensor");
    // Row-major storage vs Eigen's column-major: transpose of the map.  The
    // tensors we build are symmetric so this is a formality.
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(entries_.data(), dim_, dim_);
}

SymTensor SymTensor::from_matrix(const Matrix& m) {
    if (m.rows() != m.cols()) throw ShapeError("from_matrix requires a square matrix");
    SymTensor t(2, static_cast<int>(m.rows()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) t.at(i, j) = m(i, j);
    return t;
}

SymTensor& SymTensor::operator+=(const SymTensor& rhs) {
    if (order_ != rhs.order_ || dim_ != rhs.dim_) throw ShapeError("tensor shape mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
    return *this;
}

SymTensor& SymTensor::operator-=(const SymTensor& rhs) {
    if (order_ != rhs.order_ || dim_ != rhs.dim_) throw ShapeError("tensor shape mismatch");
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
    return *this;
}

SymTensor& SymTensor::operator*=(double c) {
    for (double& e : entries_) e *= c;
    return *this;
}

SymTensor tensor_power(const Vector& v, int k) {
    if (k < 2 || k > 4) throw OrderError("tensor_power supports k in {2,3,4}");
    const int d = static_cast<int>(v.size());
    SymTensor t(k, d);
    // Group the factors canonically (pair of smallest indices first) so every
    // permutation of an index tuple rounds identically: the result is
    // bit-exactly symmetric.
    Matrix pair(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) pair(i, j) = pair(j, i) = v[i] * v[j];
    std::size_t flat = 0;
    if (k == 2) {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) t[flat++] = pair(i, j);
    } else if (k == 3) {
        // product = (v_a * v_b) * v_c with c the largest index.
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int l = 0; l < d; ++l) {
                    const int hi = std::max({i, j, l});
                    const int a = i == hi ? j : i;
                    const int b = i == hi ? l : (j == hi ? l : j);
                    t[flat++] = pair(a, b) * v[hi];
                }
    } else {
        // product = (v_a * v_b) * (v_c * v_d) split into the two smallest and
        // the two largest indices.
        std::array<int, 4> s;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int l = 0; l < d; ++l)
                    for (int n = 0; n < d; ++n) {
                        s = {i, j, l, n};
                        std::sort(s.begin(), s.end());
                        t[flat++] = pair(s[0], s[1]) * pair(s[2], s[3]);
                    }
    }
    return t;
}

SymTensor n_mode_product(const SymTensor& t, const Vector& v, int n) {
    const int k = t.order();
    const int d = t.dim();
    if (v.size() != d) throw ShapeError("n_mode_product: vector dimension mismatch");
    if (n < 1 || n > k) throw ShapeError("n_mode_product: mode out of range");
    if (k == 1) throw OrderError("n_mode_product: cannot contract an order-1 tensor further");
    SymTensor out(k - 1, d);
    // Strides of the row-major layout; slot n (1-based) has stride d^{k-n}.
    std::size_t stride = 1;
    for (int m = 0; m < k - n; ++m) stride *= static_cast<std::size_t>(d);
    // Iterate output flat index; split it at the removed slot.
    const std::size_t inner = stride;  // product of dims after slot n
    const std::size_t result_size = out.size();
    for (std::size_t r = 0; r < result_size; ++r) {
        const std::size_t hi = r / inner;
        const std::size_t lo = r % inner;
        const double* base = t.data() + hi * inner * d + lo;
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += base[static_cast<std::size_t>(j) * inner] * v[j];
        out[r] = acc;
    }
    return out;
}

SymTensor contract_trailing(const SymTensor& t, const Vector& v) {
    const int d = t.dim();
    if (v.size() != d) throw ShapeError("contract_trailing: vector dimension mismatch");
    SymTensor out(t.order() - 1, d);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        t.data(), static_cast<Eigen::Index>(out.size()), d);
    Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size())) = m * v;
    return out;
}

Vector contract_all_but_one(const SymTensor& t, const Vector& v) {
    SymTensor cur = contract_trailing(t, v);
    while (cur.order() > 1) cur = contract_trailing(cur, v);
    return cur.to_vector();
}

double contract_all(const SymTensor& t, const Vector& v) {
    return contract_all_but_one(t, v).dot(v);
}

double frobenius_norm(const SymTensor& t) {
    return Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size())).norm();
}

SymTensor symmetrize(const SymTensor& t) {
    const int k = t.order();
    const int d = t.dim();
    if (k == 1) return t;
    // Accumulate sums per sorted index tuple, then broadcast the average.
    // Buckets whose entries are already all equal pass through unchanged, so
    // symmetrize is exactly idempotent.
    struct Bucket {
        double sum = 0.0;
        int count = 0;
        double first = 0.0;
        bool uniform = true;
    };
    std::map<std::array<int, 4>, Bucket> buckets;
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        auto idx = t.unravel(flat);
        std::sort(idx.begin(), idx.begin() + k);
        auto& b = buckets[idx];
        if (b.count == 0)
            b.first = t[flat];
        else if (t[flat] != b.first)
            b.uniform = false;
        b.sum += t[flat];
        ++b.count;
    }
    SymTensor out(k, d);
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        auto idx = t.unravel(flat);
        std::sort(idx.begin(), idx.begin() + k);
        const auto& b = buckets.at(idx);
        out[flat] = b.uniform ? b.first : b.sum / b.count;
    }
    return out;
}

bool is_symmetric(const SymTensor& t, double rel_tol) {
    const double scale = frobenius_norm(t);
    const SymTensor s = symmetrize(t);
    for (std::size_t flat = 0; flat < t.size(); ++flat)
        if (std::abs(t[flat] - s[flat]) > rel_tol * std::max(1.0, scale)) return false;
    return true;
}

Matrix unfold(const SymTensor& t) {
    const int k = t.order();
    const int d = t.dim();
    const std::size_t cols = t.size() / d;
    Matrix m(d, static_cast<Eigen::Index>(cols));
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        const auto idx = t.unravel(flat);
        std::size_t col = 0;
        std::size_t mult = 1;
        for (int s = 1; s < k; ++s) {
            col += static_cast<std::size_t>(idx[s]) * mult;
            mult *= static_cast<std::size_t>(d);
        }
        m(idx[0], static_cast<Eigen::Index>(col)) = t[flat];
    }
    return m;
}

SymTensor refold(const Matrix& m, int order, int dim) {
    SymTensor t(order, dim);
    if (m.rows() != dim || static_cast<std::size_t>(m.cols()) * dim != t.size())
        throw ShapeError("refold: matrix shape does not match (order, dim)");
    for (std::size_t flat = 0; flat < t.size(); ++flat) {
        const auto idx = t.unravel(flat);
        std::size_t col = 0;
        std::size_t mult = 1;
        for (int s = 1; s < order; ++s) {
            col += static_cast<std::size_t>(idx[s]) * mult;
            mult *= static_cast<std::size_t>(dim);
        }
        t[flat] = m(idx[0], static_cast<Eigen::Index>(col));
    }
    return t;
}

}  // namespace hout
