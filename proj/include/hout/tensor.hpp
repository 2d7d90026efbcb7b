#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "hout/errors.hpp"

namespace hout {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Dense symmetric tensor of order k in {1,2,3,4}, dimension d.
// Entries are stored row-major with the first index slowest, i.e. the flat
// index of (i1,...,ik) is ((i1*d + i2)*d + ...)*d + ik.  Orders 2..4 are the
// public construction range; order 1 arises as a contraction result and
// converts to a Vector.
class SymTensor {
public:
    SymTensor(int order, int dim);
    SymTensor(int order, int dim, std::vector<double> entries);

    int order() const { return order_; }
    int dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }

    double* data() { return entries_.data(); }
    const double* data() const { return entries_.data(); }
    const std::vector<double>& entries() const { return entries_; }

    double operator[](std::size_t flat) const { return entries_[flat]; }
    double& operator[](std::size_t flat) { return entries_[flat]; }

    double at(int i, int j) const;
    double at(int i, int j, int k) const;
    double at(int i, int j, int k, int l) const;
    double& at(int i, int j);
    double& at(int i, int j, int k);
    double& at(int i, int j, int k, int l);

    // Decodes a flat index into its (i1,...,ik) tuple.
    std::array<int, 4> unravel(std::size_t flat) const;

    Vector to_vector() const;   // order 1 only
    Matrix to_matrix() const;   // order 2 only
    static SymTensor from_matrix(const Matrix& m);

    SymTensor& operator+=(const SymTensor& rhs);
    SymTensor& operator-=(const SymTensor& rhs);
    SymTensor& operator*=(double c);
    friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
    friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
    friend SymTensor operator*(double c, SymTensor t) { return t *= c; }

private:
    int order_;
    int dim_;
    std::vector<double> entries_;
};

// v^{(x)k}: entries are products v_{i1}...v_{ik}; symmetric by construction.
SymTensor tensor_power(const Vector& v, int k);

// Contraction of slot n (1-based) against v; order drops by one.  For a
// symmetric tensor the result is independent of n.
SymTensor n_mode_product(const SymTensor& t, const Vector& v, int n);

// Contraction of the trailing slot only; the fast path (a gemv on the
// d^{k-1} x d reshaping) used by the power method's inner loop.
SymTensor contract_trailing(const SymTensor& t, const Vector& v);

// T x v ... x v with k-1 copies of v: the eigen-equation left-hand side.
Vector contract_all_but_one(const SymTensor& t, const Vector& v);

// Full contraction sum T_{i1..ik} v_{i1}...v_{ik}.
double contract_all(const SymTensor& t, const Vector& v);

double frobenius_norm(const SymTensor& t);

// Averages entries over all index permutations.
SymTensor symmetrize(const SymTensor& t);

bool is_symmetric(const SymTensor& t, double rel_tol = 1e-12);

// Reshape into a d x d^{k-1} matrix: row index i1, column index
// sum_{m=2..k} i_m * d^{m-2} (0-based).
Matrix unfold(const SymTensor& t);
SymTensor refold(const Matrix& m, int order, int dim);

}  // namespace hout
