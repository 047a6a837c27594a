#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nmloc/sequence.hpp"

namespace nmloc {

// Dense operator on the box. Entry (i, j) couples site i to site j; the
// k-diagonal is A_k(i) = A_{i, i-k}.
struct LatticeOperator {
    LatticeBox box;
    Eigen::MatrixXcd a;
    NormPolicy policy;

    LatticeOperator() = default;
    LatticeOperator(LatticeBox b, Eigen::MatrixXcd m, NormPolicy p = {});

    static LatticeOperator zero(const LatticeBox& box, NormPolicy p = {});
    static LatticeOperator identity(const LatticeBox& box, NormPolicy p = {});
    static LatticeOperator diagonal(const LatticeBox& box, const Eigen::VectorXcd& d, NormPolicy p = {});

    int size() const { return box.size(); }
};

LatticeOperator operator+(const LatticeOperator& x, const LatticeOperator& y);
LatticeOperator operator-(const LatticeOperator& x, const LatticeOperator& y);
LatticeOperator operator*(cplx c, const LatticeOperator& x);
LatticeOperator multiply(const LatticeOperator& x, const LatticeOperator& y);
LatticeOperator transpose(const LatticeOperator& x);

struct DiagonalOperator {
    LatticeBox box;
    Sequence diag;

    static DiagonalOperator from_values(const LatticeBox& box, Eigen::VectorXcd v, NormPolicy p = {});
    const Eigen::VectorXcd& values() const { return diag.values; }
    LatticeOperator to_operator() const;
};

DiagonalOperator diagonal_part(const LatticeOperator& x);

// A_k as a sequence; sites whose partner i-k leaves the box are absent.
Sequence diagonal_view(const LatticeOperator& x, std::span<const int> k);

// Algebra norm of every diagonal, indexed by LatticeBox::offset_code, with
// the weights <k> alongside. Offsets with no entries carry norm 0.
struct OffsetNorms {
    std::vector<double> norm;
    std::vector<double> weight;
    double evaluate(double s) const;
};

OffsetNorms offset_norms(const LatticeOperator& x);
double sobolev_norm(const LatticeOperator& x, double s);
std::vector<double> sobolev_norms(const LatticeOperator& x, std::span<const double> s);
// Plain max |entry|, a cheap scale for tolerances.
double max_entry(const LatticeOperator& x);

// Keeps entries with |i - j|_inf <= theta.
LatticeOperator smooth(const LatticeOperator& x, double theta);
Eigen::MatrixXcd smooth(const LatticeBox& box, const Eigen::MatrixXcd& x, double theta);

// Z_k(i) = sum_j X_j(i) Y_{k-j}(i-j), the diagonal form of the product,
// evaluated without forming X*Y.
Sequence product_diagonal(const LatticeOperator& x, const LatticeOperator& y, std::span<const int> k);

// Commutator [D, A] with D diagonal: entries (d_i - d_j) A_ij.
Eigen::MatrixXcd commutator_with_diagonal(const Eigen::VectorXcd& d, const Eigen::MatrixXcd& a);

}  // namespace nmloc
