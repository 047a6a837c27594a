#include "nmloc/operator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCore>

#include "nmloc/error.hpp"

namespace nmloc {

LatticeOperator::LatticeOperator(LatticeBox b, Eigen::MatrixXcd m, NormPolicy p)
    : box(std::move(b)), a(std::move(m)), policy(std::move(p)) {
    if (a.rows() != box.size() || a.cols() != box.size())
        throw Error(ErrorKind::BoxMismatch, "matrix shape does not match box");
}

LatticeOperator LatticeOperator::zero(const LatticeBox& box, NormPolicy p) {
    return {box, Eigen::MatrixXcd::Zero(box.size(), box.size()), std::move(p)};
}

LatticeOperator LatticeOperator::identity(const LatticeBox& box, NormPolicy p) {
    return {box, Eigen::MatrixXcd::Identity(box.size(), box.size()), std::move(p)};
}

LatticeOperator LatticeOperator::diagonal(const LatticeBox& box, const Eigen::VectorXcd& d, NormPolicy p) {
    if (d.size() != box.size()) throw Error(ErrorKind::BoxMismatch, "diagonal length does not match box");
    return {box, d.asDiagonal().toDenseMatrix(), std::move(p)};
}

LatticeOperator operator+(const LatticeOperator& x, const LatticeOperator& y) {
    require_same_box(x.box, y.box);
    return {x.box, x.a + y.a, x.policy};
}

LatticeOperator operator-(const LatticeOperator& x, const LatticeOperator& y) {
    require_same_box(x.box, y.box);
    return {x.box, x.a - y.a, x.policy};
}

LatticeOperator operator*(cplx c, const LatticeOperator& x) { return {x.box, c * x.a, x.policy}; }

namespace {

// Below this fill fraction a factor is multiplied in compressed form.
constexpr double kSparseFill = 1.0 / 16.0;

bool is_sparse(const Eigen::MatrixXcd& m) {
    const Eigen::Index limit = static_cast<Eigen::Index>(kSparseFill * static_cast<double>(m.size()));
    Eigen::Index nnz = 0;
    for (Eigen::Index i = 0; i < m.size(); ++i)
        if (m.data()[i] != cplx(0.0) && ++nnz > limit) return false;
    return true;
}

}  // namespace

LatticeOperator multiply(const LatticeOperator& x, const LatticeOperator& y) {
    require_same_box(x.box, y.box);
    if (x.a.rows() >= 64) {
        if (is_sparse(y.a)) {
            const Eigen::SparseMatrix<cplx> ys = y.a.sparseView();
            return {x.box, x.a * ys, x.policy};
        }
        if (is_sparse(x.a)) {
            const Eigen::SparseMatrix<cplx> xs = x.a.sparseView();
            return {x.box, xs * y.a, x.policy};
        }
    }
    return {x.box, x.a * y.a, x.policy};
}

LatticeOperator transpose(const LatticeOperator& x) { return {x.box, x.a.transpose(), x.policy}; }

DiagonalOperator DiagonalOperator::from_values(const LatticeBox& box, Eigen::VectorXcd v, NormPolicy p) {
    return {box, Sequence::from_values(box, std::move(v), std::move(p))};
}

LatticeOperator DiagonalOperator::to_operator() const {
    return LatticeOperator::diagonal(box, diag.values, diag.policy);
}

DiagonalOperator diagonal_part(const LatticeOperator& x) {
    return DiagonalOperator::from_values(x.box, x.a.diagonal(), x.policy);
}

Sequence diagonal_view(const LatticeOperator& x, std::span<const int> k) {
    const LatticeBox& box = x.box;
    if (static_cast<int>(k.size()) != box.dimension())
        throw Error(ErrorKind::InvalidArgument, "offset dimension mismatch");
    Sequence s;
    s.box = box;
    s.policy = x.policy;
    s.values = Eigen::VectorXcd::Zero(box.size());
    s.valid.assign(box.size(), 0);
    Site pre(box.dimension());
    for (int i = 0; i < box.size(); ++i) {
        auto si = box.site(i);
        for (int u = 0; u < box.dimension(); ++u) pre[u] = si[u] - k[u];
        if (auto j = box.index_of(pre)) {
            s.values[i] = x.a(i, *j);
            s.valid[i] = 1;
        }
    }
    return s;
}

double OffsetNorms::evaluate(double s) const {
    double tot = 0.0;
    for (std::size_t c = 0; c < norm.size(); ++c) {
        if (norm[c] == 0.0) continue;
        const double t = norm[c] * std::pow(weight[c], s);
        tot += t * t;
    }
    return std::sqrt(tot);
}

OffsetNorms offset_norms(const LatticeOperator& x) {
    const LatticeBox& box = x.box;
    const int n = box.size();
    const int m = box.offset_count();
    OffsetNorms out;
    out.norm.assign(m, 0.0);
    out.weight.resize(m);
    for (int c = 0; c < m; ++c) out.weight[c] = bracket(box.decode_offset(c));

    if (x.policy.kind == NormKind::Sup) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double v = std::abs(x.a(i, j));
                double& slot = out.norm[box.offset_code(i, j)];
                if (v > slot) slot = v;
            }
        return out;
    }

    std::vector<std::vector<int>> sites(m);
    std::vector<std::vector<cplx>> vals(m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int c = box.offset_code(i, j);
            sites[c].push_back(i);
            vals[c].push_back(x.a(i, j));
        }
    for (int c = 0; c < m; ++c) {
        if (sites[c].empty()) continue;
        bool nonzero = false;
        for (const cplx& v : vals[c]) nonzero = nonzero || v != cplx(0.0, 0.0);
        if (nonzero) out.norm[c] = policy_norm(box, x.policy, sites[c], vals[c]);
    }
    return out;
}

double sobolev_norm(const LatticeOperator& x, double s) { return offset_norms(x).evaluate(s); }

std::vector<double> sobolev_norms(const LatticeOperator& x, std::span<const double> s) {
    const OffsetNorms on = offset_norms(x);
    std::vector<double> out;
    out.reserve(s.size());
    for (double v : s) out.push_back(on.evaluate(v));
    return out;
}

double max_entry(const LatticeOperator& x) { return x.a.size() ? x.a.cwiseAbs().maxCoeff() : 0.0; }

Eigen::MatrixXcd smooth(const LatticeBox& box, const Eigen::MatrixXcd& x, double theta) {
    const int n = box.size();
    const int d = box.dimension();
    Eigen::MatrixXcd out = x;
    for (int j = 0; j < n; ++j) {
        auto sj = box.site(j);
        for (int i = 0; i < n; ++i) {
            auto si = box.site(i);
            int dist = 0;
            for (int u = 0; u < d; ++u) dist = std::max(dist, std::abs(si[u] - sj[u]));
            if (dist > theta) out(i, j) = 0.0;
        }
    }
    return out;
}

LatticeOperator smooth(const LatticeOperator& x, double theta) {
    return {x.box, smooth(x.box, x.a, theta), x.policy};
}

Sequence product_diagonal(const LatticeOperator& x, const LatticeOperator& y, std::span<const int> k) {
    require_same_box(x.box, y.box);
    const LatticeBox& box = x.box;
    const int d = box.dimension();
    const int n = box.size();
    Sequence z;
    z.box = box;
    z.policy = x.policy;
    z.values = Eigen::VectorXcd::Zero(n);
    z.valid.assign(n, 0);

    Site target(d);
    for (int i = 0; i < n; ++i) {
        auto si = box.site(i);
        for (int u = 0; u < d; ++u) target[u] = si[u] - k[u];
        if (box.contains(target)) z.valid[i] = 1;
    }

    Site kmj(d);
    for (int c = 0; c < box.offset_count(); ++c) {
        const Site j = box.decode_offset(c);
        bool in_range = true;
        for (int u = 0; u < d; ++u) {
            kmj[u] = k[u] - j[u];
            in_range = in_range && std::abs(kmj[u]) <= 2 * box.radius();
        }
        if (!in_range) continue;
        const Sequence xj = diagonal_view(x, j);
        const Sequence ys = translate(diagonal_view(y, kmj), j);
        for (int i = 0; i < n; ++i)
            if (z.valid[i] && xj.valid[i] && ys.valid[i]) z.values[i] += xj.values[i] * ys.values[i];
    }
    return z;
}

Eigen::MatrixXcd commutator_with_diagonal(const Eigen::VectorXcd& d, const Eigen::MatrixXcd& a) {
    Eigen::MatrixXcd out(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) out(i, j) = (d[i] - d[j]) * a(i, j);
    return out;
}

}  // namespace nmloc
