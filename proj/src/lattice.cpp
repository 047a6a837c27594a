#include "nmloc/lattice.hpp"

#include <algorithm>
#include <cstdlib>

#include "nmloc/error.hpp"

namespace nmloc {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::BoxMismatch: return "box mismatch";
    case ErrorKind::DegenerateSequence: return "degenerate sequence";
    case ErrorKind::DistalViolation: return "distal violation";
    case ErrorKind::TameRange: return "tame range";
    case ErrorKind::UnreducedDiagonal: return "unreduced diagonal";
    case ErrorKind::FixedPointStalled: return "fixed point stalled";
    case ErrorKind::NeumannSmallness: return "Neumann smallness failed";
    case ErrorKind::BoundViolation: return "bound violation";
    case ErrorKind::SymmetryDefect: return "symmetry defect";
    case ErrorKind::SpectrumSymmetry: return "spectrum comparison requires symmetry";
    case ErrorKind::PoleProximity: return "pole proximity";
    case ErrorKind::RationalFrequency: return "rational frequency";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "io error";
    }
    return "unknown";
}

LatticeBox::LatticeBox(int dimension, int radius, int interior_radius)
    : d_(dimension), n_rad_(radius), m_rad_(interior_radius) {
    if (d_ < 1 || n_rad_ < 1 || m_rad_ < 1)
        throw Error(ErrorKind::InvalidArgument, "box dimension and radii must be positive");
    if (m_rad_ > n_rad_)
        throw Error(ErrorKind::InvalidArgument, "interior_radius exceeds radius");

    const int s = side();
    size_ = 1;
    for (int u = 0; u < d_; ++u) size_ *= s;

    const std::int64_t base = 4 * static_cast<std::int64_t>(n_rad_) + 1;
    offset_count_ = 1;
    center_ = 0;
    std::int64_t pw = 1;
    for (int u = d_ - 1; u >= 0; --u) {
        center_ += 2 * static_cast<std::int64_t>(n_rad_) * pw;
        pw *= base;
    }
    offset_count_ = static_cast<int>(pw);

    coords_.resize(static_cast<std::size_t>(size_) * d_);
    lin_.resize(size_);
    for (int idx = 0; idx < size_; ++idx) {
        int rem = idx;
        std::int64_t lin = 0, p = 1;
        for (int u = d_ - 1; u >= 0; --u) {
            int c = rem % s - n_rad_;
            rem /= s;
            coords_[static_cast<std::size_t>(idx) * d_ + u] = c;
            lin += c * p;
            p *= base;
        }
        lin_[idx] = lin;
    }
}

std::optional<int> LatticeBox::index_of(std::span<const int> s) const {
    if (static_cast<int>(s.size()) != d_) return std::nullopt;
    int idx = 0;
    for (int u = 0; u < d_; ++u) {
        if (std::abs(s[u]) > n_rad_) return std::nullopt;
        idx = idx * side() + (s[u] + n_rad_);
    }
    return idx;
}

bool LatticeBox::contains(std::span<const int> s) const { return index_of(s).has_value(); }

bool LatticeBox::is_interior(int index) const { return sup_norm(site(index)) <= m_rad_; }

Site LatticeBox::decode_offset(int code) const {
    const int base = 4 * n_rad_ + 1;
    Site k(d_);
    int rem = code;
    for (int u = d_ - 1; u >= 0; --u) {
        k[u] = rem % base - 2 * n_rad_;
        rem /= base;
    }
    return k;
}

std::optional<int> LatticeBox::encode_offset(std::span<const int> k) const {
    if (static_cast<int>(k.size()) != d_) return std::nullopt;
    const int base = 4 * n_rad_ + 1;
    int code = 0;
    for (int u = 0; u < d_; ++u) {
        if (std::abs(k[u]) > 2 * n_rad_) return std::nullopt;
        code = code * base + (k[u] + 2 * n_rad_);
    }
    return code;
}

int sup_norm(std::span<const int> k) {
    int m = 0;
    for (int c : k) m = std::max(m, std::abs(c));
    return m;
}

double bracket(std::span<const int> k) { return std::max(1, sup_norm(k)); }

void require_same_box(const LatticeBox& a, const LatticeBox& b) {
    if (!(a == b)) throw Error(ErrorKind::BoxMismatch, "box mismatch");
}

}  // namespace nmloc
