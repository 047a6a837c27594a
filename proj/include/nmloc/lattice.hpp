#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nmloc {

using Site = std::vector<int>;

// Finite box {i in Z^d : |i|_inf <= N} with an interior window |i|_inf <= M.
// Sites are enumerated lexicographically, first coordinate slowest.
class LatticeBox {
public:
    LatticeBox() = default;
    LatticeBox(int dimension, int radius, int interior_radius);
    LatticeBox(int dimension, int radius) : LatticeBox(dimension, radius, radius) {}

    int dimension() const { return d_; }
    int radius() const { return n_rad_; }
    int interior_radius() const { return m_rad_; }
    int side() const { return 2 * n_rad_ + 1; }
    int size() const { return size_; }

    std::span<const int> site(int index) const {
        return {coords_.data() + static_cast<std::size_t>(index) * d_, static_cast<std::size_t>(d_)};
    }
    std::optional<int> index_of(std::span<const int> s) const;
    bool contains(std::span<const int> s) const;
    bool is_interior(int index) const;

    // Offsets i - j of two box sites range over [-2N, 2N]^d. offset_code maps
    // them bijectively onto [0, offset_count()).
    int offset_count() const { return offset_count_; }
    int offset_code(int i, int j) const {
        return static_cast<int>(lin_[i] - lin_[j] + center_);
    }
    Site decode_offset(int code) const;
    std::optional<int> encode_offset(std::span<const int> k) const;

    friend bool operator==(const LatticeBox& a, const LatticeBox& b) {
        return a.d_ == b.d_ && a.n_rad_ == b.n_rad_ && a.m_rad_ == b.m_rad_;
    }

private:
    int d_ = 0;
    int n_rad_ = 0;
    int m_rad_ = 0;
    int size_ = 0;
    int offset_count_ = 0;
    std::int64_t center_ = 0;
    std::vector<int> coords_;
    std::vector<std::int64_t> lin_;
};

int sup_norm(std::span<const int> k);
// <k> = max(1, |k|_inf)
double bracket(std::span<const int> k);

void require_same_box(const LatticeBox& a, const LatticeBox& b);

}  // namespace nmloc
