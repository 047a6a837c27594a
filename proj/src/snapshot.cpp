#include "nmloc/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "nmloc/error.hpp"

namespace nmloc {

namespace {

constexpr char kMagic[4] = {'N', 'M', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw Error(ErrorKind::Io, "truncated snapshot");
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const LatticeOperator& x) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::Io, "cannot open " + path);
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, static_cast<std::int32_t>(x.box.dimension()));
    put(os, static_cast<std::int32_t>(x.box.radius()));
    put(os, static_cast<std::int32_t>(x.box.interior_radius()));
    const int n = x.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            put(os, x.a(i, j).real());
            put(os, x.a(i, j).imag());
        }
    if (!os) throw Error(ErrorKind::Io, "write failed for " + path);
}

LatticeOperator read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorKind::Io, "not a snapshot: " + path);
    if (get<std::uint32_t>(is) != kVersion) throw Error(ErrorKind::Io, "unsupported snapshot version");
    const int d = get<std::int32_t>(is);
    const int N = get<std::int32_t>(is);
    const int M = get<std::int32_t>(is);
    LatticeBox box(d, N, M);
    Eigen::MatrixXcd a(box.size(), box.size());
    for (int i = 0; i < box.size(); ++i)
        for (int j = 0; j < box.size(); ++j) {
            const double re = get<double>(is);
            const double im = get<double>(is);
            a(i, j) = {re, im};
        }
    return {box, std::move(a)};
}

nlohmann::json snapshot_to_json(const LatticeOperator& x) {
    nlohmann::json j;
    j["d"] = x.box.dimension();
    j["N"] = x.box.radius();
    j["M"] = x.box.interior_radius();
    auto& re = j["re"] = nlohmann::json::array();
    auto& im = j["im"] = nlohmann::json::array();
    for (int r = 0; r < x.size(); ++r)
        for (int c = 0; c < x.size(); ++c) {
            re.push_back(x.a(r, c).real());
            im.push_back(x.a(r, c).imag());
        }
    return j;
}

LatticeOperator snapshot_from_json(const nlohmann::json& j) {
    try {
        LatticeBox box(j.at("d").get<int>(), j.at("N").get<int>(), j.at("M").get<int>());
        const auto& re = j.at("re");
        const auto& im = j.at("im");
        const std::size_t n = box.size();
        if (re.size() != n * n || im.size() != n * n) throw Error(ErrorKind::Io, "snapshot entry count mismatch");
        Eigen::MatrixXcd a(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) a(r, c) = {re[r * n + c].get<double>(), im[r * n + c].get<double>()};
        return {box, std::move(a)};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Io, std::string("malformed snapshot: ") + e.what());
    }
}

}  // namespace nmloc
