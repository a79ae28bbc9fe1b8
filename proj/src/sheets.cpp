#include "flatlab/analysis.hpp"

#include "flatlab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

namespace flatlab {

namespace {

struct CellHash {
    std::size_t operator()(const std::vector<long long>& k) const noexcept
    {
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        for (long long v : k) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void join(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[std::max(a, b)] = std::min(a, b);
        }
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

SheetDecomposition sheet_decompose(const PointCloud& cloud, double eps, double density)
{
    if (!(eps > 0.0) || !(density > 0.0)) {
        throw InvalidArgument("sheet decomposition needs eps > 0 and density > 0");
    }
    const std::size_t n = static_cast<std::size_t>(cloud.ambient_dim());
    const std::size_t m = n - 1;
    const std::size_t count = cloud.size();
    if (count == 0) {
        throw EmptyWindow("empty cloud");
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double z = cloud.point(i)[m];
        if (std::abs(z) > eps * (1.0 + 1e-12)) {
            throw SlabViolation("point " + std::to_string(i) + " has |x_n| = " + std::to_string(std::abs(z)) +
                                " > eps = " + std::to_string(eps));
        }
    }

    const double radius = 2.0 * density;
    std::unordered_map<std::vector<long long>, std::vector<std::size_t>, CellHash> cells;
    std::vector<long long> key(m);
    auto cell_of = [&](std::span<const double> p) {
        for (std::size_t a = 0; a < m; ++a) {
            key[a] = static_cast<long long>(std::floor(p[a] / radius));
        }
        return key;
    };
    for (std::size_t i = 0; i < count; ++i) {
        cells[cell_of(cloud.point(i))].push_back(i);
    }

    // neighbours within the clustering radius, by base distance
    std::vector<std::vector<std::size_t>> nbr(count);
    std::size_t stencil = 1;
    for (std::size_t a = 0; a < m; ++a) {
        stencil *= 3;
    }
    for (std::size_t i = 0; i < count; ++i) {
        const auto p = cloud.point(i);
        const auto base = cell_of(p);
        std::vector<long long> probe(m);
        for (std::size_t code = 0; code < stencil; ++code) {
            std::size_t c = code;
            for (std::size_t a = 0; a < m; ++a) {
                probe[a] = base[a] + static_cast<long long>(c % 3) - 1;
                c /= 3;
            }
            auto it = cells.find(probe);
            if (it == cells.end()) {
                continue;
            }
            for (std::size_t j : it->second) {
                if (j == i) {
                    continue;
                }
                const auto q = cloud.point(j);
                double d2 = 0.0;
                for (std::size_t a = 0; a < m; ++a) {
                    d2 += (q[a] - p[a]) * (q[a] - p[a]);
                }
                if (d2 <= radius * radius) {
                    nbr[i].push_back(j);
                }
            }
        }
        std::sort(nbr[i].begin(), nbr[i].end());
    }

    // local slopes from the vertically close neighbours
    const double link = 0.25 * eps;
    std::vector<double> slope(count * m, 0.0);
    for (std::size_t i = 0; i < count; ++i) {
        const auto p = cloud.point(i);
        std::vector<std::size_t> close;
        for (std::size_t j : nbr[i]) {
            if (std::abs(cloud.point(j)[m] - p[m]) <= link) {
                close.push_back(j);
            }
        }
        if (close.size() < m) {
            continue;
        }
        Eigen::MatrixXd A(static_cast<Eigen::Index>(close.size()), static_cast<Eigen::Index>(m));
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(close.size()));
        for (std::size_t r = 0; r < close.size(); ++r) {
            const auto q = cloud.point(close[r]);
            for (std::size_t a = 0; a < m; ++a) {
                A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) = q[a] - p[a];
            }
            rhs(static_cast<Eigen::Index>(r)) = q[m] - p[m];
        }
        const Eigen::VectorXd g = A.colPivHouseholderQr().solve(rhs);
        if (g.allFinite()) {
            for (std::size_t a = 0; a < m; ++a) {
                slope[i * m + a] = g(static_cast<Eigen::Index>(a));
            }
        }
    }

    // vertical gap of q relative to the tangent plane through p
    auto gap = [&](std::size_t i, std::size_t j) {
        const auto p = cloud.point(i);
        const auto q = cloud.point(j);
        double pred = p[m];
        for (std::size_t a = 0; a < m; ++a) {
            pred += 0.5 * (slope[i * m + a] + slope[j * m + a]) * (q[a] - p[a]);
        }
        return q[m] - pred;
    };

    UnionFind uf(count);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j : nbr[i]) {
            if (j > i && std::abs(gap(i, j)) < link) {
                uf.join(i, j);
            }
        }
    }

    const double resolvable = 0.375 * eps;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j : nbr[i]) {
            if (j < i) {
                continue;
            }
            const double g = std::abs(gap(i, j));
            const bool same = uf.find(i) == uf.find(j);
            if (!same && g < resolvable) {
                throw AmbiguousSheets("vertical gap " + std::to_string(g) + " between sheets is below " +
                                      std::to_string(resolvable));
            }
            if (same && g >= resolvable) {
                throw AmbiguousSheets("a sheet folds over itself (vertical gap " + std::to_string(g) + ")");
            }
        }
    }

    // clusters ordered by mean height
    std::unordered_map<std::size_t, std::size_t> label;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t root = uf.find(i);
        auto [it, fresh] = label.emplace(root, members.size());
        if (fresh) {
            members.emplace_back();
        }
        members[it->second].push_back(i);
    }
    std::vector<double> mean(members.size(), 0.0);
    for (std::size_t c = 0; c < members.size(); ++c) {
        for (std::size_t i : members[c]) {
            mean[c] += cloud.point(i)[m];
        }
        mean[c] /= static_cast<double>(members[c].size());
    }
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean[a] < mean[b]; });
    std::vector<std::size_t> rank(members.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        rank[order[r]] = r;
    }
    std::vector<std::size_t> sheet_of(count);
    for (std::size_t c = 0; c < members.size(); ++c) {
        for (std::size_t i : members[c]) {
            sheet_of[i] = rank[c];
        }
    }

    bool ordered = true;
    for (std::size_t i = 0; i < count && ordered; ++i) {
        for (std::size_t j : nbr[i]) {
            if (sheet_of[j] > sheet_of[i] && !(gap(i, j) > 0.0)) {
                ordered = false;
                break;
            }
        }
    }

    SheetDecomposition out;
    out.N = members.size();
    out.ordered = ordered;
    out.connected = out.N == 1;
    out.density = density;
    for (std::size_t r = 0; r < order.size(); ++r) {
        std::vector<double> coords;
        coords.reserve(members[order[r]].size() * n);
        for (std::size_t i : members[order[r]]) {
            const auto p = cloud.point(i);
            coords.insert(coords.end(), p.begin(), p.end());
        }
        out.sheets.emplace_back(static_cast<int>(n), std::move(coords));
    }
    return out;
}

}  // namespace flatlab
