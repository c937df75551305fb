#pragma once

// Uniform-grid nearest-neighbor indices for 2D pixel sets and 3D point
// clouds. Brute force stays available as the test oracle.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dogfit/linalg.hpp"

namespace dogfit {

inline int brute_force_nearest(const std::vector<Vec2<double>>& pts, const Vec2<double>& q) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = dot(pts[i] - q, pts[i] - q);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

inline int brute_force_nearest(const std::vector<Vec3<double>>& pts, const Vec3<double>& q) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = dot(pts[i] - q, pts[i] - q);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

class Grid2 {
public:
    explicit Grid2(const std::vector<Vec2<double>>& pts) : pts_(pts) {
        if (pts.empty()) throw std::invalid_argument("Grid2: empty point set");
        lo_ = pts[0];
        Vec2<double> hi = pts[0];
        for (const auto& p : pts) {
            lo_.x = std::min(lo_.x, p.x);
            lo_.y = std::min(lo_.y, p.y);
            hi.x = std::max(hi.x, p.x);
            hi.y = std::max(hi.y, p.y);
        }
        const double span = std::max({hi.x - lo_.x, hi.y - lo_.y, 1e-9});
        const int target = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(pts.size()))));
        cell_ = span / target;
        nx_ = cell_index(hi.x, lo_.x) + 1;
        ny_ = cell_index(hi.y, lo_.y) + 1;
        buckets_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), {});
        for (std::size_t i = 0; i < pts.size(); ++i)
            buckets_[bucket_of(pts[i])].push_back(static_cast<int>(i));
    }

    int nearest(const Vec2<double>& q) const {
        const int cx = std::clamp(cell_index(q.x, lo_.x), 0, nx_ - 1);
        const int cy = std::clamp(cell_index(q.y, lo_.y), 0, ny_ - 1);
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        const int max_ring = std::max(nx_, ny_);
        for (int ring = 0; ring <= max_ring; ++ring) {
            if (best >= 0) {
                const double reach = (ring - 1) * cell_;  // closest possible point in this ring
                if (reach > 0.0 && reach * reach > best_d2) break;
            }
            for (int dy = -ring; dy <= ring; ++dy)
                for (int dx = -ring; dx <= ring; ++dx) {
                    if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
                    const int x = cx + dx, y = cy + dy;
                    if (x < 0 || x >= nx_ || y < 0 || y >= ny_) continue;
                    for (int i : buckets_[static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) +
                                          static_cast<std::size_t>(x)]) {
                        const Vec2<double> d = pts_[static_cast<std::size_t>(i)] - q;
                        const double d2 = dot(d, d);
                        if (d2 < best_d2) {
                            best_d2 = d2;
                            best = i;
                        }
                    }
                }
        }
        return best;
    }

private:
    int cell_index(double v, double lo) const { return static_cast<int>((v - lo) / cell_); }
    std::size_t bucket_of(const Vec2<double>& p) const {
        const int x = std::clamp(cell_index(p.x, lo_.x), 0, nx_ - 1);
        const int y = std::clamp(cell_index(p.y, lo_.y), 0, ny_ - 1);
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(x);
    }

    std::vector<Vec2<double>> pts_;
    Vec2<double> lo_;
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

class Grid3 {
public:
    explicit Grid3(const std::vector<Vec3<double>>& pts) : pts_(pts) {
        if (pts.empty()) throw std::invalid_argument("Grid3: empty point set");
        lo_ = pts[0];
        Vec3<double> hi = pts[0];
        for (const auto& p : pts) {
            lo_.x = std::min(lo_.x, p.x);
            lo_.y = std::min(lo_.y, p.y);
            lo_.z = std::min(lo_.z, p.z);
            hi.x = std::max(hi.x, p.x);
            hi.y = std::max(hi.y, p.y);
            hi.z = std::max(hi.z, p.z);
        }
        const double span = std::max({hi.x - lo_.x, hi.y - lo_.y, hi.z - lo_.z, 1e-9});
        const int target = std::max(1, static_cast<int>(std::cbrt(static_cast<double>(pts.size()))));
        cell_ = span / target;
        nx_ = idx(hi.x, lo_.x) + 1;
        ny_ = idx(hi.y, lo_.y) + 1;
        nz_ = idx(hi.z, lo_.z) + 1;
        buckets_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_) *
                            static_cast<std::size_t>(nz_),
                        {});
        for (std::size_t i = 0; i < pts.size(); ++i)
            buckets_[bucket_of(pts[i])].push_back(static_cast<int>(i));
    }

    int nearest(const Vec3<double>& q) const {
        const int cx = std::clamp(idx(q.x, lo_.x), 0, nx_ - 1);
        const int cy = std::clamp(idx(q.y, lo_.y), 0, ny_ - 1);
        const int cz = std::clamp(idx(q.z, lo_.z), 0, nz_ - 1);
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        const int max_ring = std::max({nx_, ny_, nz_});
        for (int ring = 0; ring <= max_ring; ++ring) {
            if (best >= 0) {
                const double reach = (ring - 1) * cell_;
                if (reach > 0.0 && reach * reach > best_d2) break;
            }
            for (int dz = -ring; dz <= ring; ++dz)
                for (int dy = -ring; dy <= ring; ++dy)
                    for (int dx = -ring; dx <= ring; ++dx) {
                        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
                        const int x = cx + dx, y = cy + dy, z = cz + dz;
                        if (x < 0 || x >= nx_ || y < 0 || y >= ny_ || z < 0 || z >= nz_) continue;
                        for (int i : buckets_[bucket(x, y, z)]) {
                            const Vec3<double> d = pts_[static_cast<std::size_t>(i)] - q;
                            const double d2 = dot(d, d);
                            if (d2 < best_d2) {
                                best_d2 = d2;
                                best = i;
                            }
                        }
                    }
        }
        return best;
    }

    // True when some point lies within radius r of q.
    bool has_within(const Vec3<double>& q, double r) const {
        const int n = nearest(q);
        const Vec3<double> d = pts_[static_cast<std::size_t>(n)] - q;
        return dot(d, d) <= r * r;
    }

private:
    int idx(double v, double lo) const { return static_cast<int>((v - lo) / cell_); }
    std::size_t bucket(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * static_cast<std::size_t>(ny_) +
                static_cast<std::size_t>(y)) *
                   static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(x);
    }
    std::size_t bucket_of(const Vec3<double>& p) const {
        return bucket(std::clamp(idx(p.x, lo_.x), 0, nx_ - 1), std::clamp(idx(p.y, lo_.y), 0, ny_ - 1),
                      std::clamp(idx(p.z, lo_.z), 0, nz_ - 1));
    }

    std::vector<Vec3<double>> pts_;
    Vec3<double> lo_;
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1, nz_ = 1;
    std::vector<std::vector<int>> buckets_;
};

}  // namespace dogfit
