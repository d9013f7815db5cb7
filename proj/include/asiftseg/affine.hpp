#pragma once

#include <algorithm>
#include <cmath>

#include "asiftseg/image.hpp"

namespace asiftseg {

// Simulated camera pose: zoom lambda, spin psi, tilt t, second-rotation
// angle phi. Latitude is derived from the tilt as arccos(1/t).
struct AffineParams {
    double lambda = 1.0;  // > 0
    double psi = 0.0;     // radians
    double t = 1.0;       // >= 1
    double phi = 0.0;     // radians, [0, pi)
};

// 2x2 linear map plus translation. Coordinates are continuous with the
// image domain [0,w] x [0,h]; pixel (i,j) sits at (i+0.5, j+0.5).
struct AffineMap {
    double m00 = 1.0, m01 = 0.0;
    double m10 = 0.0, m11 = 1.0;
    double tx = 0.0, ty = 0.0;

    void apply(double x, double y, double& ox, double& oy) const {
        ox = m00 * x + m01 * y + tx;
        oy = m10 * x + m11 * y + ty;
    }

    // Pixel-center coordinates in, pixel-center coordinates out.
    void apply_pixel(double x, double y, double& ox, double& oy) const {
        apply(x + 0.5, y + 0.5, ox, oy);
        ox -= 0.5;
        oy -= 0.5;
    }

    double det() const { return m00 * m11 - m01 * m10; }
};

// b after a: (b o a)(p) = b(a(p)).
inline AffineMap compose(const AffineMap& b, const AffineMap& a) {
    AffineMap r;
    r.m00 = b.m00 * a.m00 + b.m01 * a.m10;
    r.m01 = b.m00 * a.m01 + b.m01 * a.m11;
    r.m10 = b.m10 * a.m00 + b.m11 * a.m10;
    r.m11 = b.m10 * a.m01 + b.m11 * a.m11;
    r.tx = b.m00 * a.tx + b.m01 * a.ty + b.tx;
    r.ty = b.m10 * a.tx + b.m11 * a.ty + b.ty;
    return r;
}

inline AffineMap invert(const AffineMap& m) {
    const double d = m.det();
    if (!(std::abs(d) > 1e-12)) throw InvalidInput("affine map is singular");
    AffineMap r;
    r.m00 = m.m11 / d;
    r.m01 = -m.m01 / d;
    r.m10 = -m.m10 / d;
    r.m11 = m.m00 / d;
    r.tx = -(r.m00 * m.tx + r.m01 * m.ty);
    r.ty = -(r.m10 * m.tx + r.m11 * m.ty);
    return r;
}

inline AffineMap rotation_map(double angle) {
    AffineMap r;
    const double c = std::cos(angle), s = std::sin(angle);
    r.m00 = c;
    r.m01 = -s;
    r.m10 = s;
    r.m11 = c;
    return r;
}

inline AffineMap scale_map(double sx, double sy) {
    AffineMap r;
    r.m00 = sx;
    r.m11 = sy;
    return r;
}

// lambda * R(psi) * diag(t, 1) * R(phi); translation zero.
inline AffineMap compose_affine(const AffineParams& p) {
    if (!(p.lambda > 0.0)) throw InvalidInput("compose_affine: lambda must be > 0");
    if (!(p.t >= 1.0)) throw InvalidInput("compose_affine: tilt must be >= 1");
    AffineMap tilt = scale_map(p.t, 1.0);
    AffineMap m = compose(rotation_map(p.psi), compose(tilt, rotation_map(p.phi)));
    m.m00 *= p.lambda;
    m.m01 *= p.lambda;
    m.m10 *= p.lambda;
    m.m11 *= p.lambda;
    return m;
}

// A warped raster together with the map that was actually applied (the
// requested map followed by the bounding-box translation). Needed to send
// coordinates between the two frames.
struct Warped {
    Raster image;
    AffineMap map;
};

// Inverse-mapped bilinear warp. The output frame is the axis-aligned
// bounding box of the warped input corners, translated so its min corner is
// the origin. Samples falling outside the input contribute 0.
inline Warped affine_warp(const Raster& img, const AffineMap& map) {
    const double d = map.det();
    if (!(std::abs(d) > 1e-12)) throw InvalidInput("affine_warp: singular map");

    const double cx[4] = {0.0, double(img.width), double(img.width), 0.0};
    const double cy[4] = {0.0, 0.0, double(img.height), double(img.height)};
    double minx = 0, miny = 0, maxx = 0, maxy = 0;
    for (int i = 0; i < 4; ++i) {
        double ox, oy;
        map.apply(cx[i], cy[i], ox, oy);
        if (i == 0) {
            minx = maxx = ox;
            miny = maxy = oy;
        } else {
            minx = std::min(minx, ox);
            maxx = std::max(maxx, ox);
            miny = std::min(miny, oy);
            maxy = std::max(maxy, oy);
        }
    }

    Warped result;
    result.map = map;
    result.map.tx -= minx;
    result.map.ty -= miny;

    const int ow = std::max(1, static_cast<int>(std::ceil(maxx - minx - 1e-9)));
    const int oh = std::max(1, static_cast<int>(std::ceil(maxy - miny - 1e-9)));
    result.image = Raster(ow, oh);

    const AffineMap inv = invert(result.map);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double sx, sy;
            inv.apply(x + 0.5, y + 0.5, sx, sy);
            const double u = sx - 0.5, v = sy - 0.5;
            const int x0 = static_cast<int>(std::floor(u));
            const int y0 = static_cast<int>(std::floor(v));
            const double fx = u - x0, fy = v - y0;
            double acc = 0.0;
            for (int dy = 0; dy <= 1; ++dy) {
                for (int dx = 0; dx <= 1; ++dx) {
                    const int xi = x0 + dx, yi = y0 + dy;
                    if (!img.contains(xi, yi)) continue;
                    const double wgt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
                    acc += wgt * img.at(xi, yi);
                }
            }
            result.image.at(x, y) = acc;
        }
    }
    return result;
}

}  // namespace asiftseg
