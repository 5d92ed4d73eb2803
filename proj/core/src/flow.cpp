#include "msihar/flow.hpp"

#include <algorithm>
#include <cmath>

namespace msihar {

GrayFrame::GrayFrame(int height, int width, std::vector<double> intensities)
    : height_(height), width_(width), intensities_(std::move(intensities)) {
    if (height_ < 1 || width_ < 1) {
        throw DimensionMismatch("frame must be at least 1x1");
    }
    if (intensities_.size() !=
        static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_)) {
        throw DimensionMismatch("intensity buffer size does not match H*W");
    }
    for (double v : intensities_) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw NonFiniteValue("intensities must be finite and in [0,1]");
        }
    }
}

FlowField normalize_flow(const FlowField& raw) {
    if (raw.normalized()) {
        throw AlreadyNormalized("flow field is already frame-normalized");
    }
    const float inv_h = 1.0f / static_cast<float>(raw.height());
    const float inv_w = 1.0f / static_cast<float>(raw.width());
    std::vector<float> u = raw.u();
    std::vector<float> v = raw.v();
    for (auto& x : u) x *= inv_h;
    for (auto& x : v) x *= inv_w;
    return FlowField(raw.height(), raw.width(), std::move(u), std::move(v), true);
}

namespace {

inline int clamp_idx(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

struct Derivatives {
    std::vector<double> dr;  // d/drow of the mean frame
    std::vector<double> dc;  // d/dcol of the mean frame
    std::vector<double> dt;  // b - a
};

Derivatives compute_derivatives(const GrayFrame& a, const GrayFrame& b) {
    const int h = a.height();
    const int w = a.width();
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::vector<double> mean(n);
    Derivatives d;
    d.dr.resize(n);
    d.dc.resize(n);
    d.dt.resize(n);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            mean[static_cast<std::size_t>(r) * w + c] = 0.5 * (a.at(r, c) + b.at(r, c));
        }
    }
    auto m = [&](int r, int c) {
        return mean[static_cast<std::size_t>(clamp_idx(r, h)) * w + clamp_idx(c, w)];
    };
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            d.dr[i] = 0.5 * (m(r + 1, c) - m(r - 1, c));
            d.dc[i] = 0.5 * (m(r, c + 1) - m(r, c - 1));
            d.dt[i] = b.at(r, c) - a.at(r, c);
        }
    }
    return d;
}

// Mean of the in-bounds 4-neighbors (2 at corners, 3 at edges).
void neighbor_means(const std::vector<double>& x, int h, int w,
                    std::vector<double>& out) {
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double sum = 0.0;
            int cnt = 0;
            if (r > 0) { sum += x[static_cast<std::size_t>(r - 1) * w + c]; ++cnt; }
            if (r + 1 < h) { sum += x[static_cast<std::size_t>(r + 1) * w + c]; ++cnt; }
            if (c > 0) { sum += x[static_cast<std::size_t>(r) * w + c - 1]; ++cnt; }
            if (c + 1 < w) { sum += x[static_cast<std::size_t>(r) * w + c + 1]; ++cnt; }
            out[static_cast<std::size_t>(r) * w + c] = sum / cnt;
        }
    }
}

}  // namespace

FlowField horn_schunck(const GrayFrame& a, const GrayFrame& b,
                       const HornSchunckParams& params,
                       const SweepObserver& observer) {
    if (a.height() != b.height() || a.width() != b.width()) {
        throw DimensionMismatch("frame pair dimensions differ");
    }
    if (a.height() < 3 || a.width() < 3) {
        throw FrameTooSmall("Horn-Schunck needs at least a 3x3 frame");
    }
    if (!(params.alpha > 0.0) || params.iterations < 1) {
        throw Error("invalid Horn-Schunck parameters");
    }

    const int h = a.height();
    const int w = a.width();
    const std::size_t n = static_cast<std::size_t>(h) * w;
    const Derivatives d = compute_derivatives(a, b);
    const double alpha2 = params.alpha * params.alpha;

    std::vector<double> u(n, 0.0), v(n, 0.0);
    std::vector<double> ubar(n), vbar(n), u_next(n), v_next(n);

    for (int iter = 0; iter < params.iterations; ++iter) {
        neighbor_means(u, h, w, ubar);
        neighbor_means(v, h, w, vbar);
        double max_update = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double denom = alpha2 + d.dr[i] * d.dr[i] + d.dc[i] * d.dc[i];
            const double shared =
                (d.dr[i] * ubar[i] + d.dc[i] * vbar[i] + d.dt[i]) / denom;
            u_next[i] = ubar[i] - d.dr[i] * shared;
            v_next[i] = vbar[i] - d.dc[i] * shared;
            max_update = std::max(max_update, std::abs(u_next[i] - u[i]));
            max_update = std::max(max_update, std::abs(v_next[i] - v[i]));
        }
        u.swap(u_next);
        v.swap(v_next);
        if (observer) observer(u, v);
        if (max_update < params.convergence_eps) break;
    }

    std::vector<float> uf(n), vf(n);
    for (std::size_t i = 0; i < n; ++i) {
        uf[i] = static_cast<float>(u[i]);
        vf[i] = static_cast<float>(v[i]);
    }
    return FlowField(h, w, std::move(uf), std::move(vf), false);
}

double horn_schunck_energy(const GrayFrame& a, const GrayFrame& b,
                           const std::vector<double>& u,
                           const std::vector<double>& v, double alpha) {
    const int h = a.height();
    const int w = a.width();
    const std::size_t n = static_cast<std::size_t>(h) * w;
    if (u.size() != n || v.size() != n) {
        throw DimensionMismatch("displacement planes do not match frame size");
    }
    const Derivatives d = compute_derivatives(a, b);
    double data = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double resid = d.dr[i] * u[i] + d.dc[i] * v[i] + d.dt[i];
        data += resid * resid;
    }
    // Pair weight alpha^2/4 matches the per-pixel solve in the Jacobi sweep
    // (interior degree 4).
    double smooth = 0.0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            if (c + 1 < w) {
                const double du = u[i + 1] - u[i];
                const double dv = v[i + 1] - v[i];
                smooth += du * du + dv * dv;
            }
            if (r + 1 < h) {
                const double du = u[i + w] - u[i];
                const double dv = v[i + w] - v[i];
                smooth += du * du + dv * dv;
            }
        }
    }
    return data + 0.25 * alpha * alpha * smooth;
}

}  // namespace msihar
