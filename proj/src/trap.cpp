#include "odt/trap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "odt/constants.hpp"
#include "odt/errors.hpp"

namespace odt {

namespace c = constants;

double dipole_coefficient(const AtomSpecies& species, double wavelength) {
    if (!(wavelength > 0.0)) throw std::invalid_argument("wavelength must be positive");
    if (wavelength <= species.d1_wavelength)
        throw std::invalid_argument(
            "dipole coefficient requires red detuning from the lower-frequency line");
    const double w = 2.0 * c::pi * c::speed_of_light / wavelength;
    const double w1 = 2.0 * c::pi * c::speed_of_light / species.d1_wavelength;
    const double w2 = 2.0 * c::pi * c::speed_of_light / species.d2_wavelength;
    const double pref = 3.0 * c::pi * c::speed_of_light * c::speed_of_light / 2.0;
    // Line-strength weights 1/3 and 2/3 for the lower and upper fine-structure
    // lines of an alkali ground state.
    return pref * ((1.0 / 3.0) * species.d1_linewidth / (w1 * w1 * w1 * (w1 - w)) +
                   (2.0 / 3.0) * species.d2_linewidth / (w2 * w2 * w2 * (w2 - w)));
}

double potential_at(const TrapConfig& trap, const Vec3& point) {
    double u = 0.0;
    for (const auto& b : trap.beams) {
        if (b.power <= 0.0) continue;
        u -= dipole_coefficient(trap.species, b.wavelength) * beam_intensity(b, point);
    }
    if (trap.gravity_enabled) u += trap.species.mass * trap.gravity_acceleration * point.z;
    return u;
}

double potential_gradient_at(const TrapConfig& trap, const Vec3& point, Vec3& grad_out) {
    double u = 0.0;
    Vec3 g{0.0, 0.0, 0.0};
    for (const auto& b : trap.beams) {
        if (b.power <= 0.0) continue;
        const double kappa = dipole_coefficient(trap.species, b.wavelength);
        Vec3 gi;
        u -= kappa * beam_intensity_gradient(b, point, gi);
        g -= kappa * gi;
    }
    if (trap.gravity_enabled) {
        const double mg = trap.species.mass * trap.gravity_acceleration;
        u += mg * point.z;
        g.z += mg;
    }
    grad_out = g;
    return u;
}

namespace {

double min_active_waist(const TrapConfig& trap) {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& b : trap.beams) {
        if (b.power <= 0.0) continue;
        w = std::min({w, b.waist_x, b.waist_y});
    }
    return w;
}

// Nelder-Mead simplex descent in 3D; coarse localization only, the Newton
// polish below supplies the precision.
Vec3 nelder_mead(const TrapConfig& trap, const Vec3& start, double scale) {
    struct Node {
        Vec3 x;
        double f;
    };
    auto eval = [&](const Vec3& p) { return potential_at(trap, p); };
    std::vector<Node> s(4);
    s[0] = {start, eval(start)};
    const Vec3 steps[3] = {{scale, 0, 0}, {0, scale, 0}, {0, 0, scale}};
    for (int i = 0; i < 3; ++i) {
        Vec3 p = start + steps[i];
        s[static_cast<size_t>(i) + 1] = {p, eval(p)};
    }
    auto by_f = [](const Node& a, const Node& b) { return a.f < b.f; };
    for (int it = 0; it < 500; ++it) {
        std::sort(s.begin(), s.end(), by_f);
        const double spread = std::abs(s[3].f - s[0].f);
        if (spread < 1e-9 * (std::abs(s[0].f) + 1e-300)) break;
        const Vec3 centroid = (s[0].x + s[1].x + s[2].x) / 3.0;
        const Vec3 xr = centroid + (centroid - s[3].x);
        const double fr = eval(xr);
        if (fr < s[0].f) {
            const Vec3 xe = centroid + 2.0 * (centroid - s[3].x);
            const double fe = eval(xe);
            s[3] = fe < fr ? Node{xe, fe} : Node{xr, fr};
        } else if (fr < s[2].f) {
            s[3] = {xr, fr};
        } else {
            const Vec3 xc = centroid + 0.5 * (s[3].x - centroid);
            const double fc = eval(xc);
            if (fc < s[3].f) {
                s[3] = {xc, fc};
            } else {
                for (int i = 1; i < 4; ++i) {
                    s[static_cast<size_t>(i)].x =
                        s[0].x + 0.5 * (s[static_cast<size_t>(i)].x - s[0].x);
                    s[static_cast<size_t>(i)].f = eval(s[static_cast<size_t>(i)].x);
                }
            }
        }
    }
    std::sort(s.begin(), s.end(), by_f);
    return s[0].x;
}

// Central-difference Hessian of the potential from the analytic gradient.
void numeric_hessian(const TrapConfig& trap, const Vec3& x, double h, double H[3][3]) {
    Vec3 gp, gm;
    const Vec3 e[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    double raw[3][3];
    for (int i = 0; i < 3; ++i) {
        potential_gradient_at(trap, x + h * e[i], gp);
        potential_gradient_at(trap, x - h * e[i], gm);
        const Vec3 d = (gp - gm) / (2.0 * h);
        raw[i][0] = d.x;
        raw[i][1] = d.y;
        raw[i][2] = d.z;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) H[i][j] = 0.5 * (raw[i][j] + raw[j][i]);
}

// Jacobi eigenvalue iteration for a symmetric 3x3 matrix.
void jacobi_eigenvalues(double A[3][3], double evals[3], double evecs[3][3]) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) evecs[i][j] = (i == j) ? 1.0 : 0.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        int p = 0, q = 1;
        double off = std::abs(A[0][1]);
        if (std::abs(A[0][2]) > off) {
            off = std::abs(A[0][2]);
            p = 0;
            q = 2;
        }
        if (std::abs(A[1][2]) > off) {
            off = std::abs(A[1][2]);
            p = 1;
            q = 2;
        }
        const double scale = std::abs(A[0][0]) + std::abs(A[1][1]) + std::abs(A[2][2]);
        if (off <= 1e-15 * (scale + 1e-300)) break;
        const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cth = 1.0 / std::sqrt(t * t + 1.0);
        const double sth = t * cth;
        double Apq = A[p][q];
        const double App = A[p][p], Aqq = A[q][q];
        A[p][p] = App - t * Apq;
        A[q][q] = Aqq + t * Apq;
        A[p][q] = A[q][p] = 0.0;
        const int r = 3 - p - q;
        const double Arp = A[r][p], Arq = A[r][q];
        A[r][p] = A[p][r] = cth * Arp - sth * Arq;
        A[r][q] = A[q][r] = sth * Arp + cth * Arq;
        for (int i = 0; i < 3; ++i) {
            const double vip = evecs[i][p], viq = evecs[i][q];
            evecs[i][p] = cth * vip - sth * viq;
            evecs[i][q] = sth * vip + cth * viq;
        }
    }
    for (int i = 0; i < 3; ++i) evals[i] = A[i][i];
}

bool solve3(const double A[3][3], const double b[3], double x[3]) {
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = A[i][j];
        m[i][3] = b[i];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        if (std::abs(m[piv][col]) < 1e-300) return false;
        if (piv != col)
            for (int j = 0; j < 4; ++j) std::swap(m[piv][j], m[col][j]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int j = col; j < 4; ++j) m[r][j] -= f * m[col][j];
        }
    }
    for (int i = 0; i < 3; ++i) x[i] = m[i][3] / m[i][i];
    return true;
}

// Distance along a ray at which every beam has decayed: each beam needs the
// axial scan range resolved along its axis plus the transverse range along
// the perpendicular component. A ray down one beam's axis therefore extends
// that beam's full axial range even when it started as another beam's
// transverse channel.
double ray_extent(const TrapConfig& trap, const Vec3& dir, const CharacterizeOptions& opts) {
    double ext = 0.0;
    for (const auto& b : trap.beams) {
        if (b.power <= 0.0) continue;
        const double ax = std::abs(dir.dot(b.axis));
        const double tr = std::sqrt(std::max(0.0, 1.0 - ax * ax));
        const double zr = std::max(b.rayleigh_x(), b.rayleigh_y());
        const double w = std::max(b.waist_x, b.waist_y);
        ext = std::max(ext, opts.axial_scan_rayleigh * zr * ax +
                                opts.transverse_scan_waists * w * tr);
    }
    return ext;
}

// Highest potential along a ray from the minimum, geometric spacing so both
// waist-scale and Rayleigh-scale structure are resolved.
double ray_barrier(const TrapConfig& trap, const Vec3& from, const Vec3& dir,
                   double extent, int points) {
    const double s0 = std::max(extent * 1e-6, min_active_waist(trap) / 50.0);
    const double ratio = std::pow(extent / s0, 1.0 / (points - 1));
    double best = -std::numeric_limits<double>::infinity();
    double s = s0;
    for (int i = 0; i < points; ++i) {
        best = std::max(best, potential_at(trap, from + s * dir));
        s *= ratio;
    }
    return best;
}

}  // namespace

TrapCharacterization characterize(const TrapConfig& trap, const CharacterizeOptions& opts) {
    if (trap.beams.empty()) throw NoMinimumError("trap has no beams");
    double total_power = 0.0;
    for (const auto& b : trap.beams) {
        b.validate();
        total_power += b.power;
    }
    if (total_power <= 0.0) throw NoMinimumError("all beam powers are zero");

    const double wmin = min_active_waist(trap);

    // Seed from the deepest beam focus (plus the foci centroid, which is the
    // natural seed when crossed foci are slightly offset).
    Vec3 seed = trap.beams[0].focus;
    double seed_u = std::numeric_limits<double>::infinity();
    Vec3 centroid{0, 0, 0};
    int active = 0;
    for (const auto& b : trap.beams) {
        if (b.power <= 0.0) continue;
        centroid += b.focus;
        ++active;
        const double u = potential_at(trap, b.focus);
        if (u < seed_u) {
            seed_u = u;
            seed = b.focus;
        }
    }
    centroid *= 1.0 / active;
    if (potential_at(trap, centroid) < seed_u) seed = centroid;

    Vec3 x = nelder_mead(trap, seed, 0.5 * wmin);

    // Newton polish with analytic gradient and numeric Hessian.
    const double h = opts.hessian_step_frac * wmin;
    for (int it = 0; it < 30; ++it) {
        Vec3 g;
        potential_gradient_at(trap, x, g);
        double H[3][3];
        numeric_hessian(trap, x, h, H);
        const double rhs[3] = {-g.x, -g.y, -g.z};
        double dx[3];
        if (!solve3(H, rhs, dx)) break;
        Vec3 step{dx[0], dx[1], dx[2]};
        const double cap = 0.5 * wmin;
        if (step.norm() > cap) step = step * (cap / step.norm());
        x += step;
        if (step.norm() < 1e-9 * wmin) break;
    }

    // A runaway "minimum" (e.g. gravity exceeding the dipole force everywhere)
    // ends far from every focus.
    double nearest_focus = std::numeric_limits<double>::infinity();
    double max_ext = 0.0;
    for (const auto& b : trap.beams) {
        if (b.power <= 0.0) continue;
        nearest_focus = std::min(nearest_focus, (x - b.focus).norm());
        max_ext = std::max(max_ext, opts.axial_scan_rayleigh *
                                        std::max(b.rayleigh_x(), b.rayleigh_y()));
    }
    if (nearest_focus > max_ext) throw NoMinimumError("potential minimum diverged");

    const double umin = potential_at(trap, x);
    if (!(umin < 0.0)) throw NoMinimumError("no bound potential minimum");

    double H[3][3];
    numeric_hessian(trap, x, h, H);
    double evals[3], evecs[3][3];
    jacobi_eigenvalues(H, evals, evecs);
    for (double ev : evals)
        if (!(ev > 0.0))
            throw DegenerateHessianError("potential curvature is not positive definite");

    TrapCharacterization out;
    out.minimum_position = x;
    out.minimum_potential = umin;
    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int a, int b) { return evals[a] > evals[b]; });
    for (int i = 0; i < 3; ++i) {
        const int k = order[i];
        out.frequencies[i] = std::sqrt(evals[k] / trap.species.mass);
        out.principal_axes[i] = Vec3{evecs[0][k], evecs[1][k], evecs[2][k]}.normalized();
    }
    out.mean_frequency =
        std::cbrt(out.frequencies[0] * out.frequencies[1] * out.frequencies[2]);

    // Escape channels: both directions of every active beam's frame axes,
    // plus vertical if gravity is on. The barrier of a channel is the highest
    // potential along its ray; the trap depth is the lowest such barrier.
    std::vector<Vec3> dirs;
    for (const auto& b : trap.beams) {
        if (b.power <= 0.0) continue;
        const Vec3 ty = b.axis.cross(b.transverse_x);
        for (const Vec3& d : {b.axis, b.transverse_x, ty}) {
            dirs.push_back(d);
            dirs.push_back(-d);
        }
    }
    if (trap.gravity_enabled) {
        dirs.push_back({0, 0, 1});
        dirs.push_back({0, 0, -1});
    }

    double depth = std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) {
        const double extent = ray_extent(trap, d, opts);
        double barrier = ray_barrier(trap, x, d, extent, opts.scan_points);
        // A single-beam trap has an exact analytic escape energy: the
        // potential at infinite range. Multi-beam traps keep the finite axial
        // range as the wing-boundary convention.
        if (active == 1 && !(trap.gravity_enabled && std::abs(d.z) > 1e-12))
            barrier = std::max(barrier,
                               trap.gravity_enabled
                                   ? trap.species.mass * trap.gravity_acceleration * x.z
                                   : 0.0);
        depth = std::min(depth, barrier - umin);
    }
    if (!(depth > 0.0)) throw NoMinimumError("no barrier above the potential minimum");
    out.depth = depth;

    const auto& primary = trap.beams[0];
    out.single_beam_depth_U0 =
        primary.power > 0.0
            ? dipole_coefficient(trap.species, primary.wavelength) * primary.peak_intensity()
            : 0.0;
    out.beta = out.single_beam_depth_U0 > 0.0
                   ? depth / out.single_beam_depth_U0
                   : std::numeric_limits<double>::quiet_NaN();
    return out;
}

PreparedTrap::PreparedTrap(const TrapConfig& trap) {
    for (const auto& b : trap.beams) {
        if (b.power <= 0.0) continue;
        beams_.push_back(b);
        kappa_.push_back(dipole_coefficient(trap.species, b.wavelength));
    }
    gravity_ = trap.gravity_enabled;
    mg_ = trap.species.mass * trap.gravity_acceleration;
}

double PreparedTrap::potential(const Vec3& point) const {
    double u = 0.0;
    for (size_t i = 0; i < beams_.size(); ++i)
        u -= kappa_[i] * beam_intensity(beams_[i], point);
    if (gravity_) u += mg_ * point.z;
    return u;
}

}  // namespace odt
