#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "odt/trap.hpp"
#include "odt/vec3.hpp"

namespace odt {

// Tabulated equipotential volume V(u) on a uniform u-grid, u = (U - U_min)/U0
// with U0 the primary-beam depth. u[i] is the right edge of bin i; dv_du[i]
// the bin-average density of volume; v[i] the cumulative volume through bin i.
struct VolumeTable {
    double beta = 0.0;
    std::vector<double> u;
    std::vector<double> v;           // m^3, cumulative
    std::vector<double> dv_du;       // m^3 per unit u
    std::vector<double> v_stderr;    // m^3, stderr of cumulative v
    std::vector<double> bin_stderr;  // m^3, stderr of each bin's volume
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;

    int bins() const { return static_cast<int>(u.size()); }
    double du() const { return beta / bins(); }
};

struct VolumeOptions {
    int bins = 400;
    int threads = 0;  // 0 = hardware concurrency; result independent of value
    // Required relative stderr of cumulative V on interior bins (u >= 0.1 beta);
    // <= 0 disables the check.
    double max_rel_stderr = 0.05;
};

// An elliptic cylinder bounding one beam's share of the sub-beta region.
struct SamplingCylinder {
    Vec3 center;
    Vec3 axis;  // unit
    Vec3 tx;    // unit, first transverse axis
    Vec3 ty;    // unit, = axis x tx
    double half_length = 0.0;
    double semi_x = 0.0;
    double semi_y = 0.0;

    double volume() const;
    bool contains(const Vec3& p) const;
};

// Gaussian importance component centred on the trap minimum, aligned with the
// curvature axes; concentrates samples where dV/du statistics are hardest
// (the low-u core, which a uniform draw over the cylinders barely hits).
struct ImportanceGaussian {
    bool enabled = false;
    Vec3 mean;
    Vec3 axes[3];      // unit eigenvectors
    double sigma[3] = {0.0, 0.0, 0.0};

    double density(const Vec3& p) const;  // m^-3
};

// Mixture proposal: 0.5 uniform-over-cylinder-union + 0.5 Gaussian core.
struct SamplingRegion {
    std::vector<SamplingCylinder> cylinders;
    ImportanceGaussian gauss;
    double total_cylinder_volume = 0.0;

    double density(const Vec3& p) const;  // mixture q(p), m^-3
};

// Builds the bounding region for {u < beta}. Coverage is exact: u(r) < beta
// forces at least one beam's normalized intensity above its cylinder level
// (pigeonhole over the beam sum), and each cylinder contains its level set.
// Throws BetaTooLargeError when beta is within 0.03 of the supremum of u
// (region volume diverges there).
SamplingRegion make_sampling_region(const TrapConfig& trap,
                                    const TrapCharacterization& chr, double beta);

class Xoshiro256;

// One mixture draw. Consumes exactly five uniform variates regardless of the
// branch taken, so shard streams stay aligned and reproducible.
Vec3 draw_region_sample(const SamplingRegion& region, Xoshiro256& rng);

// Histogram Monte Carlo of the volume density against an arbitrary level
// function u(r). Deterministic for fixed (samples, seed): work is split into
// fixed-size shards with per-shard counter-seeded generators and reduced in
// shard order, so the result is bit-identical for any thread count.
VolumeTable sample_volume_table(const std::function<double(const Vec3&)>& u_of_r,
                                const SamplingRegion& region, double beta,
                                std::uint64_t n_samples, std::uint64_t seed,
                                const VolumeOptions& opts = {});

// The full pipeline for a beam trap: characterize, build the bounding region,
// sample u = (U - U_min)/U0.
VolumeTable volume_table(const TrapConfig& trap, double beta, std::uint64_t n_samples,
                         std::uint64_t seed, const VolumeOptions& opts = {});

// CSV snapshot (columns: u, V, dV_du, stderr) and its inverse. Import
// reconstructs per-bin stderr from the cumulative column.
std::string volume_table_to_csv(const VolumeTable& table);
VolumeTable volume_table_from_csv(const std::string& csv_text);

}  // namespace odt
