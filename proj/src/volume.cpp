#include "odt/volume.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "odt/constants.hpp"
#include "odt/csvio.hpp"
#include "odt/errors.hpp"
#include "odt/rng.hpp"

namespace odt {

namespace c = constants;

double SamplingCylinder::volume() const {
    return c::pi * semi_x * semi_y * 2.0 * half_length;
}

bool SamplingCylinder::contains(const Vec3& p) const {
    const Vec3 d = p - center;
    const double z = d.dot(axis);
    if (std::abs(z) > half_length) return false;
    const double x = d.dot(tx) / semi_x;
    const double y = d.dot(ty) / semi_y;
    return x * x + y * y <= 1.0;
}

double ImportanceGaussian::density(const Vec3& p) const {
    const Vec3 d = p - mean;
    double expo = 0.0;
    double norm = 1.0;
    for (int i = 0; i < 3; ++i) {
        const double q = d.dot(axes[i]) / sigma[i];
        expo += q * q;
        norm *= sigma[i] * std::sqrt(2.0 * c::pi);
    }
    return std::exp(-0.5 * expo) / norm;
}

double SamplingRegion::density(const Vec3& p) const {
    int hits = 0;
    for (const auto& cyl : cylinders)
        if (cyl.contains(p)) ++hits;
    const double uniform_part = hits / total_cylinder_volume;
    if (!gauss.enabled) return uniform_part;
    return 0.5 * uniform_part + 0.5 * gauss.density(p);
}

namespace {

// Half-length of the region where a beam's peak (on-axis) normalized
// intensity f(z) = 1/sqrt((1+z^2/zrx^2)(1+z^2/zry^2)) still exceeds level.
double axial_reach(const GaussianBeam& b, double level) {
    const double zrx2 = b.rayleigh_x() * b.rayleigh_x();
    const double zry2 = b.rayleigh_y() * b.rayleigh_y();
    const double A = 1.0 / (zrx2 * zry2);
    const double B = 1.0 / zrx2 + 1.0 / zry2;
    const double C = 1.0 - 1.0 / (level * level);
    const double z2 = (-B + std::sqrt(B * B - 4.0 * A * C)) / (2.0 * A);
    return std::sqrt(std::max(z2, 0.0));
}

SamplingCylinder beam_cylinder(const GaussianBeam& b, double level) {
    SamplingCylinder cyl;
    cyl.center = b.focus;
    cyl.axis = b.axis;
    cyl.tx = b.transverse_x;
    cyl.ty = b.axis.cross(b.transverse_x);
    cyl.half_length = axial_reach(b, level);
    // Transverse extent of {f > level} at axial position z is an ellipse with
    // semi-axes w_k(z) sqrt(ln(f_peak/level)/2); take the max over z.
    const double zrx2 = b.rayleigh_x() * b.rayleigh_x();
    const double zry2 = b.rayleigh_y() * b.rayleigh_y();
    double sx = 0.0, sy = 0.0;
    const int steps = 1024;
    for (int i = 0; i <= steps; ++i) {
        const double z = cyl.half_length * i / steps;
        const double gx = 1.0 + z * z / zrx2;
        const double gy = 1.0 + z * z / zry2;
        const double fpeak = 1.0 / std::sqrt(gx * gy);
        if (fpeak <= level) break;
        const double lg = std::log(fpeak / level) / 2.0;
        sx = std::max(sx, b.waist_x * std::sqrt(gx * lg));
        sy = std::max(sy, b.waist_y * std::sqrt(gy * lg));
    }
    // Margin against the discrete z scan missing the true transverse maximum.
    cyl.semi_x = sx * 1.1;
    cyl.semi_y = sy * 1.1;
    return cyl;
}

}  // namespace

SamplingRegion make_sampling_region(const TrapConfig& trap,
                                    const TrapCharacterization& chr, double beta) {
    if (trap.gravity_enabled)
        throw std::invalid_argument(
            "volume sampling requires a potential bounded by the beams alone (gravity off)");
    const double u0p = chr.single_beam_depth_U0;
    if (!(u0p > 0.0)) throw std::invalid_argument("primary beam has zero depth");
    const double u_sup = -chr.minimum_potential / u0p;
    if (beta >= u_sup - 0.03)
        throw BetaTooLargeError("beta " + format_double(beta) +
                                " at or above the divergence cap " +
                                format_double(u_sup - 0.03));
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");

    int active = 0;
    for (const auto& b : trap.beams)
        if (b.power > 0.0) ++active;

    // u(r) < beta means sum_j U0_j f_j(r) > -U_min - beta U0p =: D, so some
    // beam must satisfy f_j > D/(n U0_j). Each such level set sits inside a
    // finite cylinder; their union therefore bounds the whole region.
    const double D = -chr.minimum_potential - beta * u0p;
    SamplingRegion region;
    for (const auto& b : trap.beams) {
        if (b.power <= 0.0) continue;
        const double u0j = dipole_coefficient(trap.species, b.wavelength) * b.peak_intensity();
        const double level = D / (active * u0j);
        if (level >= 1.0) continue;  // this beam alone can never reach the threshold
        region.cylinders.push_back(beam_cylinder(b, level));
    }
    if (region.cylinders.empty())
        throw std::invalid_argument("no sampling cylinders (all beams below threshold)");
    for (const auto& cyl : region.cylinders) region.total_cylinder_volume += cyl.volume();

    region.gauss.enabled = true;
    region.gauss.mean = chr.minimum_position;
    for (int i = 0; i < 3; ++i) {
        region.gauss.axes[i] = chr.principal_axes[i];
        // Harmonic radius at depth beta*U0p along this axis, shrunk to keep
        // most of the Gaussian mass inside the strongly-populated core.
        region.gauss.sigma[i] =
            0.45 * std::sqrt(beta) *
            std::sqrt(2.0 * u0p / (trap.species.mass * chr.frequencies[i] * chr.frequencies[i]));
    }
    return region;
}

namespace {
constexpr std::uint64_t kShardSize = 65536;
}

Vec3 draw_region_sample(const SamplingRegion& region, Xoshiro256& rng) {
    // Fixed draw count per sample (1 branch + 4 coordinates) keeps the stream
    // layout independent of the path taken.
    const double branch = rng.uniform();
    if (region.gauss.enabled && branch < 0.5) {
        double n3[3];
        rng.normal3(n3);
        Vec3 p = region.gauss.mean;
        for (int k = 0; k < 3; ++k)
            p += (n3[k] * region.gauss.sigma[k]) * region.gauss.axes[k];
        return p;
    }
    const double pick = rng.uniform() * region.total_cylinder_volume;
    const double uz = rng.uniform();
    const double uv = rng.uniform();
    const double ut = rng.uniform();
    double acc = 0.0;
    const SamplingCylinder* chosen = &region.cylinders.back();
    for (const auto& cyl : region.cylinders) {
        acc += cyl.volume();
        if (pick <= acc) {
            chosen = &cyl;
            break;
        }
    }
    const double z = (2.0 * uz - 1.0) * chosen->half_length;
    const double r = std::sqrt(uv);
    const double phi = 2.0 * c::pi * ut;
    return chosen->center + z * chosen->axis +
           (r * std::cos(phi) * chosen->semi_x) * chosen->tx +
           (r * std::sin(phi) * chosen->semi_y) * chosen->ty;
}

VolumeTable sample_volume_table(const std::function<double(const Vec3&)>& u_of_r,
                                const SamplingRegion& region, double beta,
                                std::uint64_t n_samples, std::uint64_t seed,
                                const VolumeOptions& opts) {
    if (opts.bins < 2) throw std::invalid_argument("need at least 2 bins");
    if (n_samples < 2) throw std::invalid_argument("need at least 2 samples");
    const int bins = opts.bins;
    const double du = beta / bins;
    const std::uint64_t n_shards = (n_samples + kShardSize - 1) / kShardSize;

    // Per-shard accumulators, reduced in shard order afterwards: the result is
    // a fixed sum of fixed per-shard sums, independent of thread scheduling.
    std::vector<std::vector<double>> shard_w(n_shards), shard_w2(n_shards);
    std::atomic<std::uint64_t> next_shard{0};

    auto worker = [&]() {
        for (;;) {
            const std::uint64_t s = next_shard.fetch_add(1);
            if (s >= n_shards) return;
            Xoshiro256 rng(seed, s);
            std::vector<double> sumw(static_cast<size_t>(bins), 0.0);
            std::vector<double> sumw2(static_cast<size_t>(bins), 0.0);
            const std::uint64_t count =
                std::min<std::uint64_t>(kShardSize, n_samples - s * kShardSize);
            for (std::uint64_t i = 0; i < count; ++i) {
                const Vec3 p = draw_region_sample(region, rng);
                const double uval = u_of_r(p);
                if (uval < beta) {
                    const int bin =
                        uval <= 0.0 ? 0 : std::min(static_cast<int>(uval / du), bins - 1);
                    const double w = 1.0 / region.density(p);
                    sumw[static_cast<size_t>(bin)] += w;
                    sumw2[static_cast<size_t>(bin)] += w * w;
                }
            }
            shard_w[s] = std::move(sumw);
            shard_w2[s] = std::move(sumw2);
        }
    };

    unsigned n_threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                          : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_shards));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<double> s1(static_cast<size_t>(bins), 0.0), s2(static_cast<size_t>(bins), 0.0);
    for (std::uint64_t s = 0; s < n_shards; ++s)
        for (int b = 0; b < bins; ++b) {
            s1[static_cast<size_t>(b)] += shard_w[s][static_cast<size_t>(b)];
            s2[static_cast<size_t>(b)] += shard_w2[s][static_cast<size_t>(b)];
        }

    VolumeTable table;
    table.beta = beta;
    table.samples = n_samples;
    table.seed = seed;
    table.u.resize(static_cast<size_t>(bins));
    table.v.resize(static_cast<size_t>(bins));
    table.dv_du.resize(static_cast<size_t>(bins));
    table.v_stderr.resize(static_cast<size_t>(bins));
    table.bin_stderr.resize(static_cast<size_t>(bins));
    const double n = static_cast<double>(n_samples);
    double cum = 0.0, cum_var = 0.0;
    for (int b = 0; b < bins; ++b) {
        const size_t i = static_cast<size_t>(b);
        const double vol = s1[i] / n;
        const double var = std::max(0.0, (s2[i] - s1[i] * s1[i] / n) / (n * (n - 1.0)));
        cum += vol;
        cum_var += var;
        table.u[i] = (b + 1) * du;
        table.v[i] = cum;
        table.dv_du[i] = vol / du;
        table.bin_stderr[i] = std::sqrt(var);
        table.v_stderr[i] = std::sqrt(cum_var);
    }

    if (opts.max_rel_stderr > 0.0) {
        for (int b = 0; b < bins; ++b) {
            const size_t i = static_cast<size_t>(b);
            const double umid = (b + 0.5) * du;
            if (umid < 0.1 * beta) continue;
            if (!(table.v[i] > 0.0) ||
                table.v_stderr[i] > opts.max_rel_stderr * table.v[i])
                throw ToleranceNotMetError("volume stderr above " +
                                           format_double(opts.max_rel_stderr) +
                                           " of V at u=" + format_double(table.u[i]));
        }
    }
    return table;
}

VolumeTable volume_table(const TrapConfig& trap, double beta, std::uint64_t n_samples,
                         std::uint64_t seed, const VolumeOptions& opts) {
    const TrapCharacterization chr = characterize(trap);
    const SamplingRegion region = make_sampling_region(trap, chr, beta);
    const PreparedTrap fast(trap);
    const double umin = chr.minimum_potential;
    const double u0p = chr.single_beam_depth_U0;
    auto u_of_r = [&fast, umin, u0p](const Vec3& p) {
        return (fast.potential(p) - umin) / u0p;
    };
    return sample_volume_table(u_of_r, region, beta, n_samples, seed, opts);
}

std::string volume_table_to_csv(const VolumeTable& table) {
    std::string out = "u,V_m3,dV_du_m3,stderr_m3\n";
    for (size_t i = 0; i < table.u.size(); ++i) {
        out += format_double(table.u[i]);
        out += ',';
        out += format_double(table.v[i]);
        out += ',';
        out += format_double(table.dv_du[i]);
        out += ',';
        out += format_double(table.v_stderr[i]);
        out += '\n';
    }
    return out;
}

VolumeTable volume_table_from_csv(const std::string& csv_text) {
    const auto rows = parse_csv(csv_text);
    if (rows.empty() || rows[0] != std::vector<std::string>{"u", "V_m3", "dV_du_m3", "stderr_m3"})
        throw std::invalid_argument("not a volume table CSV");
    VolumeTable table;
    for (size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 4) throw std::invalid_argument("bad volume table row");
        table.u.push_back(parse_double(rows[r][0]));
        table.v.push_back(parse_double(rows[r][1]));
        table.dv_du.push_back(parse_double(rows[r][2]));
        table.v_stderr.push_back(parse_double(rows[r][3]));
    }
    if (table.u.empty()) throw std::invalid_argument("empty volume table");
    table.beta = table.u.back();
    table.bin_stderr.resize(table.u.size());
    for (size_t i = 0; i < table.u.size(); ++i) {
        const double prev = i == 0 ? 0.0 : table.v_stderr[i - 1];
        table.bin_stderr[i] =
            std::sqrt(std::max(0.0, table.v_stderr[i] * table.v_stderr[i] - prev * prev));
    }
    return table;
}

}  // namespace odt
