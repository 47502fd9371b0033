#include "odt/thermo.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "odt/constants.hpp"
#include "odt/csvio.hpp"
#include "odt/errors.hpp"
#include "odt/rng.hpp"

namespace odt {

namespace c = constants;

TruncatedThermalState make_state(const TrapConfig& trap, double atom_number,
                                 double temperature) {
    return make_state(trap, characterize(trap), atom_number, temperature);
}

TruncatedThermalState make_state(const TrapConfig& trap, const TrapCharacterization& chr,
                                 double atom_number, double temperature) {
    if (!(atom_number >= 0.0)) throw std::invalid_argument("atom number must be >= 0");
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
    TruncatedThermalState st;
    st.trap = trap;
    st.chr = chr;
    st.atom_number = atom_number;
    st.temperature = temperature;
    st.eta = chr.single_beam_depth_U0 / (c::boltzmann * temperature);
    st.beta = chr.beta;
    return st;
}

PopulationReport exact_populations(TruncatedThermalState& state, const VolumeTable& table,
                                   double max_rel_err) {
    const int bins = table.bins();
    if (bins < 2) throw std::invalid_argument("volume table too small");
    const double du = table.du();
    const double eta = state.eta;
    const double beta = table.beta;
    auto integrand = [eta, beta](double u) {
        return std::exp(-eta * u) * incomplete_gamma_P32(eta * (beta - u));
    };

    double C = 0.0, W = 0.0, varC = 0.0, varW = 0.0;
    for (int b = 0; b < bins; ++b) {
        const size_t i = static_cast<size_t>(b);
        const double left = b * du;
        const double right = table.u[i];
        const double vol = table.dv_du[i] * du;
        const double sv = table.bin_stderr[i];
        if (right <= 1.0) {
            const double g = integrand(0.5 * (left + right));
            C += vol * g;
            varC += sv * g * sv * g;
        } else if (left >= 1.0) {
            const double g = integrand(0.5 * (left + right));
            W += vol * g;
            varW += sv * g * sv * g;
        } else {
            // The bin straddling u=1 is split in proportion to its sub-widths
            // so that center + wing reproduces the full integral exactly.
            const double fc = (1.0 - left) / du;
            const double gc = integrand(0.5 * (left + 1.0));
            const double gw = integrand(0.5 * (1.0 + right));
            C += vol * fc * gc;
            W += vol * (1.0 - fc) * gw;
            varC += sv * fc * gc * sv * fc * gc;
            varW += sv * (1.0 - fc) * gw * sv * (1.0 - fc) * gw;
        }
    }

    const double F = C + W;
    if (!(F > 0.0)) throw ToleranceNotMetError("normalization integral vanished");
    const double varF = varC + varW;
    const double relF = std::sqrt(varF) / F;
    if (max_rel_err > 0.0 && relF > max_rel_err)
        throw ToleranceNotMetError("normalization integral relative error " +
                                   format_double(relF) + " exceeds " +
                                   format_double(max_rel_err));

    const double N = state.atom_number;
    PopulationReport rep;
    rep.method = PopulationMethod::exact;
    rep.n0 = N / F;
    rep.n0_err = N * std::sqrt(varF) / (F * F);
    rep.center_number = rep.n0 * C;
    rep.wing_number = rep.n0 * W;
    rep.wing_fraction = W / F;
    rep.wing_fraction_err =
        std::sqrt(C * C * varW + W * W * varC) / (F * F);
    rep.center_err = rep.n0 * std::sqrt(varC);
    rep.wing_err = rep.n0 * std::sqrt(varW);
    rep.psd = psd(rep.n0, state.temperature, state.trap.species);
    state.n0 = rep.n0;
    return rep;
}

PopulationReport spatial_populations(const TruncatedThermalState& state,
                                     std::uint64_t n_samples, std::uint64_t seed,
                                     int threads, double max_rel_err) {
    const SamplingRegion region = make_sampling_region(state.trap, state.chr, state.beta);
    const PreparedTrap fast(state.trap);
    const double umin = state.chr.minimum_potential;
    const double u0p = state.chr.single_beam_depth_U0;
    const double eta = state.eta;
    const double beta = state.beta;

    constexpr std::uint64_t kShard = 65536;
    const std::uint64_t n_shards = (n_samples + kShard - 1) / kShard;
    struct Acc {
        double c = 0.0, c2 = 0.0, w = 0.0, w2 = 0.0;
    };
    std::vector<Acc> shards(n_shards);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::uint64_t s = next.fetch_add(1);
            if (s >= n_shards) return;
            Xoshiro256 rng(seed, s);
            Acc acc;
            const std::uint64_t count = std::min<std::uint64_t>(kShard, n_samples - s * kShard);
            for (std::uint64_t i = 0; i < count; ++i) {
                const Vec3 p = draw_region_sample(region, rng);
                const double u = (fast.potential(p) - umin) / u0p;
                if (u >= beta) continue;
                const double g = std::exp(-eta * std::max(u, 0.0)) *
                                 incomplete_gamma_P32(eta * (beta - std::max(u, 0.0)));
                const double wgt = g / region.density(p);
                if (u < 1.0) {
                    acc.c += wgt;
                    acc.c2 += wgt * wgt;
                } else {
                    acc.w += wgt;
                    acc.w2 += wgt * wgt;
                }
            }
            shards[s] = acc;
        }
    };

    unsigned n_threads =
        threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_shards));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    double sc = 0.0, sc2 = 0.0, sw = 0.0, sw2 = 0.0;
    for (const auto& a : shards) {
        sc += a.c;
        sc2 += a.c2;
        sw += a.w;
        sw2 += a.w2;
    }
    const double n = static_cast<double>(n_samples);
    const double C = sc / n;
    const double W = sw / n;
    const double varC = std::max(0.0, (sc2 - sc * sc / n) / (n * (n - 1.0)));
    const double varW = std::max(0.0, (sw2 - sw * sw / n) / (n * (n - 1.0)));
    const double F = C + W;
    if (!(F > 0.0)) throw ToleranceNotMetError("spatial normalization integral vanished");
    const double relF = std::sqrt(varC + varW) / F;
    if (max_rel_err > 0.0 && relF > max_rel_err)
        throw ToleranceNotMetError("spatial integral relative error " + format_double(relF) +
                                   " exceeds " + format_double(max_rel_err));

    const double N = state.atom_number;
    PopulationReport rep;
    rep.method = PopulationMethod::exact;
    rep.n0 = N / F;
    rep.n0_err = N * std::sqrt(varC + varW) / (F * F);
    rep.center_number = rep.n0 * C;
    rep.wing_number = rep.n0 * W;
    rep.wing_fraction = W / F;
    rep.wing_fraction_err = std::sqrt(C * C * varW + W * W * varC) / (F * F);
    rep.center_err = rep.n0 * std::sqrt(varC);
    rep.wing_err = rep.n0 * std::sqrt(varW);
    rep.psd = psd(rep.n0, state.temperature, state.trap.species);
    return rep;
}

PopulationReport analytic_populations(double atom_number, double eta, double waist,
                                      double wavelength, const AtomSpecies* species,
                                      double temperature) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    const double X = (4.0 * c::pi * waist / wavelength) * std::exp(-eta);
    PopulationReport rep;
    rep.method = PopulationMethod::analytic;
    rep.wing_fraction = X / (1.0 + X);
    rep.center_number = atom_number / (1.0 + X);
    rep.wing_number = atom_number * rep.wing_fraction;
    rep.n0 = (4.0 * atom_number / (waist * waist * waist)) *
             std::pow(eta / c::pi, 1.5) / (1.0 + X);
    if (species != nullptr && temperature > 0.0)
        rep.psd = psd(rep.n0, temperature, *species);
    return rep;
}

double density_at(const TruncatedThermalState& state, const Vec3& r) {
    if (!(state.n0 > 0.0))
        throw std::logic_error("state not normalized (run exact_populations first)");
    const double u =
        (potential_at(state.trap, r) - state.chr.minimum_potential) /
        state.chr.single_beam_depth_U0;
    if (u >= state.beta) return 0.0;
    const double uc = std::max(u, 0.0);
    return state.n0 * std::exp(-state.eta * uc) *
           incomplete_gamma_P32(state.eta * (state.beta - uc));
}

double wing_fraction_half_point(double waist, double wavelength) {
    return std::log(4.0 * c::pi * waist / wavelength);
}

double psd(double n0, double temperature, const AtomSpecies& species) {
    const double lambda_db =
        c::planck / std::sqrt(2.0 * c::pi * species.mass * c::boltzmann * temperature);
    return n0 * lambda_db * lambda_db * lambda_db;
}

double collision_rate(double n0, double temperature, const AtomSpecies& species) {
    const double sigma = 8.0 * c::pi * species.scattering_length * species.scattering_length;
    const double vbar =
        std::sqrt(8.0 * c::boltzmann * temperature / (c::pi * species.mass));
    return n0 * sigma * vbar;
}

double thermalization_time(double omega_axial) { return 2.0 * c::pi / omega_axial; }

double wing_collision_ratio(double n0, double temperature, const AtomSpecies& species,
                            double eta, double omega_axial) {
    return collision_rate(n0 * std::exp(-eta), temperature, species) / omega_axial;
}

}  // namespace odt
