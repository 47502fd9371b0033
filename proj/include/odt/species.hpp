#pragma once

#include <string>

namespace odt {

// Atomic data needed for dipole-trap and evaporation modelling. The two
// strongest lines dominate the far-off-resonance polarizability of an alkali;
// the ground-state scattering length and three-body constant set the
// collision kinetics.
struct AtomSpecies {
    std::string name;
    double mass = 0.0;                  // kg
    double d1_wavelength = 0.0;         // m   (lower-frequency line)
    double d1_linewidth = 0.0;          // rad/s (natural linewidth Gamma)
    double d2_wavelength = 0.0;         // m
    double d2_linewidth = 0.0;          // rad/s
    double scattering_length = 0.0;     // m   (s-wave, spin-polarized ground state)
    double three_body_K3 = 0.0;         // cm^6/s (event rate constant)
};

// 87Rb ground-state parameters (Steck compilation; K3 from three-body loss
// measurements in the F=1 manifold).
AtomSpecies rubidium87();

}  // namespace odt
