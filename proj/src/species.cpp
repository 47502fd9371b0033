#include "odt/species.hpp"

#include "odt/constants.hpp"

namespace odt {

AtomSpecies rubidium87() {
    AtomSpecies s;
    s.name = "Rb87";
    s.mass = 86.909180 * constants::atomic_mass_unit;
    s.d1_wavelength = 794.978851e-9;
    s.d1_linewidth = 2.0 * constants::pi * 5.7500e6;
    s.d2_wavelength = 780.241209e-9;
    s.d2_linewidth = 2.0 * constants::pi * 6.0666e6;
    s.scattering_length = 5.3e-9;
    s.three_body_K3 = 4.3e-29;  // cm^6/s
    return s;
}

}  // namespace odt
