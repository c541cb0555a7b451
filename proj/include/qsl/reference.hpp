#pragma once

#include <array>

namespace qsl::reference {

// Published values for the five-level example state and its degree-34 minorant.
inline constexpr double tau_c1 = 9.693;
inline constexpr double tau_c2 = 4.110;
inline constexpr double sqrt_f_c2 = 0.0682;

// permissible set at sqrt(F) = 0: [tau_c1, 10.138] u [10.248, inf)
inline constexpr double gap_lo = 10.138;
inline constexpr double gap_hi = 10.248;
// at sqrt(F) = sqrt(F_c2): {tau_c2} u [9.519, inf)
inline constexpr double tail_c2 = 9.519;

// coefficients of x^0, x^2, ..., x^34, five significant figures
inline constexpr std::array<double, 18> pe_even_coefficients = {
    1.0000e0,    -5.0000e-1,  4.1667e-2,  -1.3889e-3,  2.4802e-5,  -2.7557e-7,  2.0876e-9,
    -1.1469e-11, 4.7766e-14, -1.5585e-16, 4.0798e-19, -8.6954e-22, 1.5125e-24,
    -2.1160e-27, 2.2929e-30, -1.7955e-33, 8.9531e-37, -2.1140e-40};

} // namespace qsl::reference
