#pragma once

namespace sta {

inline constexpr double hbar = 1.054571817e-34;                // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double mass_be9 = 9.0121831 * atomic_mass_unit;  // kg

}  // namespace sta
