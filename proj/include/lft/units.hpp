#pragma once

namespace lft::units {

inline constexpr double hartree_in_cm = 219474.6313632;
inline constexpr double field_au_in_v_per_cm = 5.14220675e9;
inline constexpr double bohr_per_mm = 1.8897261e7;
inline constexpr double speed_of_light = 137.035999;

inline constexpr double cm_to_hartree(double e_cm) { return e_cm / hartree_in_cm; }
inline constexpr double hartree_to_cm(double e_au) { return e_au * hartree_in_cm; }
inline constexpr double vcm_to_au(double f_vcm) { return f_vcm / field_au_in_v_per_cm; }
inline constexpr double au_to_vcm(double f_au) { return f_au * field_au_in_v_per_cm; }
inline constexpr double mm_to_au(double x_mm) { return x_mm * bohr_per_mm; }
inline constexpr double au_to_mm(double x_au) { return x_au / bohr_per_mm; }

}  // namespace lft::units
