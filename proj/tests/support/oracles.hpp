#pragma once

// Frozen from tests/support/oracles.py (mpmath at 30 digits, scipy for the
// constrained fixed points).
namespace oracle {

inline constexpr double phi_m2 = 0.0227501319481792072;
inline constexpr double gauss_2_3_q975 = 7.8798919536201627066;
inline constexpr double beta_2_5_cdf_03 = 0.579825;
inline constexpr double beta_15_45_sf_04 = 0.18460731840898851855;
inline constexpr double beta_35_25_q03 = 0.48184919193128700017;
inline constexpr double g_1a_theta0 = 0.83653789842741717943;

inline constexpr double fig2_un_a = 0.78425446115791259918;
inline constexpr double fig2_un_b = 0.25547954382522572839;
// scipy optimizer limits these to about 1e-9
inline constexpr double fig2_dp_a = 0.680206056245325;
inline constexpr double fig2_dp_b = 0.409850641388203;
inline constexpr double fig2_eqopt_a = 0.7266305905484864;
inline constexpr double fig2_eqopt_b = 0.3413559391011166;
inline constexpr double fixed_point_tol = 1e-7;

inline constexpr double gen_profile_x0 = 0.20614530208596473149;
// fig2 under DP at (0.35, 0.5), golden section over the shared mass at 30 digits
inline constexpr double fig2_dp_mass_035 = 0.41142210790882201;
inline constexpr double fig2_dp_theta_a_035 = -0.28327995251853991;
inline constexpr double fig2_dp_theta_b_035 = 1.8308779735340916;

}  // namespace oracle
