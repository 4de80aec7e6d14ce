#pragma once

// Generated by tools/reference_values.py (30-digit arithmetic, independent of
// the library). Default channel: u = 140 cm/s, K = 0.242 cm^2/s, H = 180 cm.
// Power law: K = 0.242 (x/100)^0.5. Linear: K = 0.242 (1 + 0.01 x).
// breath_a, steady_* and freq_* are direct numeric integrals of the impulse
// response; c_mean_100 is the receiver integral at (100, 0, 180), r = 2 cm,
// T_s = 3 s.

namespace ref {
inline constexpr double eta_100 = 0.17285714285714286;
inline constexpr double eta_power_200 = 0.32594255437551334;
inline constexpr double eta_linear_300 = 1.2964285714285714;
inline constexpr double impulse_a = 0.015459182749043595;
inline constexpr double impulse_b = 0.0036536768759284429;
inline constexpr double breath_a = 0.0014570531860928348;
inline constexpr double steady_a = 0.0032883252704937053;
inline constexpr double steady_b = 1.2855140527599546e-5;
inline constexpr double q_1 = 0.15865525393145705;
inline constexpr double q_2p5 = 0.0062096653257761352;
inline constexpr double freq_100_re = -0.0020361828032875592;
inline constexpr double freq_100_im = -0.0022177728579407646;
inline constexpr double c_mean_100 = 0.077352957837184058;
}  // namespace ref
