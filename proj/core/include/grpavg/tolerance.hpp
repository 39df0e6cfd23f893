#pragma once

namespace grpavg::tol {

// Absolute tolerances shared by every module.
inline constexpr double distribution_sum = 1e-12;
inline constexpr double stochastic = 1e-10;
inline constexpr double derived = 1e-8;
inline constexpr double exact = 1e-12;
inline constexpr double entry_upper = 1e-12;
inline constexpr double clip = 1e-14;
inline constexpr double cluster = 1e-9;

} // namespace grpavg::tol
