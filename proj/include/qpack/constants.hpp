#pragma once

// CODATA-2018 values. Every module takes its physical constants from here.
namespace qpack::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double c0 = 299792458.0;             // m/s, exact
inline constexpr double mu0 = 1.25663706212e-6;       // N/A^2
inline constexpr double eps0 = 8.8541878128e-12;      // F/m
inline constexpr double eta0 = 376.730313668;         // ohm
inline constexpr double k_boltzmann = 1.380649e-23;   // J/K, exact
inline constexpr double h_planck = 6.62607015e-34;    // J s, exact

}  // namespace qpack::constants
