#pragma once

#include <cstdint>
#include <string>

namespace specshadow {

/// Numerical tolerances and run parameters shared across the library.
///
/// Every tolerance is configurable but defaults to the values the test
/// suites are pinned to; validate() rejects non-positive tolerances and
/// degenerate grid resolutions.
struct Config {
    double eps_eq = 1e-9;        ///< equality tolerance for levels and eigenvalues
    double eps_root = 1e-10;     ///< residual tolerance for wall-point witnesses
    double eps_flag = 1e-8;      ///< principal-angle tolerance for flag equality
    double eps_rel = 1e-9;       ///< tolerance for the surface group relation
    double window_anchor = 0.0;  ///< level representatives are chosen in (anchor-1, anchor]
    int grid_resolution = 48;    ///< cells across a region for scans and covers
    std::uint64_t seed = 12345;  ///< seed for the randomized check suites

    /// Throws ConfigError if a tolerance is not positive or the grid is degenerate.
    void validate() const;
};

/// Loads a Config from a JSON object file; missing keys keep their defaults.
Config config_from_json_file(const std::string& path);
Config config_from_json_text(const std::string& text);

}  // namespace specshadow
