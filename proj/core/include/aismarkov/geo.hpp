#pragma once

namespace aismarkov {

/// WGS-84 degrees.
struct LatLon {
    double lat = 0.0;
    double lon = 0.0;

    friend bool operator==(const LatLon&, const LatLon&) = default;
};

inline constexpr double earth_radius_m = 6371008.8;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double deg_to_rad = pi / 180.0;

} // namespace aismarkov
