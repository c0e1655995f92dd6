// Copyright 2026 The evortho Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

namespace evortho {

// WGS-84.
inline constexpr double kWgs84A = 6378137.0;
inline constexpr double kWgs84F = 1.0 / 298.257223563;
inline constexpr double kUtmScale = 0.9996;

struct UtmPoint {
  double easting = 0.0;
  double northing = 0.0;
  int zone = 0;
  bool north = true;
  double altitude = 0.0;
};

struct LatLon {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

// Standard zone for a position, including the Norway and Svalbard exceptions.
int utm_zone(double lat_deg, double lon_deg);

// Transverse Mercator via the Krueger series to sixth order in the third
// flattening. Passing zone > 0 forces projection into that zone, which lets a
// flight that crosses a zone boundary stay in one metric frame.
UtmPoint latlon_to_utm(double lat_deg, double lon_deg, double altitude = 0.0, int zone = 0);
LatLon utm_to_latlon(const UtmPoint& p);

}  // namespace evortho
