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


#include "evortho/utm.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "evortho/error.hpp"
#include "evortho/text.hpp"

namespace evortho {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Series {
  double e;   // first eccentricity
  double rect;  // rectifying radius A
  std::array<double, 6> alpha;
  std::array<double, 6> beta;
};

const Series& series() {
  static const Series s = [] {
    Series r;
    const double f = kWgs84F;
    const double n = f / (2.0 - f);
    const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
    r.e = std::sqrt(f * (2.0 - f));
    r.rect = kWgs84A / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
    r.alpha = {
        n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 + 7891 * n6 / 37800,
        13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 - 1983433 * n6 / 1935360,
        61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 + 167603 * n6 / 181440,
        49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
        34729 * n5 / 80640 - 3418889 * n6 / 1995840,
        212378941 * n6 / 319334400,
    };
    r.beta = {
        n / 2 - 2 * n2 / 3 + 37 * n3 / 96 - n4 / 360 - 81 * n5 / 512 + 96199 * n6 / 604800,
        n2 / 48 + n3 / 15 - 437 * n4 / 1440 + 46 * n5 / 105 - 1118711 * n6 / 3870720,
        17 * n3 / 480 - 37 * n4 / 840 - 209 * n5 / 4480 + 5569 * n6 / 90720,
        4397 * n4 / 161280 - 11 * n5 / 504 - 830251 * n6 / 7257600,
        4583 * n5 / 161280 - 108847 * n6 / 3991680,
        20648693 * n6 / 638668800,
    };
    return r;
  }();
  return s;
}

// Conformal latitude tangent from geodetic latitude tangent.
double conformal_tan(double tau, double e) {
  const double sigma = std::sinh(e * std::atanh(e * tau / std::hypot(1.0, tau)));
  return tau * std::hypot(1.0, sigma) - sigma * std::hypot(1.0, tau);
}

double central_meridian(int zone) { return -183.0 + 6.0 * zone; }

}  // namespace

int utm_zone(double lat, double lon) {
  if (!(std::abs(lat) <= 84.0)) {
    throw Error("latitude " + text::format_double(lat) + " outside the UTM domain");
  }
  if (!(std::abs(lon) <= 180.0)) throw Error("longitude " + text::format_double(lon) + " out of range");
  int zone = static_cast<int>(std::floor((lon + 180.0) / 6.0)) + 1;
  if (zone > 60) zone = 60;
  if (lat >= 56.0 && lat < 64.0 && lon >= 3.0 && lon < 12.0) zone = 32;
  if (lat >= 72.0) {
    if (lon >= 0.0 && lon < 9.0) zone = 31;
    else if (lon >= 9.0 && lon < 21.0) zone = 33;
    else if (lon >= 21.0 && lon < 33.0) zone = 35;
    else if (lon >= 33.0 && lon < 42.0) zone = 37;
  }
  return zone;
}

UtmPoint latlon_to_utm(double lat, double lon, double altitude, int zone) {
  const int auto_zone = utm_zone(lat, lon);
  if (zone == 0) zone = auto_zone;
  if (zone < 1 || zone > 60) throw Error("invalid UTM zone " + std::to_string(zone));
  const auto& s = series();

  double dlon = lon - central_meridian(zone);
  dlon = std::remainder(dlon, 360.0);
  const double lam = dlon * kDeg;
  const double phi = lat * kDeg;

  const double tau = std::tan(phi);
  const double taup = conformal_tan(tau, s.e);
  const double xip = std::atan2(taup, std::cos(lam));
  const double etap = std::asinh(std::sin(lam) / std::hypot(taup, std::cos(lam)));

  double xi = xip;
  double eta = etap;
  for (int j = 1; j <= 6; ++j) {
    const double a = s.alpha[j - 1];
    xi += a * std::sin(2 * j * xip) * std::cosh(2 * j * etap);
    eta += a * std::cos(2 * j * xip) * std::sinh(2 * j * etap);
  }

  UtmPoint p;
  p.zone = zone;
  p.north = lat >= 0.0;
  p.easting = 500000.0 + kUtmScale * s.rect * eta;
  p.northing = kUtmScale * s.rect * xi + (p.north ? 0.0 : 10000000.0);
  p.altitude = altitude;
  return p;
}

LatLon utm_to_latlon(const UtmPoint& p) {
  if (p.zone < 1 || p.zone > 60) throw Error("invalid UTM zone " + std::to_string(p.zone));
  const auto& s = series();
  const double eta = (p.easting - 500000.0) / (kUtmScale * s.rect);
  const double xi = (p.northing - (p.north ? 0.0 : 10000000.0)) / (kUtmScale * s.rect);

  double xip = xi;
  double etap = eta;
  for (int j = 1; j <= 6; ++j) {
    const double b = s.beta[j - 1];
    xip -= b * std::sin(2 * j * xi) * std::cosh(2 * j * eta);
    etap -= b * std::cos(2 * j * xi) * std::sinh(2 * j * eta);
  }
  const double taup = std::sin(xip) / std::hypot(std::sinh(etap), std::cos(xip));
  const double lam = std::atan2(std::sinh(etap), std::cos(xip));

  const double e2 = s.e * s.e;
  double tau = taup;
  for (int it = 0; it < 10; ++it) {
    const double taui = conformal_tan(tau, s.e);
    const double dtau = (taup - taui) / std::hypot(1.0, taui) * (1.0 + (1.0 - e2) * tau * tau) /
                        ((1.0 - e2) * std::hypot(1.0, tau));
    tau += dtau;
    if (std::abs(dtau) < 1e-14 * std::max(1.0, std::abs(tau))) break;
  }
  return {std::atan(tau) / kDeg, central_meridian(p.zone) + lam / kDeg};
}

}  // namespace evortho
