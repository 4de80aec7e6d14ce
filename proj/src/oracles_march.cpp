// Finite-difference marching oracles for the steady plume and the transient
// jet.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "aerochan/errors.hpp"
#include "aerochan/oracles.hpp"

namespace aerochan::oracles {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Solves a tridiagonal system in place (Thomas algorithm). lower[0] and
// upper[n-1] are ignored. `scratch` must have the size of `rhs`.
void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                       const std::vector<double>& upper, std::vector<double>& rhs,
                       std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  scratch[0] = upper[0] / diag[0];
  rhs[0] /= diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i] * scratch[i - 1];
    scratch[i] = upper[i] / m;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / m;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

double steady_closed_form(double rate, double u, double eta_value, double y, double z,
                          double height) {
  const double inv = 1.0 / (4.0 * eta_value);
  const double a = z - height;
  const double b = z + height;
  return rate / (4.0 * u * std::numbers::pi * eta_value) * std::exp(-y * y * inv) *
         (std::exp(-a * a * inv) + std::exp(-b * b * inv));
}

class SteadyMarcher {
 public:
  SteadyMarcher(const MarchGrid& g, std::size_t ny, std::size_t nz)
      : g_(g), ny_(ny), nz_(nz), next_(ny * nz, 0.0) {}

  void explicit_step(std::vector<double>& c) {
    const double ly = g_.deta / (g_.dy * g_.dy);
    const double lz = g_.deta / (g_.dz * g_.dz);
    for (std::size_t iy = 0; iy < ny_; ++iy) {
      const double* row = &c[iy * nz_];
      const double* below = iy > 0 ? &c[(iy - 1) * nz_] : nullptr;
      const double* above = iy + 1 < ny_ ? &c[(iy + 1) * nz_] : nullptr;
      double* out = &next_[iy * nz_];
      for (std::size_t iz = 0; iz < nz_; ++iz) {
        const double v = row[iz];
        const double yl = below ? below[iz] : 0.0;
        const double yr = above ? above[iz] : 0.0;
        const double zl = iz > 0 ? row[iz - 1] : v;  // no flux through the ground
        const double zr = iz + 1 < nz_ ? row[iz + 1] : 0.0;
        out[iz] = v + ly * (yl + yr - 2.0 * v) + lz * (zl + zr - 2.0 * v);
      }
    }
    c.swap(next_);
  }

  // Peaceman-Rachford: half step implicit in y, then half step implicit in z.
  void adi_step(std::vector<double>& c) {
    const double hy = 0.5 * g_.deta / (g_.dy * g_.dy);
    const double hz = 0.5 * g_.deta / (g_.dz * g_.dz);

    // Sweep 1: (I - hy Dyy) C* = (I + hz Dzz) C
    {
      std::vector<double> lower(ny_, -hy), diag(ny_, 1.0 + 2.0 * hy), upper(ny_, -hy);
      std::vector<double> rhs(ny_), scratch(ny_);
      for (std::size_t iz = 0; iz < nz_; ++iz) {
        for (std::size_t iy = 0; iy < ny_; ++iy) {
          const double* row = &c[iy * nz_];
          const double v = row[iz];
          const double zl = iz > 0 ? row[iz - 1] : v;
          const double zr = iz + 1 < nz_ ? row[iz + 1] : 0.0;
          rhs[iy] = v + hz * (zl + zr - 2.0 * v);
        }
        solve_tridiagonal(lower, diag, upper, rhs, scratch);
        for (std::size_t iy = 0; iy < ny_; ++iy) next_[iy * nz_ + iz] = rhs[iy];
      }
    }
    // Sweep 2: (I - hz Dzz) C^{n+1} = (I + hy Dyy) C*
    {
      std::vector<double> lower(nz_, -hz), diag(nz_, 1.0 + 2.0 * hz), upper(nz_, -hz);
      diag[0] = 1.0 + hz;  // reflecting ground: ghost equals the first cell
      std::vector<double> rhs(nz_), scratch(nz_);
      for (std::size_t iy = 0; iy < ny_; ++iy) {
        const double* row = &next_[iy * nz_];
        const double* below = iy > 0 ? &next_[(iy - 1) * nz_] : nullptr;
        const double* above = iy + 1 < ny_ ? &next_[(iy + 1) * nz_] : nullptr;
        for (std::size_t iz = 0; iz < nz_; ++iz) {
          const double v = row[iz];
          const double yl = below ? below[iz] : 0.0;
          const double yr = above ? above[iz] : 0.0;
          rhs[iz] = v + hy * (yl + yr - 2.0 * v);
        }
        solve_tridiagonal(lower, diag, upper, rhs, scratch);
        std::copy(rhs.begin(), rhs.end(), c.begin() + static_cast<long>(iy * nz_));
      }
    }
  }

 private:
  const MarchGrid& g_;
  std::size_t ny_;
  std::size_t nz_;
  std::vector<double> next_;
};

}  // namespace

// ---------------------------------------------------------------------------
// MarchGrid

MarchGrid MarchGrid::for_plume(double eta_end, double source_height, int cells_per_side,
                               double stability_fraction) {
  if (!(eta_end > 0.0)) throw ConfigError("oracle.eta_end", "eta_end must be positive");
  if (cells_per_side < 4) throw ConfigError("oracle.cells", "need at least 4 cells per side");
  if (!(stability_fraction > 0.0 && stability_fraction <= 1.0)) {
    throw ConfigError("oracle.stability_fraction", "must lie in (0, 1]");
  }
  MarchGrid g;
  g.y_max = 6.0 * std::sqrt(eta_end);
  g.dy = g.y_max / cells_per_side;
  g.dz = g.dy;
  const double nz = std::ceil((source_height + g.y_max) / g.dz);
  g.z_max = nz * g.dz;
  g.eta_end = eta_end;
  g.eta_start = 2.0 * g.dy * g.dy;  // plume standard deviation = 2 cells
  if (!(g.eta_start < eta_end)) {
    throw ConfigError("oracle.cells", "grid too coarse for the marching range");
  }
  const double limit = stability_fraction * 0.25 * g.dy * g.dy;
  const double steps = std::ceil((g.eta_end - g.eta_start) / limit);
  g.deta = (g.eta_end - g.eta_start) / steps;
  return g;
}

MarchGrid MarchGrid::refined() const {
  MarchGrid g = *this;
  g.dy *= 0.5;
  g.dz *= 0.5;
  g.deta *= 0.5;
  return g;
}

void MarchGrid::validate(double source_height) const {
  if (!(dy > 0.0 && dz > 0.0 && deta > 0.0)) {
    throw ConfigError("oracle.grid", "grid steps must be positive");
  }
  if (!(eta_start > 0.0 && eta_end > eta_start)) {
    throw ConfigError("oracle.grid", "need 0 < eta_start < eta_end");
  }
  if (scheme == MarchScheme::Explicit &&
      deta > 0.25 * std::min(dy * dy, dz * dz) * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "explicit march unstable: deta = " << deta
       << " exceeds 0.25 min(dy^2, dz^2) = " << 0.25 * std::min(dy * dy, dz * dz);
    throw ConfigError("oracle.grid.deta", os.str());
  }
  if (!(source_height > 0.0 && source_height < z_max)) {
    throw ConfigError("oracle.grid.z_max", "source height must lie inside (0, z_max)");
  }
  const double reach = 6.0 * std::sqrt(eta_end) * (1.0 - 1e-9);
  if (y_max < reach) throw ConfigError("oracle.grid.y_max", "y_max below 6 sqrt(eta_end)");
  if (z_max - source_height < reach) {
    throw ConfigError("oracle.grid.z_max", "z_max less than 6 sqrt(eta_end) above the source");
  }
}

// ---------------------------------------------------------------------------
// Steady march

SteadyMarchResult fd_march_steady(const ChannelParams& params, double source_height,
                                  const MarchGrid& grid, double rate) {
  const auto start = Clock::now();
  params.validate();
  grid.validate(source_height);
  const double u = params.wind_speed;

  const auto ny = static_cast<std::size_t>(std::llround(2.0 * grid.y_max / grid.dy));
  const auto nz = static_cast<std::size_t>(std::llround(grid.z_max / grid.dz));
  SteadyMarchResult out;
  out.y.resize(ny);
  out.z.resize(nz);
  // Symmetric about y = 0 by construction (ny is even).
  for (std::size_t i = 0; i < ny; ++i) {
    out.y[i] = (static_cast<double>(i) + 0.5 - 0.5 * static_cast<double>(ny)) * grid.dy;
  }
  for (std::size_t k = 0; k < nz; ++k) out.z[k] = (static_cast<double>(k) + 0.5) * grid.dz;

  auto& c = out.field;
  c.assign(ny * nz, 0.0);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t iz = 0; iz < nz; ++iz) {
      c[iy * nz + iz] =
          steady_closed_form(rate, u, grid.eta_start, out.y[iy], out.z[iz], source_height);
    }
  }

  auto& report = out.report;
  report.name = "fd_march_steady";
  const double init_sd = std::sqrt(2.0 * grid.eta_start);
  const double cell = std::max(grid.dy, grid.dz);
  if (init_sd > 3.0 * cell) {
    report.warnings.push_back("initial Gaussian wider than 3 cells; point-source approximation is coarse");
  }
  if (init_sd < 2.0 * cell) {
    report.warnings.push_back("initial Gaussian narrower than 2 cells; under-resolved");
  }

  const double cell_area = grid.dy * grid.dz;
  auto slice_mass = [&] {
    double m = 0.0;
    for (double v : c) m += v;
    return m * cell_area;
  };

  const auto steps = static_cast<long>(std::llround((grid.eta_end - grid.eta_start) / grid.deta));
  SteadyMarcher marcher(grid, ny, nz);
  double eta_now = grid.eta_start;
  out.eta_samples.push_back(eta_now);
  out.slice_mass.push_back(slice_mass());
  for (long n = 0; n < steps; ++n) {
    if (grid.scheme == MarchScheme::Explicit) {
      marcher.explicit_step(c);
    } else {
      marcher.adi_step(c);
    }
    eta_now = grid.eta_start + static_cast<double>(n + 1) * grid.deta;
    out.eta_samples.push_back(eta_now);
    out.slice_mass.push_back(slice_mass());
  }
  out.eta_final = eta_now;

  double num = 0.0;
  double den = 0.0;
  double peak = 0.0;
  double max_err = 0.0;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t iz = 0; iz < nz; ++iz) {
      const double exact =
          steady_closed_form(rate, u, eta_now, out.y[iy], out.z[iz], source_height);
      const double diff = c[iy * nz + iz] - exact;
      num += diff * diff;
      den += exact * exact;
      peak = std::max(peak, exact);
      max_err = std::max(max_err, std::abs(diff));
    }
  }
  report.l2_rel_error = den > 0.0 ? std::sqrt(num / den) : 0.0;
  report.max_rel_error = peak > 0.0 ? max_err / peak : 0.0;
  report.budget = 0.02;
  report.passed = report.l2_rel_error < report.budget;
  report.grid = {{"eta_start", grid.eta_start}, {"eta_end", eta_now},
                 {"dy", grid.dy},               {"dz", grid.dz},
                 {"deta", grid.deta},           {"y_max", grid.y_max},
                 {"z_max", grid.z_max},         {"ny", static_cast<double>(ny)},
                 {"nz", static_cast<double>(nz)}, {"steps", static_cast<double>(steps)},
                 {"implicit", grid.scheme == MarchScheme::Implicit ? 1.0 : 0.0}};
  report.runtime_seconds = seconds_since(start);
  return out;
}

// ---------------------------------------------------------------------------
// Transient march

void TransientGrid::validate(const ChannelParams& params, double source_height) const {
  if (!(dx > 0.0 && dy > 0.0 && dz > 0.0)) {
    throw ConfigError("oracle.transient", "grid steps must be positive");
  }
  if (!(half_width_x > dx && half_width_y > dy && half_width_z > dz)) {
    throw ConfigError("oracle.transient", "window must span more than one cell");
  }
  if (!(t_start > 0.0 && t_end > t_start)) {
    throw ConfigError("oracle.transient", "need 0 < t_start < t_end");
  }
  if (!params.diffusivity.is_constant()) {
    throw ConfigError("channel.diffusivity", "transient oracle supports constant K only");
  }
  if (!(source_height > 0.0)) throw ConfigError("oracle.transient", "source height must be positive");
  const double k = params.diffusivity.k0();
  const double dt = dx / params.wind_speed;
  const double number = k * dt * (1.0 / (dx * dx) + 1.0 / (dy * dy) + 1.0 / (dz * dz));
  if (number > 0.5) {
    std::ostringstream os;
    os << "diffusion CFL violated: K dt sum(1/h^2) = " << number << " > 0.5";
    throw ConfigError("oracle.transient", os.str());
  }
}

TransientMarchResult fd_march_transient(const ChannelParams& params, double source_height,
                                        const TransientGrid& grid,
                                        const std::vector<Position>& probes,
                                        const std::vector<double>& t_samples,
                                        double jet_mass, double comparison_floor) {
  const auto start = Clock::now();
  params.validate();
  grid.validate(params, source_height);
  const double u = params.wind_speed;
  const double k = params.diffusivity.k0();
  const double dt = grid.dx / u;  // unit Courant number

  const auto half_x = static_cast<long>(std::ceil(grid.half_width_x / grid.dx));
  const auto half_y = static_cast<long>(std::ceil(grid.half_width_y / grid.dy));
  const auto half_z = static_cast<long>(std::ceil(grid.half_width_z / grid.dz));
  const auto nx = static_cast<std::size_t>(2 * half_x);
  const auto ny = static_cast<std::size_t>(2 * half_y);
  double z_lo = source_height - static_cast<double>(half_z) * grid.dz;
  std::size_t nz = static_cast<std::size_t>(2 * half_z);
  const bool reflecting = z_lo <= 0.0;
  if (reflecting) {
    z_lo = 0.0;
    nz = static_cast<std::size_t>(std::ceil((source_height + grid.half_width_z) / grid.dz));
  }

  auto idx = [ny, nz](std::size_t i, std::size_t j, std::size_t kk) {
    return (i * ny + j) * nz + kk;
  };
  auto y_of = [&](std::size_t j) {
    return (static_cast<double>(j) + 0.5 - static_cast<double>(half_y)) * grid.dy;
  };
  auto z_of = [&](std::size_t kk) { return z_lo + (static_cast<double>(kk) + 0.5) * grid.dz; };
  // Window origin: x of cell i at time t is u t + offset_i.
  auto x_offset = [&](std::size_t i) {
    return (static_cast<double>(i) + 0.5 - static_cast<double>(half_x)) * grid.dx;
  };

  std::vector<double> c(nx * ny * nz);
  {
    const double var4 = 4.0 * k * grid.t_start;
    const double norm = 1.0 / std::sqrt(std::numbers::pi * var4);
    for (std::size_t i = 0; i < nx; ++i) {
      const double gx = norm * std::exp(-x_offset(i) * x_offset(i) / var4);
      for (std::size_t j = 0; j < ny; ++j) {
        const double gy = norm * std::exp(-y_of(j) * y_of(j) / var4);
        for (std::size_t kk = 0; kk < nz; ++kk) {
          const double a = z_of(kk) - source_height;
          const double b = z_of(kk) + source_height;
          const double gz = norm * (std::exp(-a * a / var4) + std::exp(-b * b / var4));
          c[idx(i, j, kk)] = jet_mass * gx * gy * gz;
        }
      }
    }
  }

  TransientMarchResult out;
  out.dt = dt;
  out.report.name = "fd_march_transient";
  out.probes.resize(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) out.probes[p].where = probes[p];

  const double cell_volume = grid.dx * grid.dy * grid.dz;
  auto total_mass = [&] {
    double m = 0.0;
    for (double v : c) m += v;
    return m * cell_volume;
  };

  auto probe_value = [&](const Position& p, double t) {
    // Fractional cell coordinates.
    const double fx = (p.x - u * t) / grid.dx + static_cast<double>(half_x) - 0.5;
    const double fy = p.y / grid.dy + static_cast<double>(half_y) - 0.5;
    const double fz = (p.z - z_lo) / grid.dz - 0.5;
    const double ix = std::floor(fx);
    const double iy = std::floor(fy);
    const double iz = std::floor(fz);
    if (ix < 0 || iy < 0 || iz < 0 || ix + 1 >= static_cast<double>(nx) ||
        iy + 1 >= static_cast<double>(ny) || iz + 1 >= static_cast<double>(nz)) {
      return 0.0;
    }
    const double ax = fx - ix;
    const double ay = fy - iy;
    const double az = fz - iz;
    const auto i0 = static_cast<std::size_t>(ix);
    const auto j0 = static_cast<std::size_t>(iy);
    const auto k0 = static_cast<std::size_t>(iz);
    double v = 0.0;
    for (int di = 0; di < 2; ++di) {
      for (int dj = 0; dj < 2; ++dj) {
        for (int dk = 0; dk < 2; ++dk) {
          const double w = (di ? ax : 1.0 - ax) * (dj ? ay : 1.0 - ay) * (dk ? az : 1.0 - az);
          v += w * c[idx(i0 + di, j0 + dj, k0 + dk)];
        }
      }
    }
    return v;
  };

  auto record = [&](double t) {
    out.times.push_back(t);
    out.mass.push_back(total_mass());
    for (std::size_t p = 0; p < probes.size(); ++p) {
      out.probes[p].values.push_back(probe_value(probes[p], t));
    }
  };

  const double lx = k * dt / (grid.dx * grid.dx);
  const double ly = k * dt / (grid.dy * grid.dy);
  const double lz = k * dt / (grid.dz * grid.dz);
  std::vector<double> next(c.size());
  const auto steps = static_cast<long>(std::ceil((grid.t_end - grid.t_start) / dt));
  double t = grid.t_start;
  record(t);
  for (long n = 0; n < steps; ++n) {
    // Advection: the upwind update at unit Courant number, C_i <- C_{i-1},
    // is an exact one-cell shift; the window follows it, so cell i keeps its
    // value while its position x = u t + offset_i advances by dx.
    //
    // Diffusion: explicit centered differences, zero far field, mirror ghost
    // at the ground.
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t kk = 0; kk < nz; ++kk) {
          const double v = c[idx(i, j, kk)];
          const double xl = i > 0 ? c[idx(i - 1, j, kk)] : 0.0;
          const double xr = i + 1 < nx ? c[idx(i + 1, j, kk)] : 0.0;
          const double yl = j > 0 ? c[idx(i, j - 1, kk)] : 0.0;
          const double yr = j + 1 < ny ? c[idx(i, j + 1, kk)] : 0.0;
          const double zl = kk > 0 ? c[idx(i, j, kk - 1)] : (reflecting ? v : 0.0);
          const double zr = kk + 1 < nz ? c[idx(i, j, kk + 1)] : 0.0;
          next[idx(i, j, kk)] = v + lx * (xl + xr - 2.0 * v) + ly * (yl + yr - 2.0 * v) +
                                lz * (zl + zr - 2.0 * v);
        }
      }
    }
    c.swap(next);
    t = grid.t_start + static_cast<double>(n + 1) * dt;
    record(t);
  }

  for (double ts : t_samples) {
    const auto it = std::lower_bound(out.times.begin(), out.times.end(), ts - 0.5 * dt);
    if (it == out.times.end()) continue;
    const auto pos = static_cast<std::size_t>(it - out.times.begin());
    out.sample_times.push_back(out.times[pos]);
    out.sample_mass.push_back(out.mass[pos]);
  }

  // Compare against the closed-form jet.
  double max_rel = 0.0;
  double num = 0.0;
  double den = 0.0;
  double max_peak_offset = 0.0;
  for (const auto& series : out.probes) {
    std::vector<double> exact(out.times.size());
    double exact_peak = 0.0;
    for (std::size_t n = 0; n < out.times.size(); ++n) {
      const SpaceTimePoint sp{series.where.x, series.where.y, series.where.z, out.times[n]};
      exact[n] = jet_concentration(jet_mass, 0.0, sp, params, source_height);
      exact_peak = std::max(exact_peak, exact[n]);
    }
    for (std::size_t n = 0; n < out.times.size(); ++n) {
      if (exact[n] < comparison_floor * exact_peak || exact[n] <= 0.0) continue;
      const double diff = series.values[n] - exact[n];
      max_rel = std::max(max_rel, std::abs(diff) / exact[n]);
      num += diff * diff;
      den += exact[n] * exact[n];
    }
    const auto peak_it = std::max_element(series.values.begin(), series.values.end());
    if (peak_it != series.values.end() && *peak_it > 0.0) {
      const double t_peak = out.times[static_cast<std::size_t>(peak_it - series.values.begin())];
      max_peak_offset = std::max(max_peak_offset, std::abs(t_peak - series.where.x / u));
    }
  }
  double mass_drift = 0.0;
  for (double m : out.mass) mass_drift = std::max(mass_drift, std::abs(m - jet_mass) / jet_mass);

  auto& report = out.report;
  report.max_rel_error = max_rel;
  report.l2_rel_error = den > 0.0 ? std::sqrt(num / den) : 0.0;
  report.budget = 0.05;
  report.passed = max_rel < report.budget && mass_drift < 0.01;
  report.grid = {{"dx", grid.dx},
                 {"dy", grid.dy},
                 {"dz", grid.dz},
                 {"dt", dt},
                 {"nx", static_cast<double>(nx)},
                 {"ny", static_cast<double>(ny)},
                 {"nz", static_cast<double>(nz)},
                 {"steps", static_cast<double>(steps)},
                 {"mass_drift", mass_drift},
                 {"max_peak_time_offset", max_peak_offset},
                 {"reflecting_ground", reflecting ? 1.0 : 0.0}};
  if (2.0 * k * grid.t_start < 4.0 * grid.dx * grid.dx) {
    report.warnings.push_back("initial puff narrower than 2 cells; under-resolved");
  }
  report.runtime_seconds = seconds_since(start);
  return out;
}

}  // namespace aerochan::oracles
