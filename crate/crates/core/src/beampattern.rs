//! Array-factor patterns over an angular grid and the usual lobe metrics.
//!
//! Gains are `|a(theta, phi)^H A(alpha) v|^2` in dB with `v = diag(Phi^H)`,
//! i.e. relative to a single isotropic element.

use std::collections::VecDeque;
use std::io::Write;

use num_complex::Complex64;

use crate::array::{ArrayGeometry, OperatingBand, RisConfiguration, SteeringAngles};
use crate::error::{invalid, Error, Result};

/// Value written to files for exact nulls (stored in memory as `-inf`).
pub const FILE_NULL_DB: f64 = -400.0;

/// Main-lobe region boundary used to exclude the main lobe from the sidelobe search.
pub const MAIN_LOBE_REGION_DB: f64 = 10.0;

/// Default grid step for metric extraction, degrees.
pub const DEFAULT_GRID_STEP_DEG: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct Pattern2D {
    /// Azimuth samples, radians, ascending.
    pub theta_grid: Vec<f64>,
    /// Elevation samples, radians, ascending.
    pub phi_grid: Vec<f64>,
    /// Row-major `theta x phi` gains in dB; exact nulls are `-inf`.
    pub gain_db: Vec<f64>,
    pub band: OperatingBand,
    pub geometry: ArrayGeometry,
}

impl Pattern2D {
    pub fn rows(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn cols(&self) -> usize {
        self.phi_grid.len()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.gain_db[i * self.cols() + j]
    }

    /// Writes `theta_deg,phi_deg,gain_db` rows; nulls become `FILE_NULL_DB`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "theta_deg,phi_deg,gain_db")?;
        for (i, th) in self.theta_grid.iter().enumerate() {
            for (j, ph) in self.phi_grid.iter().enumerate() {
                let g = self.at(i, j);
                let g = if g.is_finite() { g } else { FILE_NULL_DB };
                writeln!(w, "{:?},{:?},{:?}", th.to_degrees() + 0.0, ph.to_degrees() + 0.0, g + 0.0)?;
            }
        }
        Ok(())
    }
}

/// Evenly spaced grid from `min_deg` to `max_deg` inclusive, returned in radians.
pub fn grid_deg(min_deg: f64, max_deg: f64, step_deg: f64) -> Result<Vec<f64>> {
    if !(step_deg > 0.0 && step_deg.is_finite()) || !(min_deg <= max_deg) {
        return Err(invalid(format!("bad grid [{min_deg}, {max_deg}] step {step_deg}")));
    }
    let count = ((max_deg - min_deg) / step_deg + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| (min_deg + k as f64 * step_deg).to_radians()).collect())
}

fn check_grid(grid: &[f64], name: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid(format!("{name} grid is empty")));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid(format!("{name} grid is not strictly ascending")));
    }
    Ok(())
}

fn axis(count: usize, ratio: f64, cosine: f64) -> Vec<Complex64> {
    let step = -std::f64::consts::TAU * ratio * cosine;
    (0..count).map(|k| Complex64::from_polar(1.0, step * k as f64)).collect()
}

/// Evaluates the array factor of `cfg` at every grid point.
///
/// The steering vector factors as `a_x(theta) (x) a_y(phi)`, so each theta row
/// first contracts the x axis and then sweeps phi over `ny` partial sums.
pub fn synthesize(
    geom: &ArrayGeometry,
    band: &OperatingBand,
    cfg: &RisConfiguration,
    theta_grid: &[f64],
    phi_grid: &[f64],
) -> Result<Pattern2D> {
    check_grid(theta_grid, "theta")?;
    check_grid(phi_grid, "phi")?;
    if cfg.len() != geom.len() {
        return Err(invalid(format!("configuration has {} elements, geometry {}", cfg.len(), geom.len())));
    }
    let (nx, ny) = (geom.nx(), geom.ny());
    let ratio = geom.spacing_m() / band.wavelength_m();
    // v = diag(Phi^H), gated by the activation
    let w: Vec<Complex64> = cfg.weights().iter().map(|z| z.conj()).collect();
    let ay: Vec<Vec<Complex64>> = phi_grid
        .iter()
        .map(|&phi| {
            let (_, uy) = SteeringAngles::new(0.0, phi).direction_cosines();
            axis(ny, ratio, uy).into_iter().map(|z| z.conj()).collect()
        })
        .collect();

    let mut gain_db = Vec::with_capacity(theta_grid.len() * phi_grid.len());
    let mut partial = vec![Complex64::new(0.0, 0.0); ny];
    for &theta in theta_grid {
        let (ux, _) = SteeringAngles::new(theta, 0.0).direction_cosines();
        let ax = axis(nx, ratio, ux);
        for (m, p) in partial.iter_mut().enumerate() {
            *p = (0..nx).map(|k| ax[k].conj() * w[k * ny + m]).sum();
        }
        for ayc in &ay {
            let f: Complex64 = partial.iter().zip(ayc).map(|(p, a)| p * a).sum();
            gain_db.push(10.0 * f.norm_sqr().log10());
        }
    }
    Ok(Pattern2D {
        theta_grid: theta_grid.to_vec(),
        phi_grid: phi_grid.to_vec(),
        gain_db,
        band: *band,
        geometry: *geom,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LobeMetrics {
    pub main_lobe_db: f64,
    /// -3 dB width along the theta cut through the peak, degrees.
    pub width_3db_deg: f64,
    /// -3 dB width along the phi cut through the peak, degrees.
    pub width_3db_phi_deg: f64,
    /// Highest sidelobe relative to the main lobe; `-inf` when there is none.
    pub sll_db: f64,
    pub peak: SteeringAngles,
}

/// Linear-interpolated crossing of `level` between samples `inside` (above) and `outside`.
fn crossing(grid: &[f64], values: &dyn Fn(usize) -> f64, inside: usize, outside: usize, level: f64) -> f64 {
    let (gi, go) = (values(inside), values(outside));
    if !go.is_finite() {
        // treat the null as far below the level: crossing at the outer sample
        return grid[outside];
    }
    let frac = (gi - level) / (gi - go);
    grid[inside] + frac * (grid[outside] - grid[inside])
}

fn cut_width(grid: &[f64], values: &dyn Fn(usize) -> f64, peak: usize, level: f64) -> f64 {
    let mut lo = peak;
    while lo > 0 && values(lo - 1) >= level {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < grid.len() && values(hi + 1) >= level {
        hi += 1;
    }
    let left = if lo > 0 { crossing(grid, values, lo, lo - 1, level) } else { grid[0] };
    let right = if hi + 1 < grid.len() { crossing(grid, values, hi, hi + 1, level) } else { grid[grid.len() - 1] };
    (right - left).to_degrees()
}

pub fn lobe_metrics(p: &Pattern2D) -> Result<LobeMetrics> {
    let (rows, cols) = (p.rows(), p.cols());
    let (peak_idx, main) = p
        .gain_db
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
    let floor = p.gain_db.iter().copied().fold(f64::INFINITY, f64::min);
    if !main.is_finite() || main - floor < 1e-9 {
        return Err(Error::DegeneratePattern("pattern has no distinct maximum".into()));
    }
    let (pi, pj) = (peak_idx / cols, peak_idx % cols);
    let level = main - 3.0;
    let width_theta = cut_width(&p.theta_grid, &|i| p.at(i, pj), pi, level);
    let width_phi = cut_width(&p.phi_grid, &|j| p.at(pi, j), pj, level);

    // main-lobe region: points above (max - 10 dB) connected to the peak
    let region_level = main - MAIN_LOBE_REGION_DB;
    let mut in_main = vec![false; rows * cols];
    let mut queue = VecDeque::from([peak_idx]);
    in_main[peak_idx] = true;
    while let Some(idx) = queue.pop_front() {
        let (i, j) = (idx / cols, idx % cols);
        let neighbours = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
        for (ni, nj) in neighbours {
            if ni < rows && nj < cols {
                let n = ni * cols + nj;
                if !in_main[n] && p.gain_db[n] >= region_level {
                    in_main[n] = true;
                    queue.push_back(n);
                }
            }
        }
    }

    let mut side = f64::NEG_INFINITY;
    for i in 0..rows {
        for j in 0..cols {
            let idx = i * cols + j;
            let v = p.gain_db[idx];
            if in_main[idx] || v <= side || !v.is_finite() {
                continue;
            }
            let is_local_max = (i.saturating_sub(1)..=(i + 1).min(rows - 1))
                .flat_map(|a| (j.saturating_sub(1)..=(j + 1).min(cols - 1)).map(move |b| (a, b)))
                .all(|(a, b)| p.at(a, b) <= v);
            if is_local_max {
                side = v;
            }
        }
    }

    Ok(LobeMetrics {
        main_lobe_db: main,
        width_3db_deg: width_theta,
        width_3db_phi_deg: width_phi,
        sll_db: side - main,
        peak: SteeringAngles::new(p.theta_grid[pi], p.phi_grid[pj]),
    })
}

fn locate(grid: &[f64], x: f64) -> Option<(usize, f64)> {
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    if !(x >= first && x <= last) {
        return None;
    }
    if grid.len() == 1 {
        return Some((0, 0.0));
    }
    let k = grid.partition_point(|&g| g <= x).clamp(1, grid.len() - 1) - 1;
    Some((k, (x - grid[k]) / (grid[k + 1] - grid[k])))
}

/// Highest gain (dB) over `directions`, bilinearly interpolated in linear power.
pub fn leakage_in_region(p: &Pattern2D, directions: &[SteeringAngles]) -> Result<f64> {
    if directions.is_empty() {
        return Err(invalid("empty direction set"));
    }
    let power = |i: usize, j: usize| 10f64.powf(p.at(i, j) / 10.0);
    let mut best = f64::NEG_INFINITY;
    for d in directions {
        let (Some((i, fi)), Some((j, fj))) = (locate(&p.theta_grid, d.theta_rad), locate(&p.phi_grid, d.phi_rad)) else {
            return Err(invalid(format!("direction {d:?} lies outside the pattern grid")));
        };
        let i1 = (i + 1).min(p.rows() - 1);
        let j1 = (j + 1).min(p.cols() - 1);
        let mut lin = 0.0;
        for (ii, wi) in [(i, 1.0 - fi), (i1, fi)] {
            for (jj, wj) in [(j, 1.0 - fj), (j1, fj)] {
                let w = wi * wj;
                if w > 0.0 {
                    lin += w * power(ii, jj);
                }
            }
        }
        best = best.max(10.0 * lin.log10());
    }
    Ok(best)
}
