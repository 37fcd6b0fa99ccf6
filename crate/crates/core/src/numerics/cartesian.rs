//! Matrix-free Cartesian grid Hamiltonian for N = 2, 3.
//!
//! `pi_i = -i A_i` with `A_i = (F_face D_i + D_i F_center) / 2`, where `D_i`
//! is the forward difference from cell centres to cell faces and `F` samples
//! `sqrt(1 + lam r^2)`. The angular momenta are `L_ij = -i B_ij` with
//! `B_ij = X_i C_j - X_j C_i` and `C` the central difference. Then
//! `H = (1/2) sum A_i^T A_i + (k lam / 2) sum_{i<j} B_ij^2 + V`, where `k` is
//! the `L^2` convention factor. Every piece is real and the whole matrix is
//! symmetric by construction.

use crate::systems::{Family, SystemSpec};

use super::filter::{filtered_lowest, FilterOptions};
use super::lanczos::lanczos;
use super::{norm, EigenResult, GridSpec, NumericsError};

const MAX_M_2D: usize = 512;
const MAX_M_3D: usize = 96;

#[derive(Clone, Debug)]
pub struct CartesianHamiltonian {
    pub family: Family,
    pub dim: usize,
    pub lambda: f64,
    pub lsq_factor: f64,
    pub grid: GridSpec,
    centers: Vec<f64>,
    /// `r^2` at every cell.
    r2: Vec<f64>,
    f_center: Vec<f64>,
    /// Per axis: `F` on the `M + 1` faces of every grid line along it.
    f_face: Vec<Vec<f64>>,
    /// Per axis: grid index of every cell along it.
    coord_index: Vec<Vec<u32>>,
    potential: Vec<f64>,
}

pub fn cartesian_hamiltonian(spec: &SystemSpec, grid: GridSpec) -> Result<CartesianHamiltonian, NumericsError> {
    let dim = spec.dim();
    let limit = match dim {
        2 => MAX_M_2D,
        3 => MAX_M_3D,
        _ => return Err(NumericsError::Resource(format!("Cartesian grids support N = 2, 3, not {dim}"))),
    };
    if grid.m > limit {
        return Err(NumericsError::Resource(format!("M = {} exceeds {limit} for N = {dim}", grid.m)));
    }
    let lambda = spec.ctx.lambda.as_f64().ok_or(NumericsError::SymbolicLambda)?;
    if lambda < 0.0 {
        return Err(NumericsError::Grid(format!("lambda = {lambda} < 0")));
    }
    let centers = grid.points();
    let h = grid.h();
    let faces: Vec<f64> = (0..=grid.m).map(|k| grid.origin + k as f64 * h).collect();
    let size = grid.m.pow(dim as u32);
    let mut r2 = vec![0.0; size];
    for (idx, v) in r2.iter_mut().enumerate() {
        let mut rest = idx;
        for _ in 0..dim {
            let x = centers[rest % grid.m];
            *v += x * x;
            rest /= grid.m;
        }
    }
    let f_center: Vec<f64> = r2.iter().map(|q| (1.0 + lambda * q).sqrt()).collect();
    let potential = r2
        .iter()
        .zip(&f_center)
        .enumerate()
        .map(|(idx, (&q, &s))| match spec.family {
            // Cell average of 1/r: the singularity sits on a cell corner.
            Family::Coulomb => {
                let mut lo = Vec::with_capacity(dim);
                let mut rest = idx;
                for _ in 0..dim {
                    lo.push(faces[rest % grid.m]);
                    rest /= grid.m;
                }
                let hi: Vec<f64> = lo.iter().map(|a| a + h).collect();
                -s * inverse_distance_average(&lo, &hi)
            }
            Family::Oscillator => 0.5 * q / (1.0 + lambda * q),
        })
        .collect();
    let m = grid.m;
    let f_face = (0..dim)
        .map(|axis| {
            let stride = m.pow(axis as u32);
            let mut ff = Vec::with_capacity(size / m * (m + 1));
            for line in 0..size / m {
                let start = line_start(line, stride, m);
                let x0 = centers[(start / stride) % m];
                let others = r2[start] - x0 * x0;
                ff.extend(faces.iter().map(|xf| (1.0 + lambda * (others + xf * xf)).sqrt()));
            }
            ff
        })
        .collect();
    let coord_index = (0..dim)
        .map(|axis| {
            let stride = m.pow(axis as u32);
            (0..size).map(|idx| ((idx / stride) % m) as u32).collect()
        })
        .collect();
    Ok(CartesianHamiltonian {
        family: spec.family,
        dim,
        lambda,
        lsq_factor: spec.convention.factor() as f64,
        grid,
        centers,
        r2,
        f_center,
        f_face,
        coord_index,
        potential,
    })
}

impl CartesianHamiltonian {
    pub fn size(&self) -> usize {
        self.r2.len()
    }

    fn stride(&self, axis: usize) -> usize {
        self.grid.m.pow(axis as u32)
    }

    /// `out = H u`.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let m = self.grid.m;
        let inv_h = 1.0 / self.grid.h();
        for ((o, &v), &x) in out.iter_mut().zip(&self.potential).zip(u) {
            *o = v * x;
        }
        let mut t = vec![0.0; m + 1];
        for axis in 0..self.dim {
            let stride = self.stride(axis);
            for line in 0..self.size() / m {
                let start = line_start(line, stride, m);
                let ff = &self.f_face[axis][line * (m + 1)..(line + 1) * (m + 1)];
                let (mut ul, mut fl) = (0.0, 0.0);
                for (k, tk) in t.iter_mut().enumerate() {
                    let (ur, fr) = if k < m {
                        let i = start + k * stride;
                        (u[i], self.f_center[i])
                    } else {
                        (0.0, 0.0)
                    };
                    *tk = 0.5 * (ff[k] * (ur - ul) + (fr * ur - fl * ul)) * inv_h;
                    ul = ur;
                    fl = fr;
                }
                for j in 0..m {
                    let i = start + j * stride;
                    let back = (ff[j] * t[j] - ff[j + 1] * t[j + 1]) + self.f_center[i] * (t[j] - t[j + 1]);
                    out[i] += 0.25 * back * inv_h;
                }
            }
        }
        if self.lambda != 0.0 {
            let coeff = 0.5 * self.lambda * self.lsq_factor;
            let mut w = vec![0.0; self.size()];
            let mut w2 = vec![0.0; self.size()];
            for a in 0..self.dim {
                for b in (a + 1)..self.dim {
                    self.apply_b(a, b, u, &mut w);
                    self.apply_b(a, b, &w, &mut w2);
                    for (o, v) in out.iter_mut().zip(&w2) {
                        *o += coeff * v;
                    }
                }
            }
        }
    }

    /// `out = B_ab u` with `L_ab = -i B_ab` (0-based axes).
    pub fn apply_b(&self, a: usize, b: usize, u: &[f64], out: &mut [f64]) {
        let inv2h = 0.5 / self.grid.h();
        let m = self.grid.m;
        let (sa, sb) = (self.stride(a), self.stride(b));
        let (ca, cb) = (&self.coord_index[a], &self.coord_index[b]);
        for (idx, o) in out.iter_mut().enumerate() {
            let (ia, ib) = (ca[idx] as usize, cb[idx] as usize);
            let diff = |s: usize, i: usize| {
                let up = if i + 1 < m { u[idx + s] } else { 0.0 };
                let down = if i > 0 { u[idx - s] } else { 0.0 };
                up - down
            };
            *o = (self.centers[ia] * diff(sb, ib) - self.centers[ib] * diff(sa, ia)) * inv2h;
        }
    }

    /// Position `x_axis` of every cell.
    pub fn coordinate(&self, axis: usize) -> Vec<f64> {
        self.coord_index[axis].iter().map(|&i| self.centers[i as usize]).collect()
    }
}

/// Mean of `1/|x|` over the box `lo <= x <= hi` (2 or 3 axes).
pub fn inverse_distance_average(lo: &[f64], hi: &[f64]) -> f64 {
    // Split every axis at 0 and reflect, so each piece has lo >= 0.
    fn pieces(a: f64, b: f64) -> Vec<(f64, f64)> {
        if a >= 0.0 {
            vec![(a, b)]
        } else if b <= 0.0 {
            vec![(-b, -a)]
        } else {
            vec![(0.0, -a), (0.0, b)]
        }
    }
    fn xlog(x: f64, arg: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            x * arg.ln()
        }
    }
    // Antiderivatives of 1/r in the positive orthant.
    fn prim(p: &[f64]) -> f64 {
        match *p {
            [x, y] => {
                let r = x.hypot(y);
                xlog(x, y + r) + xlog(y, x + r)
            }
            [x, y, z] => {
                let r = (x * x + y * y + z * z).sqrt();
                let at = |a: f64, b: f64, c: f64| if a == 0.0 { 0.0 } else { 0.5 * a * a * (b * c / (a * r)).atan() };
                xlog(y * z, x + r) + xlog(x * z, y + r) + xlog(x * y, z + r) - at(x, y, z) - at(y, x, z) - at(z, x, y)
            }
            _ => unreachable!("2 or 3 axes"),
        }
    }
    let axes: Vec<Vec<(f64, f64)>> = lo.iter().zip(hi).map(|(&a, &b)| pieces(a, b)).collect();
    let mut total = 0.0;
    let mut choice = vec![0usize; axes.len()];
    loop {
        let bounds: Vec<(f64, f64)> = choice.iter().zip(&axes).map(|(&c, ax)| ax[c]).collect();
        for corner in 0..1usize << bounds.len() {
            let mut sign = 1.0;
            let p: Vec<f64> = bounds
                .iter()
                .enumerate()
                .map(|(a, &(l, u))| {
                    if corner >> a & 1 == 1 {
                        u
                    } else {
                        sign = -sign;
                        l
                    }
                })
                .collect();
            total += sign * prim(&p);
        }
        let mut a = 0;
        while a < choice.len() && choice[a] + 1 == axes[a].len() {
            choice[a] = 0;
            a += 1;
        }
        if a == choice.len() {
            break;
        }
        choice[a] += 1;
    }
    let volume: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    total / volume
}

/// First cell of grid line `line` along the axis with the given stride.
fn line_start(line: usize, stride: usize, m: usize) -> usize {
    (line / stride) * stride * m + line % stride
}

/// Parity of a grid function under `x_a -> -x_a`, one flag per axis
/// (`true` = odd). The grid is symmetric about the origin for even `M`,
/// and `H` commutes with each reflection.
pub type Parity = Vec<bool>;

impl CartesianHamiltonian {
    fn half(&self) -> usize {
        self.grid.m / 2
    }

    /// Size of one parity sector: the cells with every coordinate positive.
    pub fn sector_size(&self) -> usize {
        self.half().pow(self.dim as u32)
    }

    /// Every parity pattern, all-even first.
    pub fn parities(&self) -> Vec<Parity> {
        (0..1usize << self.dim).map(|bits| (0..self.dim).map(|a| bits >> a & 1 == 1).collect()).collect()
    }

    /// Full-grid index and sign of every cell, as seen from the positive
    /// orthant.
    fn orbit_map(&self, parity: &[bool]) -> Vec<(usize, f64)> {
        let (m, half) = (self.grid.m, self.half());
        (0..self.size())
            .map(|idx| {
                let mut rest = idx;
                let mut q = 0;
                let mut qs = 1;
                let mut sign = 1.0;
                for &odd in parity.iter().take(self.dim) {
                    let i = rest % m;
                    rest /= m;
                    let pos = if i >= half {
                        i - half
                    } else {
                        if odd {
                            sign = -sign;
                        }
                        half - 1 - i
                    };
                    q += pos * qs;
                    qs *= half;
                }
                (q, sign)
            })
            .collect()
    }

    /// Lowest `k` eigenpairs with the given reflection parity. Vectors are
    /// returned on the full grid with unit norm.
    pub fn lowest_in(&self, parity: &[bool], k: usize, tol: f64) -> Result<EigenResult, NumericsError> {
        if self.grid.m % 2 == 1 {
            return Err(NumericsError::Grid("parity sectors need an even M".into()));
        }
        if parity.len() != self.dim {
            return Err(NumericsError::Grid(format!("parity has {} axes, grid has {}", parity.len(), self.dim)));
        }
        let map = self.orbit_map(parity);
        let mut cells = vec![0; self.sector_size()];
        for idx in (0..self.size()).filter(|&i| self.in_positive_orthant(i)) {
            cells[map[idx].0] = idx;
        }
        let n = self.size();
        let apply = |q: &[f64], out: &mut [f64]| {
            let full: Vec<f64> = map.iter().map(|&(i, sg)| sg * q[i]).collect();
            let mut hf = vec![0.0; n];
            self.apply(&full, &mut hf);
            for (o, &idx) in out.iter_mut().zip(&cells) {
                *o = hf[idx];
            }
        };
        let mut res = filtered_lowest(apply, self.sector_size(), FilterOptions::new(k, tol))?;
        // The sector operator is the full one restricted to unit vectors of
        // this symmetry, so values and residuals carry over unchanged.
        if let Some(vs) = res.vectors.as_mut() {
            for v in vs.iter_mut() {
                let full: Vec<f64> = map.iter().map(|&(i, sg)| sg * v[i]).collect();
                let nv = norm(&full);
                *v = full.into_iter().map(|x| x / nv).collect();
            }
        }
        Ok(res)
    }

    /// Lowest `k` eigenpairs of the whole grid, merged from every parity
    /// sector and sorted by energy.
    pub fn lowest(&self, k: usize, tol: f64) -> Result<EigenResult, NumericsError> {
        if k == 0 {
            return Ok(EigenResult::default());
        }
        if self.grid.m % 2 == 1 {
            return lanczos(|u, o| self.apply(u, o), self.size(), k, tol);
        }
        let parities = self.parities();
        let per = k.div_ceil(parities.len()) + 2;
        let mut wanted = vec![per.min(self.sector_size()); parities.len()];
        let mut found: Vec<Option<EigenResult>> = vec![None; parities.len()];
        loop {
            for (s, parity) in parities.iter().enumerate() {
                if found[s].as_ref().is_some_and(|r| r.len() >= wanted[s]) {
                    continue;
                }
                found[s] = Some(self.lowest_in(parity, wanted[s], tol)?);
            }
            let mut all: Vec<(f64, usize, usize)> = found
                .iter()
                .enumerate()
                .flat_map(|(s, r)| r.as_ref().unwrap().values.iter().enumerate().map(move |(j, &v)| (v, s, j)))
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0));
            let cutoff = all.get(k - 1).map(|t| t.0).unwrap_or(f64::INFINITY);
            // A sector whose highest computed value lies below the cutoff may
            // hide further states in the lowest k.
            let mut again = false;
            for (s, r) in found.iter().enumerate() {
                let r = r.as_ref().unwrap();
                if r.len() < self.sector_size() && r.values.last().is_some_and(|&v| v <= cutoff) {
                    wanted[s] = (wanted[s] + per).min(self.sector_size());
                    again = true;
                }
            }
            if again {
                continue;
            }
            all.truncate(k);
            let mut out = EigenResult::default();
            let mut vectors = Vec::with_capacity(k);
            for (v, s, j) in all {
                let r = found[s].as_ref().unwrap();
                out.values.push(v);
                out.residuals.push(r.residuals[j]);
                vectors.push(r.vectors.as_ref().unwrap()[j].clone());
            }
            out.vectors = Some(vectors);
            return Ok(out);
        }
    }

    fn in_positive_orthant(&self, idx: usize) -> bool {
        let (m, half) = (self.grid.m, self.half());
        let mut rest = idx;
        (0..self.dim).all(|_| {
            let i = rest % m;
            rest /= m;
            i >= half
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Lambda};
    use crate::systems::LsqConvention;

    fn ham(family: Family, lam: Lambda, m: usize) -> CartesianHamiltonian {
        let spec = SystemSpec::new(family, 2, lam, LsqConvention::Half).unwrap();
        cartesian_hamiltonian(&spec, GridSpec::cartesian(m, 6.0).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_action() {
        let hm = ham(Family::Oscillator, Lambda::Value(rat(1, 10)), 16);
        let n = hm.size();
        let basis = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        let mut hi = vec![0.0; n];
        let mut hj = vec![0.0; n];
        for i in (0..n).step_by(7) {
            hm.apply(&basis(i), &mut hi);
            for j in (0..n).step_by(5) {
                hm.apply(&basis(j), &mut hj);
                assert!((hi[j] - hj[i]).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn inverse_distance_average_matches_quadrature() {
        let mid = |lo: &[f64], hi: &[f64], n: usize| {
            let d = lo.len();
            let mut acc = 0.0;
            for c in 0..n.pow(d as u32) {
                let mut r2 = 0.0;
                let mut rest = c;
                for a in 0..d {
                    let t = (rest % n) as f64 + 0.5;
                    rest /= n;
                    let x = lo[a] + t * (hi[a] - lo[a]) / n as f64;
                    r2 += x * x;
                }
                acc += 1.0 / r2.sqrt();
            }
            acc / n.pow(d as u32) as f64
        };
        for (lo, hi) in [
            (vec![0.5, 1.0], vec![1.5, 1.25]),
            (vec![-2.0, 0.3], vec![-1.0, 0.9]),
            (vec![0.4, -1.0, 0.2], vec![1.0, -0.5, 0.7]),
        ] {
            let exact = inverse_distance_average(&lo, &hi);
            assert!((exact - mid(&lo, &hi, 200)).abs() < 1e-5, "{lo:?}");
        }
        // Corner at the origin: 2 asinh(1) on the unit square.
        assert!((inverse_distance_average(&[0.0, 0.0], &[1.0, 1.0]) - 2.0 * 1f64.asinh()).abs() < 1e-14);
    }

    #[test]
    fn symbolic_lambda_rejected() {
        let spec = SystemSpec::new(Family::Coulomb, 2, Lambda::Symbolic, LsqConvention::Half).unwrap();
        let g = GridSpec::cartesian(16, 5.0).unwrap();
        assert!(matches!(cartesian_hamiltonian(&spec, g), Err(NumericsError::SymbolicLambda)));
    }
}
