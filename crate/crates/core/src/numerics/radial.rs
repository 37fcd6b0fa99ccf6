//! Reduction of a rotation-invariant Hamiltonian to one angular sector and its
//! finite-volume discretization.

use crate::algebra::{rat, GaussianRational, InvariantForm, Lambda, RadialCoefficient};

use super::tridiag::{inverse_iteration, tridiagonal_apply, tridiagonal_eigen};
use super::{norm, EigenResult, GridSpec, NumericsError};

/// `H u = -gamma u'' + beta u' + potential u` on the sector with
/// `L^2 = ell (ell + N - 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadialOperator {
    pub dim: usize,
    pub ell: u32,
    pub lambda: Lambda,
    pub gamma: RadialCoefficient,
    pub beta: RadialCoefficient,
    pub potential: RadialCoefficient,
}

/// Substitutes `p^2 -> -(d^2 + (N-1)/r d - ell(ell+N-2)/r^2)`, `x.p -> -i r d`
/// and `L^2 -> ell(ell+N-2)`, then checks exactly that the result is the
/// Sturm-Liouville operator `-w^-1 (gamma w u')' + potential u`,
/// `w = r^(N-1)`, with real coefficients.
pub fn radialize(inv: &InvariantForm, ell: i64) -> Result<RadialOperator, NumericsError> {
    if ell < 0 {
        return Err(NumericsError::NegativeSector(ell));
    }
    let lam = inv.ctx.lambda.clone();
    let n = inv.ctx.dim as i64;
    let casimir = GaussianRational::from_int(ell * (ell + n - 2));

    let gamma = inv.c_psq.clone().normalized(&lam);
    let beta = gamma
        .scale(&GaussianRational::from_int(-(n - 1)))
        .shift_r(-1)
        .add(&inv.c_d.scale(&GaussianRational::new(rat(0, 1), rat(-1, 1))).shift_r(1))
        .normalized(&lam);
    let potential = gamma
        .shift_r(-2)
        .scale(&casimir)
        .add(&inv.c_lsq.scale(&casimir))
        .add(&inv.c_1)
        .normalized(&lam);

    for (name, c) in [("gamma", &gamma), ("potential", &potential)] {
        if c.conj() != *c {
            return Err(NumericsError::HermiticityCheckFailed(format!("{name} = {c} is not real")));
        }
    }
    let sturm = gamma
        .deriv_r(&lam)
        .neg()
        .sub(&gamma.scale(&GaussianRational::from_int(n - 1)).shift_r(-1))
        .normalized(&lam);
    let mismatch = beta.sub(&sturm).normalized(&lam);
    if !mismatch.is_zero() {
        return Err(NumericsError::HermiticityCheckFailed(format!(
            "first-derivative coefficient {beta} differs from -gamma' - (N-1) gamma / r = {sturm}"
        )));
    }
    Ok(RadialOperator {
        dim: inv.ctx.dim,
        ell: ell as u32,
        lambda: lam,
        gamma,
        beta,
        potential,
    })
}

impl RadialOperator {
    fn lam(&self) -> Result<f64, NumericsError> {
        self.lambda.as_f64().ok_or(NumericsError::SymbolicLambda)
    }

    pub fn gamma_at(&self, r: f64) -> Result<f64, NumericsError> {
        Ok(self.gamma.eval(self.lam()?, r).re)
    }

    pub fn potential_at(&self, r: f64) -> Result<f64, NumericsError> {
        Ok(self.potential.eval(self.lam()?, r).re)
    }

    /// Diagonal and off-diagonal of the symmetrized discretization on the
    /// uniform offset grid:
    /// `diag_j = (P_{j+1/2} + P_{j-1/2}) / (h^2 w_j) + U_j`,
    /// `off_j = -P_{j+1/2} / (h^2 sqrt(w_j w_{j+1}))`, `P = gamma w`.
    pub fn tridiagonal(&self, grid: &GridSpec) -> Result<(Vec<f64>, Vec<f64>), NumericsError> {
        let faces: Vec<f64> = (0..=grid.m).map(|k| grid.origin + k as f64 * grid.h()).collect();
        self.tridiagonal_on(&faces)
    }

    /// Finite-volume discretization on cells `[faces[j], faces[j+1]]` with
    /// centres at the midpoints; `u = 0` one cell beyond the last face.
    /// Fluxes `P_f (u_{j+1} - u_j) / (r_{j+1} - r_j)`, cell mass `w_j dr_j`;
    /// on a uniform grid this is exactly [`Self::tridiagonal`].
    pub fn tridiagonal_on(&self, faces: &[f64]) -> Result<(Vec<f64>, Vec<f64>), NumericsError> {
        let lam = self.lam()?;
        if faces.len() < 2 || faces[0] < 0.0 || faces.windows(2).any(|f| f[1] <= f[0]) {
            return Err(NumericsError::Grid("faces must be increasing and non-negative".into()));
        }
        let m = faces.len() - 1;
        let pw = (self.dim - 1) as i32;
        let w = |r: f64| r.powi(pw);
        let flux = |r: f64| {
            if r == 0.0 {
                0.0
            } else {
                self.gamma.eval(lam, r).re * w(r)
            }
        };
        let centre = |j: usize| 0.5 * (faces[j] + faces[j + 1]);
        // Ghost centre mirrors the last cell.
        let next = |j: usize| if j + 1 < m { centre(j + 1) } else { 2.0 * faces[m] - centre(j) };
        let mass: Vec<f64> = (0..m).map(|j| w(centre(j)) * (faces[j + 1] - faces[j])).collect();
        let mut diag = Vec::with_capacity(m);
        let mut off = Vec::with_capacity(m.saturating_sub(1));
        for j in 0..m {
            let r = centre(j);
            let g = self.gamma.eval(lam, r).re;
            if g <= 0.0 {
                return Err(NumericsError::Grid(format!("gamma({r}) = {g} is not positive")));
            }
            let lo = if j > 0 {
                flux(faces[j]) / (r - centre(j - 1))
            } else {
                // Zero flux at r = 0, Dirichlet at an inner face r > 0.
                flux(faces[0]) / (2.0 * (r - faces[0]))
            };
            let hi = flux(faces[j + 1]) / (next(j) - r);
            diag.push((lo + hi) / mass[j] + self.potential.eval(lam, r).re);
            if j + 1 < m {
                off.push(-hi / (mass[j] * mass[j + 1]).sqrt());
            }
        }
        Ok((diag, off))
    }
}

/// Faces `a (e^t - 1)` for `t` uniform, reaching `r_max`: fine cells near the
/// origin, geometrically growing cells outside.
pub fn stretched_faces(m: usize, r_max: f64, a: f64) -> Vec<f64> {
    let t_max = (1.0 + r_max / a).ln();
    (0..=m).map(|k| a * ((t_max * k as f64 / m as f64).exp() - 1.0)).collect()
}

/// Lowest `k` eigenvalues (and optionally vectors) of the radial operator.
pub fn radial_eigen(op: &RadialOperator, grid: &GridSpec, k: usize, vectors: bool) -> Result<EigenResult, NumericsError> {
    if k == 0 {
        return Ok(EigenResult::default());
    }
    if k > grid.m / 4 {
        return Err(NumericsError::TooManyEigenvalues { k, dim: grid.m });
    }
    let (d, e) = op.tridiagonal(grid)?;
    eigen_lowest(&d, &e, k, vectors)
}

/// Lowest `k` eigenpairs on an arbitrary face set (see [`RadialOperator::tridiagonal_on`]).
pub fn radial_eigen_on(op: &RadialOperator, faces: &[f64], k: usize, vectors: bool) -> Result<EigenResult, NumericsError> {
    if k == 0 {
        return Ok(EigenResult::default());
    }
    let (d, e) = op.tridiagonal_on(faces)?;
    if k > d.len() / 4 {
        return Err(NumericsError::TooManyEigenvalues { k, dim: d.len() });
    }
    eigen_lowest(&d, &e, k, vectors)
}

fn eigen_lowest(d: &[f64], e: &[f64], k: usize, vectors: bool) -> Result<EigenResult, NumericsError> {
    let (d, e) = (d.to_vec(), e.to_vec());
    let (all, _) = tridiagonal_eigen(&d, &e, false)?;
    let values: Vec<f64> = all.into_iter().take(k).collect();
    let vecs: Vec<Vec<f64>> = values
        .iter()
        .enumerate()
        .map(|(i, &t)| inverse_iteration(&d, &e, t, i as u64))
        .collect();
    let residuals = vecs
        .iter()
        .zip(&values)
        .map(|(v, &t)| {
            let tv = tridiagonal_apply(&d, &e, v);
            norm(&tv.iter().zip(v).map(|(a, b)| a - t * b).collect::<Vec<_>>())
        })
        .collect();
    Ok(EigenResult {
        values,
        vectors: vectors.then_some(vecs),
        residuals,
        sectors: None,
    })
}
