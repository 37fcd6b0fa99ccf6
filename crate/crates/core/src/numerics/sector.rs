//! Rotation-sector labels for grid eigenvectors.
//!
//! Eigenvectors are grouped into energy clusters. Inside a cluster `L12^2`
//! is diagonalized first, then `L12` within each block of equal `|m|`. The
//! rms weight `sqrt(<L12^2>)` survives when a `+-m` pair is split into two
//! real standing waves that land in different clusters or parity sectors,
//! where `<L12>` is zero.

use nalgebra::{Complex, DMatrix};

use super::dot;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorEstimate {
    /// `<H>` of the combination: the cluster members' energies weighted by
    /// their share in it.
    pub energy: f64,
    /// Index of the energy cluster.
    pub cluster: usize,
    /// `<L12>` after diagonalizing within the cluster.
    pub m: f64,
    /// `sqrt(<L12^2>)` for the same combination.
    pub m_abs: f64,
    /// `sign(m) * round(m_abs)`.
    pub m_est: i64,
    /// `|m_abs - round(m_abs)|`.
    pub confidence: f64,
    /// `|m|` and `m_abs` disagree: a split or mixed standing wave.
    pub mixed: bool,
}

/// Groups ascending energies: a gap larger than `tol` starts a new cluster.
pub fn cluster_energies(energies: &[f64], tol: f64) -> Vec<usize> {
    let mut out = Vec::with_capacity(energies.len());
    let mut c = 0;
    for (i, e) in energies.iter().enumerate() {
        if i > 0 && e - energies[i - 1] > tol {
            c += 1;
        }
        out.push(c);
    }
    out
}

/// Classifies unit vectors by their `L12` weight. `apply_b` computes
/// `B12 u` where `L12 = -i B12` and `B12` is real antisymmetric.
///
/// Panics on a zero vector.
pub fn sector_classify<F>(energies: &[f64], vectors: &[Vec<f64>], apply_b: F, cluster_tol: f64) -> Vec<SectorEstimate>
where
    F: Fn(&[f64], &mut [f64]),
{
    assert_eq!(energies.len(), vectors.len());
    for v in vectors {
        assert!(dot(v, v) > 0.0, "zero vector has no sector");
    }
    let labels = cluster_energies(energies, cluster_tol);
    let images: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            let mut o = vec![0.0; v.len()];
            apply_b(v, &mut o);
            o
        })
        .collect();
    let mut out = Vec::with_capacity(vectors.len());
    let mut start = 0;
    while start < vectors.len() {
        let end = labels[start..].iter().position(|&l| l != labels[start]).map_or(vectors.len(), |p| start + p);
        let n = end - start;
        // <v_a, L12^2 v_b> = <B v_a, B v_b> fixes |m| even when the cluster
        // holds only one real standing wave of each pair (then <L12> = 0).
        // Inside each |m| block, <v_a, L12 v_b> = -i <v_a, B v_b> fixes the sign.
        let sq = DMatrix::from_fn(n, n, |a, b| dot(&images[start + a], &images[start + b]));
        let sq = (&sq + sq.transpose()) * 0.5;
        let outer = sq.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| outer.eigenvalues[a].total_cmp(&outer.eigenvalues[b]));
        let rms = |c: usize| outer.eigenvalues[c].max(0.0).sqrt();
        let mut local: Vec<SectorEstimate> = Vec::with_capacity(n);
        let mut g = 0;
        while g < n {
            let mut h = g + 1;
            while h < n && (rms(order[h]) - rms(order[g])).abs() < 0.5 {
                h += 1;
            }
            // Rotated vectors and their images for this block.
            let block: Vec<(Vec<f64>, Vec<f64>)> = order[g..h]
                .iter()
                .map(|&c| {
                    let col = outer.eigenvectors.column(c);
                    let mix = |src: &[Vec<f64>]| {
                        let mut v = vec![0.0; src[0].len()];
                        for (i, s) in src.iter().enumerate() {
                            v.iter_mut().zip(s).for_each(|(x, y)| *x += col[i] * y);
                        }
                        v
                    };
                    (mix(&vectors[start..end]), mix(&images[start..end]))
                })
                .collect();
            let k = block.len();
            let l12 = DMatrix::from_fn(k, k, |a, b| Complex::new(0.0, -dot(&block[a].0, &block[b].1)));
            let l12 = (&l12 + l12.adjoint()) * Complex::new(0.5, 0.0);
            let gram = DMatrix::from_fn(k, k, |a, b| Complex::new(dot(&block[a].1, &block[b].1), 0.0));
            let eig = l12.symmetric_eigen();
            for c in 0..k {
                let col = eig.eigenvectors.column(c);
                let m = eig.eigenvalues[c];
                let m_abs = (col.adjoint() * &gram * col)[(0, 0)].re.max(0.0).sqrt();
                // Weight of each original eigenvector in this combination.
                let energy: f64 = (0..n)
                    .map(|i| {
                        let amp: Complex<f64> = order[g..h]
                            .iter()
                            .enumerate()
                            .map(|(j, &oc)| col[j] * outer.eigenvectors[(i, oc)])
                            .sum();
                        amp.norm_sqr() * energies[start + i]
                    })
                    .sum();
                let rounded = m_abs.round();
                let sign = if m < -0.5 { -1 } else { 1 };
                local.push(SectorEstimate {
                    energy,
                    cluster: labels[start],
                    m,
                    m_abs,
                    m_est: sign * rounded as i64,
                    confidence: (m_abs - rounded).abs(),
                    mixed: (m.abs() - m_abs).abs() > 0.5,
                });
            }
            g = h;
        }
        local.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.m.total_cmp(&b.m)));
        out.extend(local);
        start = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_split_on_gaps() {
        assert_eq!(cluster_energies(&[1.0, 1.0001, 2.0, 2.0, 3.5], 1e-3), vec![0, 0, 1, 1, 2]);
    }

    #[test]
    fn rotation_pair_on_a_ring() {
        // Two real standing waves cos(theta), sin(theta) on a discrete ring
        // where B acts as d/dtheta.
        let n = 64;
        let th: Vec<f64> = (0..n).map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64).collect();
        let norm = (n as f64 / 2.0).sqrt();
        let c: Vec<f64> = th.iter().map(|t| t.cos() / norm).collect();
        let s: Vec<f64> = th.iter().map(|t| t.sin() / norm).collect();
        let deriv = |u: &[f64], o: &mut [f64]| {
            let h = 2.0 * std::f64::consts::PI / n as f64;
            for j in 0..n {
                o[j] = (u[(j + 1) % n] - u[(j + n - 1) % n]) / (2.0 * h);
            }
        };
        let est = sector_classify(&[1.0, 1.0], &[c, s], deriv, 1e-6);
        let ms: Vec<i64> = est.iter().map(|e| e.m_est).collect();
        assert_eq!(ms, vec![-1, 1]);
        assert!(est.iter().all(|e| e.confidence < 1e-2 && !e.mixed));
    }
}
