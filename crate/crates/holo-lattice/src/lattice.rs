use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::LatticeBasis;
use crate::{fingerprint_f64s, GeometryError};

/// Cell coordinates within this distance of an integer snap to it, so that
/// reduction is idempotent in floating point.
const SNAP: f64 = 1e-13;

pub fn complex_to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn real_to_complex(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

/// A lattice `Λ ⊂ Cⁿ` of rank `2n`.
#[derive(Debug, Clone)]
pub struct Lattice {
    n: usize,
    basis: LatticeBasis,
    dual: LatticeBasis,
    covolume: f64,
    shortest: f64,
    diameter: f64,
    /// Lattice vectors up to norm `diameter`, sorted by norm.
    shell: Vec<(f64, Vec<f64>)>,
}

/// Serializable description: `2n × 2n` row-major matrix of basis rows.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(transparent)]
pub struct LatticeSpec(pub Vec<Vec<f64>>);

impl Lattice {
    /// Builds a lattice from `2n` basis rows, each in real coordinates.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        let d = rows.len();
        if d == 0 || d % 2 != 0 || rows.iter().any(|r| r.len() != d) {
            return Err(GeometryError::Shape { rows: d, cols: rows.first().map_or(0, Vec::len) });
        }
        let basis = LatticeBasis::new(rows)?;
        let dual = basis.dual();
        let shortest = basis.shortest_vector_norm();
        let diameter = basis.cell_diameter();
        let shell = basis
            .vectors_within(diameter * (1.0 + 1e-12))
            .into_iter()
            .map(|v| (v.iter().map(|x| x * x).sum::<f64>().sqrt(), v))
            .collect();
        Ok(Self { n: d / 2, covolume: basis.det_abs(), basis, dual, shortest, diameter, shell })
    }

    /// Builds a lattice from `2n` complex basis vectors.
    pub fn from_complex(vectors: &[Vec<Complex64>]) -> Result<Self, GeometryError> {
        Self::new(vectors.iter().map(|v| complex_to_real(v)).collect())
    }

    /// `Zⁿ + iZⁿ` scaled by `scale`.
    pub fn square(n: usize, scale: f64) -> Self {
        let d = 2 * n;
        let rows = (0..d).map(|i| (0..d).map(|j| if i == j { scale } else { 0.0 }).collect()).collect();
        Self::new(rows).expect("scaled identity is a valid basis")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    /// Dual lattice `{μ : ⟨μ, λ⟩ ∈ 2πZ}` in the same real coordinates.
    pub fn dual(&self) -> &LatticeBasis {
        &self.dual
    }

    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    pub fn shortest_vector(&self) -> f64 {
        self.shortest
    }

    pub fn cell_diameter(&self) -> f64 {
        self.diameter
    }

    pub fn injectivity_radius(&self) -> f64 {
        0.5 * self.shortest
    }

    pub fn spec(&self) -> LatticeSpec {
        LatticeSpec(self.basis.rows().to_vec())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.basis.rows().iter().map(|r| r.iter().map(|x| s * x).collect()).collect())
            .expect("nonzero rescaling keeps the basis valid")
    }

    pub fn fingerprint(&self) -> String {
        let flat: Vec<f64> = self.basis.rows().iter().flatten().copied().collect();
        fingerprint_f64s("lattice/v1", &flat)
    }

    fn check_dim(&self, len: usize) -> Result<(), GeometryError> {
        if len != self.real_dim() {
            return Err(GeometryError::Dimension { expected: self.real_dim(), got: len });
        }
        Ok(())
    }

    /// Reduces real coordinates to the half-open cell `Σ cᵢbᵢ, cᵢ ∈ [0, 1)`.
    pub fn reduce_real(&self, x: &[f64]) -> Vec<f64> {
        let c: Vec<f64> = self.basis.cell_coords(x).into_iter().map(frac_snapped).collect();
        self.basis.from_cell(&c)
    }

    /// Reduces to the centred cell `cᵢ ∈ [−½, ½)`.
    pub fn reduce_centered(&self, x: &[f64]) -> Vec<f64> {
        let c: Vec<f64> = self
            .basis
            .cell_coords(x)
            .into_iter()
            .map(|c| {
                let f = frac_snapped(c + 0.5) - 0.5;
                if f.abs() < SNAP {
                    0.0
                } else {
                    f
                }
            })
            .collect();
        self.basis.from_cell(&c)
    }

    pub fn reduce(&self, z: &[Complex64]) -> Result<TorusPoint, GeometryError> {
        self.check_dim(2 * z.len())?;
        Ok(TorusPoint { rep: real_to_complex(&self.reduce_real(&complex_to_real(z))) })
    }

    /// Squared flat distance between the classes of `x` and `y` (real coordinates).
    pub fn distance_squared_real(&self, x: &[f64], y: &[f64]) -> f64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.min_image_norm2(&diff)
    }

    /// `min_λ |d − λ|²`. The search covers `|λ| ≤ diameter + |d|` after a
    /// centred reduction of `d`, and stops once `|λ| − |d|` exceeds the best
    /// distance found.
    pub fn min_image_norm2(&self, d: &[f64]) -> f64 {
        let d = self.reduce_centered(d);
        let dn = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut best = dn * dn;
        for (norm, lam) in &self.shell {
            let lower = norm - dn;
            if lower > 0.0 && lower * lower > best {
                break;
            }
            if *norm > self.diameter + dn {
                break;
            }
            let s: f64 = d.iter().zip(lam).map(|(a, b)| (a - b) * (a - b)).sum();
            if s < best {
                best = s;
            }
        }
        best
    }

    /// Representative of `d` modulo `Λ` of minimal norm.
    pub fn min_image(&self, d: &[f64]) -> Vec<f64> {
        let d = self.reduce_centered(d);
        let dn = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut best = dn * dn;
        let mut arg = d.clone();
        for (norm, lam) in &self.shell {
            let lower = norm - dn;
            if lower > 0.0 && lower * lower > best {
                break;
            }
            let s: f64 = d.iter().zip(lam).map(|(a, b)| (a - b) * (a - b)).sum();
            if s < best {
                best = s;
                arg = d.iter().zip(lam).map(|(a, b)| a - b).collect();
            }
        }
        arg
    }

    pub fn distance_squared(&self, z: &TorusPoint, w: &TorusPoint) -> f64 {
        self.distance_squared_real(&complex_to_real(&z.rep), &complex_to_real(&w.rep))
    }
}

fn frac_snapped(c: f64) -> f64 {
    let r = c.round();
    if (c - r).abs() < SNAP {
        return 0.0;
    }
    let f = c - c.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// A point of `Cⁿ/Λ` held by its representative in the fundamental cell.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    pub rep: Vec<Complex64>,
}

impl TorusPoint {
    pub fn real(&self) -> Vec<f64> {
        complex_to_real(&self.rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn reduce_examples() {
        let l = Lattice::square(1, 1.0);
        let p = l.reduce(&[c(1.25, 0.5)]).unwrap();
        assert_abs_diff_eq!(p.rep[0].re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p.rep[0].im, 0.5, epsilon = 1e-15);
        assert_eq!(l.reduce(&[c(0.0, 0.0)]).unwrap().rep[0], c(0.0, 0.0));
        assert_eq!(l.reduce(&[c(3.0, 4.0)]).unwrap().rep[0], c(0.0, 0.0));
    }

    #[test]
    fn distance_examples() {
        let l = Lattice::square(1, 1.0);
        let z = l.reduce(&[c(0.5, 0.5)]).unwrap();
        let o = l.reduce(&[c(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(l.distance_squared(&z, &o), 0.5, epsilon = 1e-15);
        let z = l.reduce(&[c(0.9, 0.0)]).unwrap();
        assert_abs_diff_eq!(l.distance_squared(&z, &o), 0.01, epsilon = 1e-15);
        assert_eq!(l.distance_squared(&z, &z), 0.0);
    }

    #[test]
    fn injectivity_radius_examples() {
        assert_abs_diff_eq!(Lattice::square(1, 1.0).injectivity_radius(), 0.5, epsilon = 1e-15);
        let l = Lattice::new(vec![vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_abs_diff_eq!(l.injectivity_radius(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(l.scaled(2.0).injectivity_radius(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn covolume_and_dual_pairing() {
        let l = Lattice::new(vec![
            vec![1.0, 0.0, 0.2, 0.1],
            vec![0.3, 1.1, 0.0, 0.0],
            vec![0.0, 0.1, 0.9, 0.0],
            vec![0.1, 0.0, 0.4, 1.3],
        ])
        .unwrap();
        let b = l.basis().rows();
        let d = l.dual().rows();
        for (i, bi) in b.iter().enumerate() {
            for (j, dj) in d.iter().enumerate() {
                let p: f64 = bi.iter().zip(dj).map(|(x, y)| x * y).sum();
                let want = if i == j { 2.0 * std::f64::consts::PI } else { 0.0 };
                assert_abs_diff_eq!(p, want, epsilon = 1e-12);
            }
        }
        let det = nalgebra::DMatrix::from_fn(4, 4, |i, j| b[i][j]).determinant().abs();
        assert_abs_diff_eq!(l.covolume(), det, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(Lattice::new(vec![vec![1.0]]), Err(GeometryError::Shape { .. })));
        assert!(matches!(
            Lattice::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(GeometryError::Singular(_))
        ));
        let l = Lattice::square(2, 1.0);
        assert!(l.reduce(&[c(0.1, 0.1)]).is_err());
    }

    #[test]
    fn skewed_lattice_minimum_matches_brute_force() {
        let l = Lattice::new(vec![vec![1.0, 0.0], vec![0.93, 0.21]]).unwrap();
        let pts = [[0.37, 0.11], [0.8, 0.05], [-2.3, 0.7], [0.5, 0.5]];
        for p in pts {
            let mut best = f64::INFINITY;
            for a in -40i32..=40 {
                for b in -40i32..=40 {
                    let lx = a as f64 + 0.93 * b as f64;
                    let ly = 0.21 * b as f64;
                    best = best.min((p[0] - lx).powi(2) + (p[1] - ly).powi(2));
                }
            }
            assert_abs_diff_eq!(l.min_image_norm2(&p), best, epsilon = 1e-13);
            let m = l.min_image(&p);
            assert_abs_diff_eq!(m.iter().map(|x| x * x).sum::<f64>(), best, epsilon = 1e-13);
        }
    }
}
