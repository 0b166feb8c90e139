use nalgebra::DMatrix;

use crate::GeometryError;

/// A full-rank lattice in `R^d` given by basis rows, with the inverse map
/// to cell coordinates and the enumeration helpers the kernels need.
#[derive(Debug, Clone)]
pub struct LatticeBasis {
    dim: usize,
    rows: Vec<Vec<f64>>,
    /// `(Bᵀ)⁻¹`, mapping a point to its coefficients in the basis.
    to_cell: Vec<Vec<f64>>,
    det_abs: f64,
}

impl LatticeBasis {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(GeometryError::Shape { rows: dim, cols: rows.first().map_or(0, Vec::len) });
        }
        let b = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
        let det = b.determinant();
        let scale: f64 = rows.iter().map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt()).product();
        if det.abs() <= 1e-12 * scale.max(1e-300) {
            return Err(GeometryError::Singular(det.abs()));
        }
        let bt_inv = b.transpose().try_inverse().ok_or(GeometryError::Singular(det.abs()))?;
        let to_cell = (0..dim).map(|i| (0..dim).map(|j| bt_inv[(i, j)]).collect()).collect();
        Ok(Self { dim, rows, to_cell, det_abs: det.abs() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    pub fn cell_coords(&self, x: &[f64]) -> Vec<f64> {
        self.to_cell.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn from_cell(&self, c: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for (ci, row) in c.iter().zip(&self.rows) {
            for (xj, bj) in x.iter_mut().zip(row) {
                *xj += ci * bj;
            }
        }
        x
    }

    /// Rows of the dual basis scaled so that `⟨bᵢ, dⱼ⟩ = 2π δᵢⱼ`.
    pub fn dual(&self) -> LatticeBasis {
        let two_pi = 2.0 * std::f64::consts::PI;
        let rows: Vec<Vec<f64>> =
            self.to_cell.iter().map(|r| r.iter().map(|v| two_pi * v).collect()).collect();
        LatticeBasis::new(rows).expect("dual of a valid basis is valid")
    }

    /// Calls `f` with every lattice point `λ` such that `|center − λ| ≤ radius`.
    /// The traversal order is fixed by the coefficient box, so sums are
    /// reproducible.
    pub fn for_each_near(&self, center: &[f64], radius: f64, mut f: impl FnMut(&[f64])) {
        let c = self.cell_coords(center);
        let spans: Vec<f64> = self
            .to_cell
            .iter()
            .map(|r| radius * r.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();
        let lo: Vec<i64> = c.iter().zip(&spans).map(|(ci, s)| (ci - s).floor() as i64).collect();
        let hi: Vec<i64> = c.iter().zip(&spans).map(|(ci, s)| (ci + s).ceil() as i64).collect();
        let mut idx = lo.clone();
        let mut lam = vec![0.0; self.dim];
        let r2 = radius * radius;
        loop {
            for v in lam.iter_mut() {
                *v = 0.0;
            }
            for (k, &m) in idx.iter().enumerate() {
                if m != 0 {
                    let mf = m as f64;
                    for (l, b) in lam.iter_mut().zip(&self.rows[k]) {
                        *l += mf * b;
                    }
                }
            }
            let d2: f64 = lam.iter().zip(center).map(|(l, x)| (x - l) * (x - l)).sum();
            if d2 <= r2 {
                f(&lam);
            }
            let mut k = 0;
            loop {
                if k == self.dim {
                    return;
                }
                idx[k] += 1;
                if idx[k] <= hi[k] {
                    break;
                }
                idx[k] = lo[k];
                k += 1;
            }
        }
    }

    /// Lattice vectors of norm at most `radius`, sorted by norm (ties broken
    /// lexicographically).
    pub fn vectors_within(&self, radius: f64) -> Vec<Vec<f64>> {
        let origin = vec![0.0; self.dim];
        let mut out = Vec::new();
        self.for_each_near(&origin, radius, |l| out.push(l.to_vec()));
        out.sort_by(|a, b| {
            let na: f64 = a.iter().map(|x| x * x).sum();
            let nb: f64 = b.iter().map(|x| x * x).sum();
            na.total_cmp(&nb).then_with(|| {
                a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        out
    }

    pub fn shortest_vector_norm(&self) -> f64 {
        let r = self
            .rows
            .iter()
            .map(|row| row.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(f64::INFINITY, f64::min);
        self.vectors_within(r * (1.0 + 1e-12))
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .filter(|&n| n > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest distance between two points of the fundamental parallelepiped.
    pub fn cell_diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        let mut eps = vec![-1i32; self.dim];
        loop {
            let c: Vec<f64> = eps.iter().map(|&e| e as f64).collect();
            let v = self.from_cell(&c);
            best = best.max(v.iter().map(|x| x * x).sum::<f64>().sqrt());
            let mut k = 0;
            loop {
                if k == self.dim {
                    return best;
                }
                eps[k] += 1;
                if eps[k] <= 1 {
                    break;
                }
                eps[k] = -1;
                k += 1;
            }
        }
    }
}
