use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::sphere_area;

/// Truncation and solver settings shared by every minimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    /// Half-length of the `s` interval.
    pub l: f64,
    pub n_s: usize,
    /// Angular points; `1` is the radial problem.
    pub n_xi: usize,
    /// Target Euler–Lagrange residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            l: 20.0,
            n_s: 801,
            n_xi: 65,
            tol: 1e-8,
            max_iter: 20_000,
        }
    }
}

impl GridSpec {
    pub fn radial(self) -> Self {
        Self { n_xi: 1, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::Grid(format!("L = {}", self.l)));
        }
        if self.n_s < 5 {
            return Err(Error::Grid(format!("n_s = {} is too small", self.n_s)));
        }
        if self.n_xi == 0 {
            return Err(Error::Grid("n_xi = 0".into()));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Grid(format!("tol = {}, max_iter = {}", self.tol, self.max_iter)));
        }
        Ok(())
    }

    pub fn h_s(&self) -> f64 {
        2.0 * self.l / (self.n_s - 1) as f64
    }
}

/// Quadrature data for one `(d, grid)` pair.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub d: i32,
    pub n_s: usize,
    pub n_xi: usize,
    pub h: f64,
    pub l: f64,
    pub xi: Vec<f64>,
    /// Angular weights, summing to `|S^{d-1}|`.
    pub w: Vec<f64>,
    /// Angular stiffness per face between `j` and `j + 1` (wrapping when periodic).
    pub face: Vec<f64>,
    pub periodic: bool,
}

impl Geometry {
    pub fn new(d: i32, grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        if d < 2 {
            return Err(crate::error::ParamError::Dimension(d).into());
        }
        let n = grid.n_xi;
        let area = sphere_area(d);
        let (xi, w, face, periodic) = if n == 1 {
            (vec![0.0], vec![area], vec![], false)
        } else if d == 2 {
            let dxi = 2.0 * PI / n as f64;
            let xi = (0..n).map(|j| j as f64 * dxi).collect();
            (xi, vec![dxi; n], vec![1.0 / dxi; n], true)
        } else {
            let dxi = PI / n as f64;
            let k = f64::from(d - 2);
            let xi: Vec<f64> = (0..n).map(|j| (j as f64 + 0.5) * dxi).collect();
            let raw: Vec<f64> = xi.iter().map(|x| x.sin().powf(k) * dxi).collect();
            let c = area / raw.iter().sum::<f64>();
            let w = raw.iter().map(|x| c * x).collect();
            let face = (1..n).map(|j| c * (j as f64 * dxi).sin().powf(k) / dxi).collect();
            (xi, w, face, false)
        };
        Ok(Self {
            d,
            n_s: grid.n_s,
            n_xi: n,
            h: grid.h_s(),
            l: grid.l,
            xi,
            w,
            face,
            periodic,
        })
    }

    pub fn len(&self) -> usize {
        self.n_s * self.n_xi
    }

    pub fn s(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.h
    }

    /// Mass weight of node `k = i · n_xi + j`.
    pub fn mass(&self, k: usize) -> f64 {
        self.h * self.w[k % self.n_xi]
    }

    /// `(j, j + 1, stiffness)` for every angular face.
    pub(crate) fn faces(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.face
            .iter()
            .enumerate()
            .map(move |(j, &c)| (j, (j + 1) % self.n_xi, c))
    }

    /// `vᵀKv`, the discrete Dirichlet energy with zero values beyond `±L`.
    pub fn dirichlet(&self, v: &[f64]) -> f64 {
        let (ns, nx, h) = (self.n_s, self.n_xi, self.h);
        let mut g = 0.0;
        for j in 0..nx {
            let mut acc = v[j] * v[j];
            for i in 1..ns {
                let dv = v[i * nx + j] - v[(i - 1) * nx + j];
                acc += dv * dv;
            }
            acc += v[(ns - 1) * nx + j].powi(2);
            g += self.w[j] * acc / h;
        }
        for i in 0..ns {
            let row = &v[i * nx..(i + 1) * nx];
            for (a, b, c) in self.faces() {
                g += h * c * (row[b] - row[a]).powi(2);
            }
        }
        g
    }

    /// `Kv`.
    pub fn apply_k(&self, v: &[f64], out: &mut [f64]) {
        let (ns, nx, h) = (self.n_s, self.n_xi, self.h);
        for i in 0..ns {
            for j in 0..nx {
                let k = i * nx + j;
                let up = if i + 1 < ns { v[k + nx] } else { 0.0 };
                let dn = if i > 0 { v[k - nx] } else { 0.0 };
                out[k] = self.w[j] / h * (2.0 * v[k] - up - dn);
            }
            let row = &v[i * nx..(i + 1) * nx];
            for (a, b, c) in self.faces() {
                let f = h * c * (row[a] - row[b]);
                out[i * nx + a] += f;
                out[i * nx + b] -= f;
            }
        }
    }

    pub fn mass_norm_sq(&self, v: &[f64]) -> f64 {
        v.iter().enumerate().map(|(k, x)| self.mass(k) * x * x).sum()
    }
}

/// A sampled field `v(s_i, ξ_j)`, stored row-major in `s`.
///
/// The sampled `s` nodes are `s_i = -L + i h`; the functionals treat `v` as
/// zero one step beyond both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderField {
    pub d: i32,
    pub l: f64,
    pub n_s: usize,
    pub n_xi: usize,
    pub values: Vec<f64>,
}

impl CylinderField {
    pub fn zeros(d: i32, grid: &GridSpec) -> Self {
        Self {
            d,
            l: grid.l,
            n_s: grid.n_s,
            n_xi: grid.n_xi,
            values: vec![0.0; grid.n_s * grid.n_xi],
        }
    }

    /// Sample `f(s, ξ)` on the grid.
    pub fn from_fn(d: i32, grid: &GridSpec, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let geo = Geometry::new(d, grid)?;
        let mut out = Self::zeros(d, grid);
        for i in 0..geo.n_s {
            for j in 0..geo.n_xi {
                out.values[i * geo.n_xi + j] = f(geo.s(i), geo.xi[j]);
            }
        }
        Ok(out)
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec {
            l: self.l,
            n_s: self.n_s,
            n_xi: self.n_xi,
            ..GridSpec::default()
        }
    }

    pub fn geometry(&self) -> Result<Geometry> {
        if self.values.len() != self.n_s * self.n_xi {
            return Err(Error::Grid(format!(
                "{} values for a {} × {} grid",
                self.values.len(),
                self.n_s,
                self.n_xi
            )));
        }
        Geometry::new(self.d, &self.grid())
    }

    /// Copy a radial field to every angle of an `n_xi`-point grid.
    pub fn lift(&self, n_xi: usize) -> Self {
        assert_eq!(self.n_xi, 1, "lift expects a radial field");
        let values = self
            .values
            .iter()
            .flat_map(|&v| std::iter::repeat(v).take(n_xi))
            .collect();
        Self {
            n_xi,
            values,
            ..self.clone()
        }
    }

    /// Weighted `ξ`-average, one value per `s` node.
    pub fn angular_mean(&self) -> Result<Vec<f64>> {
        let geo = self.geometry()?;
        let area: f64 = geo.w.iter().sum();
        Ok(self
            .values
            .chunks(self.n_xi)
            .map(|row| row.iter().zip(&geo.w).map(|(v, w)| v * w).sum::<f64>() / area)
            .collect())
    }

    /// `‖v - v̄‖₂ / ‖v‖₂` with `v̄` the angular mean.
    pub fn anisotropy(&self) -> Result<f64> {
        let geo = self.geometry()?;
        let mean = self.angular_mean()?;
        let mut diff = self.values.clone();
        for (k, x) in diff.iter_mut().enumerate() {
            *x -= mean[k / self.n_xi];
        }
        Ok((geo.mass_norm_sq(&diff) / geo.mass_norm_sq(&self.values)).sqrt())
    }

    /// `max |v|` on the two end rows relative to `max |v|`.
    pub fn boundary_ratio(&self) -> f64 {
        let max = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let n = self.values.len();
        let edge = self.values[..self.n_xi]
            .iter()
            .chain(&self.values[n - self.n_xi..])
            .fold(0.0f64, |m, v| m.max(v.abs()));
        edge / max
    }

    /// Samples as `s,xi,value` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let geo = self
            .geometry()
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))?;
        writeln!(w, "s,xi,value")?;
        for i in 0..self.n_s {
            for j in 0..self.n_xi {
                let v = self.values[i * self.n_xi + j];
                writeln!(w, "{:.16e},{:.16e},{v:.16e}", geo.s(i), geo.xi[j])?;
            }
        }
        Ok(())
    }
}
