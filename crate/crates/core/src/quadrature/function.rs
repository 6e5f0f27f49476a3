use super::Grid;
use crate::error::{Error, Result};
use crate::special::recip_gamma;
use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function given by a closure, optionally with its derivative and its
/// value at the origin. `exponent` is the power p in f(t) = t^p·f₁(t) with
/// smooth f₁; it defaults to 0.
#[derive(Clone)]
pub struct TestFunction {
    f: RealFn,
    df: Option<RealFn>,
    f0: Option<f64>,
    exponent: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("has_derivative", &self.df.is_some())
            .field("value_at_zero", &self.f0)
            .field("exponent", &self.exponent)
            .finish()
    }
}

pub(crate) fn is_nonneg_integer(x: f64) -> bool {
    x > -1e-12 && (x - x.round()).abs() < 1e-12
}

impl TestFunction {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        TestFunction {
            f: Arc::new(f),
            df: None,
            f0: None,
            exponent: 0.0,
        }
    }

    pub fn with_derivative(mut self, df: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.df = Some(Arc::new(df));
        self
    }

    pub fn with_value_at_zero(mut self, v: f64) -> Self {
        self.f0 = Some(v);
        self
    }

    pub fn with_exponent(mut self, p: f64) -> Self {
        self.exponent = p;
        self
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
            .with_derivative(|_| 0.0)
            .with_value_at_zero(c)
    }

    /// f(t) = c·t^k for a non-negative integer k.
    pub fn monomial(c: f64, k: u32) -> Self {
        let kf = k as f64;
        let f = Self::new(move |t| c * t.powi(k as i32)).with_derivative(move |t| {
            if k == 0 {
                0.0
            } else {
                c * kf * t.powi(k as i32 - 1)
            }
        });
        f.with_value_at_zero(if k == 0 { c } else { 0.0 })
    }

    /// h_β(t) = t^(β-1)/Γ(β), β > 0.
    pub fn power_law(beta: f64) -> Self {
        let g = recip_gamma(beta);
        let p = beta - 1.0;
        let exponent = if is_nonneg_integer(p) { 0.0 } else { p };
        let mut f = Self::new(move |t| t.powf(p) * g).with_exponent(exponent);
        if beta >= 1.0 {
            let gd = recip_gamma(beta - 1.0);
            f = f.with_derivative(move |t| t.powf(p - 1.0) * gd);
            f = f.with_value_at_zero(if beta == 1.0 { 1.0 } else { 0.0 });
        }
        f
    }

    pub fn exp() -> Self {
        Self::new(f64::exp)
            .with_derivative(f64::exp)
            .with_value_at_zero(1.0)
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn value_at_zero(&self) -> Option<f64> {
        self.f0
    }

    pub fn has_derivative(&self) -> bool {
        self.df.is_some()
    }

    /// f′ as a function in its own right, exponent lowered by one when f is
    /// singular at the origin.
    pub fn derivative(&self) -> Option<TestFunction> {
        let df = self.df.clone()?;
        let exponent = if self.exponent == 0.0 {
            0.0
        } else {
            self.exponent - 1.0
        };
        Some(TestFunction {
            f: df,
            df: None,
            f0: None,
            exponent,
        })
    }

    /// Samples on the grid.
    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        let values = grid
            .nodes()
            .iter()
            .map(|&t| {
                let v = self.evaluate(t);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite(t))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        GridFunction::from_values(grid.clone(), self.exponent, values)
    }
}

/// Samples of f(t) = t^p·f₁(t) at the nodes of a grid, stored as the
/// regular part f₁.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    exponent: f64,
    regular: Vec<f64>,
}

impl GridFunction {
    /// From samples of the regular part f₁.
    pub fn new(grid: Grid, exponent: f64, regular: Vec<f64>) -> Result<Self> {
        if !(exponent > -1.0) || !exponent.is_finite() {
            return Err(Error::NonIntegrable(exponent));
        }
        if regular.len() != grid.len() {
            return Err(Error::Grid(format!(
                "{} samples for {} nodes",
                regular.len(),
                grid.len()
            )));
        }
        if let Some(i) = regular.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(grid.nodes()[i]));
        }
        Ok(GridFunction {
            grid,
            exponent,
            regular,
        })
    }

    /// From samples of the full function t^p·f₁(t).
    pub fn from_values(grid: Grid, exponent: f64, values: Vec<f64>) -> Result<Self> {
        let regular = if exponent == 0.0 {
            values
        } else {
            values
                .iter()
                .zip(grid.nodes())
                .map(|(v, t)| v / t.powf(exponent))
                .collect()
        };
        Self::new(grid, exponent, regular)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn regular(&self) -> &[f64] {
        &self.regular
    }

    pub fn value(&self, i: usize) -> f64 {
        let t = self.grid.nodes()[i];
        if self.exponent == 0.0 {
            self.regular[i]
        } else {
            t.powf(self.exponent) * self.regular[i]
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.regular.len()).map(|i| self.value(i)).collect()
    }

    /// The same function with regular part taken relative to a smaller
    /// exponent.
    pub fn with_exponent(&self, exponent: f64) -> Result<GridFunction> {
        if exponent == self.exponent {
            return Ok(self.clone());
        }
        let shift = self.exponent - exponent;
        let regular = self
            .regular
            .iter()
            .zip(self.grid.nodes())
            .map(|(v, t)| v * t.powf(shift))
            .collect();
        GridFunction::new(self.grid.clone(), exponent, regular)
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            exponent: self.exponent,
            regular: self.regular.iter().map(|v| c * v).collect(),
        }
    }

    /// a·self + b·other on a shared grid.
    pub fn combine(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let p = self.exponent.min(other.exponent);
        let x = self.with_exponent(p)?;
        let y = other.with_exponent(p)?;
        let regular = x
            .regular
            .iter()
            .zip(&y.regular)
            .map(|(u, v)| a * u + b * v)
            .collect();
        GridFunction::new(self.grid.clone(), p, regular)
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.combine(1.0, other, -1.0)
    }

    /// Interpolates the regular part on panel j (0-based; panel j ends at
    /// node j) with the cubic through four neighbouring nodes.
    pub(crate) fn interpolate_regular(&self, j: usize, t: f64) -> f64 {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        let start = j.saturating_sub(2).min(n - 4);
        let xs = &nodes[start..start + 4];
        let ys = &self.regular[start..start + 4];
        let mut acc = 0.0;
        for k in 0..4 {
            let mut l = 1.0;
            for m in 0..4 {
                if m != k {
                    l *= (t - xs[m]) / (xs[k] - xs[m]);
                }
            }
            acc += l * ys[k];
        }
        acc
    }

    /// Writes `t,value` records of the full function.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Csv(e.to_string());
        writeln!(out, "t,value").map_err(io)?;
        for (i, t) in self.grid.nodes().iter().enumerate() {
            writeln!(out, "{:.14e},{:.14e}", t, self.value(i)).map_err(io)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Reads `t,value` records. The values are full function values; the
    /// regular part is formed with the given exponent.
    pub fn read_csv<R: BufRead>(input: R, exponent: f64) -> Result<GridFunction> {
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        let mut lines = input.lines().enumerate();
        match lines.next() {
            Some((_, Ok(h))) if h.trim().replace(' ', "") == "t,value" => {}
            Some((_, Ok(h))) => {
                return Err(Error::Csv(format!("expected header `t,value`, found `{h}`")))
            }
            Some((_, Err(e))) => return Err(Error::Csv(e.to_string())),
            None => return Err(Error::Csv("empty input".into())),
        }
        for (no, line) in lines {
            let line = line.map_err(|e| Error::Csv(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Csv(format!("line {}: expected two fields", no + 1)));
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Csv(format!("line {}: bad number `{}`", no + 1, s.trim())))
            };
            nodes.push(parse(a)?);
            values.push(parse(b)?);
        }
        let grid = Grid::from_nodes(nodes)?;
        GridFunction::from_values(grid, exponent, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let grid = Grid::new(16, 2.0, 2.0).unwrap();
        let f = TestFunction::new(|t: f64| t.sin() + 0.1).sample(&grid).unwrap();
        let text = f.to_csv_string();
        assert!(text.starts_with("t,value\n"));
        let g = GridFunction::read_csv(text.as_bytes(), 0.0).unwrap();
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).abs() <= 1e-14 * a.abs());
        }
    }

    #[test]
    fn csv_errors() {
        assert!(GridFunction::read_csv("x,y\n1,2\n".as_bytes(), 0.0).is_err());
        assert!(GridFunction::read_csv("t,value\n1,abc\n".as_bytes(), 0.0).is_err());
    }

    #[test]
    fn cubic_interpolation_is_exact_on_cubics() {
        let grid = Grid::new(20, 2.0, 1.0).unwrap();
        let f = TestFunction::new(|t| 1.0 - 2.0 * t + t.powi(3)).sample(&grid).unwrap();
        for j in 0..20 {
            let t = grid.panel_start(j) * 0.3 + grid.nodes()[j] * 0.7;
            let want = 1.0 - 2.0 * t + t.powi(3);
            assert!((f.interpolate_regular(j, t) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn exponent_bookkeeping() {
        let grid = Grid::new(8, 1.0, 1.0).unwrap();
        let f = TestFunction::power_law(0.5).sample(&grid).unwrap();
        assert_eq!(f.exponent(), -0.5);
        let one = TestFunction::constant(1.0).sample(&grid).unwrap();
        let s = f.add(&one).unwrap();
        assert_eq!(s.exponent(), -0.5);
        let want = 0.5f64.powf(-0.5) * recip_gamma(0.5) + 1.0;
        assert!((s.value(3) - want).abs() < 1e-14);
        assert!(GridFunction::new(grid, -1.0, vec![0.0; 8]).is_err());
    }
}
