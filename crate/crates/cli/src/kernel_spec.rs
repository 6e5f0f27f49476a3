//! Kernels from the command line (`kind:p1,p2`) and from TOML files.
//!
//! A file either describes one kernel at top level
//!
//! ```toml
//! kind = "tempered"
//! alpha = 0.5
//! rho = 1.0
//! ```
//!
//! or names the members of a pair or triple in `[kappa]`, `[k]`, `[k1]`,
//! `[k2]` tables. A top-level `powerlaw` with a `gamma` field stands for
//! the power-law triple (h_α, h_γ, h_{1-α-γ}).

use sonin_core::kernel::{
    solve_third_kernel, Kernel, KernelSeries, KernelTriple, DEFAULT_TERMS,
};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("kernel `{0}`: {1}")]
    Shorthand(String, String),
    #[error("spec file: {0}")]
    File(String),
    #[error(transparent)]
    Core(#[from] sonin_core::Error),
}

impl SpecError {
    pub fn code(&self) -> &'static str {
        match self {
            SpecError::Shorthand(..) | SpecError::File(_) => "E_SPEC",
            SpecError::Core(e) => e.code(),
        }
    }
}

const KERNEL_KEYS: [&str; 6] = ["kind", "alpha", "beta", "rho", "mu", "coeffs"];
const TABLES: [&str; 4] = ["kappa", "k", "k1", "k2"];

/// Parses `kind:p1,p2,...`; the inverse of the kernel's `Display`.
pub fn parse_kernel(src: &str) -> Result<Kernel, SpecError> {
    let bad = |msg: &str| SpecError::Shorthand(src.to_string(), msg.to_string());
    let (kind, rest) = match src.trim().split_once(':') {
        Some((k, r)) => (k.trim(), Some(r)),
        None => (src.trim(), None),
    };
    let params: Vec<f64> = match rest {
        Some(r) => r
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad(&format!("bad number `{}`", p.trim()))))
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let want = |n: usize| -> Result<(), SpecError> {
        if params.len() == n {
            Ok(())
        } else {
            Err(bad(&format!("`{kind}` takes {n} parameter(s), got {}", params.len())))
        }
    };
    let p = &params;
    let k = match kind {
        "powerlaw" => want(1).map(|_| Kernel::PowerLaw { alpha: p[0] })?,
        "tempered" => want(2).map(|_| Kernel::Tempered { alpha: p[0], rho: p[1] })?,
        "tempered_assoc" => want(2).map(|_| Kernel::TemperedAssociated { alpha: p[0], rho: p[1] })?,
        "bessel_kappa" => want(1).map(|_| Kernel::BesselKappa { alpha: p[0] })?,
        "bessel_k" => want(1).map(|_| Kernel::BesselK { alpha: p[0] })?,
        "ml_kappa" => want(2).map(|_| Kernel::MlKappa { alpha: p[0], beta: p[1] })?,
        "ml_k" => want(2).map(|_| Kernel::MlK { alpha: p[0], beta: p[1] })?,
        "h0" => want(0).map(|_| Kernel::H0)?,
        "h1" => want(0).map(|_| Kernel::H1)?,
        "series" => {
            if p.len() < 2 {
                return Err(bad("series needs mu and at least one coefficient"));
            }
            Kernel::Series(KernelSeries::new(p[0], p[1..].to_vec())?)
        }
        _ => return Err(bad(&format!("unknown kind `{kind}`"))),
    };
    Ok(k.validated()?)
}

/// Contents of a kernel spec file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpecFile {
    pub kernel: Option<Kernel>,
    pub gamma: Option<f64>,
    pub kappa: Option<Kernel>,
    pub k: Option<Kernel>,
    pub k1: Option<Kernel>,
    pub k2: Option<Kernel>,
}

fn kernel_from_table(name: &str, table: &toml::Table) -> Result<Kernel, SpecError> {
    for key in table.keys() {
        if !KERNEL_KEYS.contains(&key.as_str()) {
            return Err(SpecError::File(format!("{name}: unknown field `{key}`")));
        }
    }
    let k: Kernel = toml::Value::Table(table.clone())
        .try_into()
        .map_err(|e: toml::de::Error| SpecError::File(format!("{name}: {}", e.message())))?;
    Ok(k.validated()?)
}

pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    let doc: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| SpecError::File(e.message().to_string()))?;
    let mut top = toml::Table::new();
    let mut spec = SpecFile::default();
    for (key, value) in &doc {
        if TABLES.contains(&key.as_str()) {
            let toml::Value::Table(t) = value else {
                return Err(SpecError::File(format!("`{key}` must be a table")));
            };
            let k = Some(kernel_from_table(key, t)?);
            match key.as_str() {
                "kappa" => spec.kappa = k,
                "k" => spec.k = k,
                "k1" => spec.k1 = k,
                _ => spec.k2 = k,
            }
        } else if key == "gamma" {
            spec.gamma = Some(
                value
                    .as_float()
                    .or_else(|| value.as_integer().map(|i| i as f64))
                    .ok_or_else(|| SpecError::File("`gamma` must be a number".into()))?,
            );
        } else {
            top.insert(key.clone(), value.clone());
        }
    }
    if !top.is_empty() {
        spec.kernel = Some(kernel_from_table("top level", &top)?);
    }
    if spec.gamma.is_some() && !matches!(spec.kernel, Some(Kernel::PowerLaw { .. })) {
        return Err(SpecError::File("`gamma` needs a top-level powerlaw kernel".into()));
    }
    Ok(spec)
}

pub fn load_spec(path: &Path) -> Result<SpecFile, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SpecError::File(format!("{}: {e}", path.display())))?;
    parse_spec(&text)
}

fn missing(what: &str) -> SpecError {
    SpecError::File(format!("no {what} given"))
}

impl SpecFile {
    /// The single kernel: top level, else `[kappa]`.
    pub fn single(&self) -> Result<Kernel, SpecError> {
        self.kernel
            .clone()
            .or_else(|| self.kappa.clone())
            .ok_or_else(|| missing("kernel"))
    }

    /// (κ, k): the tables if present, else a kernel and its known partner.
    pub fn pair(&self) -> Result<(Kernel, Kernel), SpecError> {
        let kappa = self.single()?;
        let k = match &self.k {
            Some(k) => k.clone(),
            None => kappa.sonin_partner()?,
        };
        Ok((kappa, k))
    }

    /// The triple: explicit tables (k₂ solved when absent), the power-law
    /// shortcut, or a pair read as (κ, H0, k).
    pub fn triple(&self) -> Result<KernelTriple, SpecError> {
        if let (Some(Kernel::PowerLaw { alpha }), Some(gamma)) = (&self.kernel, self.gamma) {
            return Ok(KernelTriple::power(*alpha, gamma)?);
        }
        match (&self.kappa, &self.k1) {
            (Some(kappa), Some(k1)) => {
                let k2 = match &self.k2 {
                    Some(k2) => k2.clone(),
                    None => solved_third(kappa, k1)?,
                };
                Ok(KernelTriple::new(kappa.clone(), k1.clone(), k2))
            }
            _ => {
                let (kappa, k) = self.pair()?;
                Ok(KernelTriple::new(kappa, Kernel::H0, k))
            }
        }
    }
}

/// k₂ from the series of κ and k₁.
pub fn solved_third(kappa: &Kernel, k1: &Kernel) -> Result<Kernel, SpecError> {
    let a = kappa.to_series(DEFAULT_TERMS)?;
    let b = k1.to_series(DEFAULT_TERMS)?;
    Ok(Kernel::Series(solve_third_kernel(&a, &b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_round_trips_through_display() {
        for src in [
            "powerlaw:0.5",
            "tempered:0.5,1",
            "tempered_assoc:0.5,1",
            "bessel_kappa:0.5",
            "bessel_k:0.3",
            "ml_kappa:0.25,0.75",
            "ml_k:0.25,0.75",
            "h0",
            "h1",
            "series:0.5,1,-0.5,0.25",
        ] {
            let k = parse_kernel(src).unwrap();
            assert_eq!(k.to_string(), src);
            assert_eq!(parse_kernel(&k.to_string()).unwrap(), k);
        }
    }

    #[test]
    fn shorthand_errors() {
        assert_eq!(parse_kernel("powerlaw").unwrap_err().code(), "E_SPEC");
        assert_eq!(parse_kernel("cauchy:1").unwrap_err().code(), "E_SPEC");
        assert_eq!(parse_kernel("tempered:0.5,x").unwrap_err().code(), "E_SPEC");
        assert_eq!(parse_kernel("ml_k:0.8,0.5").unwrap_err().code(), "E_PARAM");
    }

    #[test]
    fn files_give_kernels_pairs_and_triples() {
        let s = parse_spec("kind = \"powerlaw\"\nalpha = 0.5\ngamma = 0.25\n").unwrap();
        let t = s.triple().unwrap();
        assert_eq!(t.k2, Kernel::PowerLaw { alpha: 0.25 });

        let s = parse_spec("kind = \"tempered\"\nalpha = 0.5\nrho = 1.0\n").unwrap();
        let (_, k) = s.pair().unwrap();
        assert_eq!(k, Kernel::TemperedAssociated { alpha: 0.5, rho: 1.0 });

        let s = parse_spec(
            "[kappa]\nkind = \"tempered\"\nalpha = 0.4\nrho = 1\n[k1]\nkind = \"powerlaw\"\nalpha = 0.3\n",
        )
        .unwrap();
        let t = s.triple().unwrap();
        assert!(matches!(t.k2, Kernel::Series(ref s) if (s.mu() - 0.3).abs() < 1e-15));

        let s = parse_spec("kind = \"series\"\nmu = 0.5\ncoeffs = [1.0, 0.5]\n").unwrap();
        assert!(matches!(s.single().unwrap(), Kernel::Series(_)));
    }

    #[test]
    fn file_errors() {
        assert!(parse_spec("kind = \"powerlaw\"\nalpah = 0.5\n").is_err());
        assert!(parse_spec("kind = \"tempered\"\nalpha = 0.5\nrho = 1\ngamma = 0.1\n").is_err());
        assert!(parse_spec("kind = ").is_err());
        assert_eq!(
            parse_spec("kind = \"powerlaw\"\nalpha = -1\n").unwrap_err().code(),
            "E_PARAM"
        );
    }
}
