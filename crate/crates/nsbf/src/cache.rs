//! On-disk cache of the `θ_n` so that `solve` and `spectrum` runs on the same
//! problem share one coefficient build.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};

use nsbf_core::dirac::Potential;
use nsbf_core::grid::SampledMat2Fn;
use nsbf_core::kernel::KernelCoefficients;
use nsbf_core::{c64, ComplexMat2};

use crate::config::OrderSetting;
use crate::table::{write_matrix_functions, MATRIX_HEADER};

/// Identifies a coefficient build: the potential samples, the grid and the
/// order setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey(u64);

impl CacheKey {
    pub fn new(potential: &Potential, order: OrderSetting) -> Self {
        let mut h = DefaultHasher::new();
        let grid = potential.grid();
        grid.length().to_bits().hash(&mut h);
        grid.intervals().hash(&mut h);
        for f in [potential.p(), potential.q()] {
            for v in f.values() {
                v.re.to_bits().hash(&mut h);
                v.im.to_bits().hash(&mut h);
            }
        }
        match order {
            OrderSetting::Fixed(n) => (0u8, n as u64).hash(&mut h),
            OrderSetting::Auto { tol } => (1u8, tol.to_bits()).hash(&mut h),
        }
        Self(h.finish())
    }

    pub fn file_name(&self) -> String {
        format!("theta-{:016x}.csv", self.0)
    }
}

/// Cache directory below an output directory.
pub fn cache_dir(out: &Path) -> PathBuf {
    out.join(".cache")
}

pub fn cache_path(out: &Path, key: CacheKey) -> PathBuf {
    cache_dir(out).join(key.file_name())
}

/// Stores `θ_{-1}..θ_N`.
pub fn store(path: &Path, coeffs: &KernelCoefficients) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    write_matrix_functions(&tmp, coeffs.thetas().iter().enumerate().map(|(k, t)| (k as i64 - 1, t)))?;
    std::fs::rename(tmp, path)
}

/// Why a cache file could not be used.
#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed cache file: {0}")]
    Malformed(String),
}

/// Loads coefficients stored by [`store`] for `potential`.
pub fn load(path: &Path, potential: &Potential) -> Result<KernelCoefficients, CacheError> {
    let grid = *potential.grid();
    let mut reader = csv::Reader::from_path(path).map_err(|e| CacheError::Malformed(e.to_string()))?;
    let header = reader.headers().map_err(|e| CacheError::Malformed(e.to_string()))?;
    if header.iter().ne(MATRIX_HEADER) {
        return Err(CacheError::Malformed("unexpected header".into()));
    }
    let mut thetas: Vec<Vec<ComplexMat2>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CacheError::Malformed(e.to_string()))?;
        let n: i64 = record[0]
            .parse()
            .map_err(|_| CacheError::Malformed("bad order".into()))?;
        let v: Vec<f64> = record
            .iter()
            .skip(2)
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CacheError::Malformed("bad value".into()))?;
        if v.len() != 8 {
            return Err(CacheError::Malformed("expected eight matrix entries".into()));
        }
        // thetas[0] holds θ_{-1}
        let current = thetas.len() as i64 - 2;
        if n == current + 1 {
            thetas.push(Vec::with_capacity(grid.len()));
        } else if n != current {
            return Err(CacheError::Malformed("rows out of order".into()));
        }
        let m = ComplexMat2::new(c64(v[0], v[1]), c64(v[2], v[3]), c64(v[4], v[5]), c64(v[6], v[7]));
        thetas.last_mut().expect("pushed above").push(m);
    }
    let thetas = thetas
        .into_iter()
        .map(|values| SampledMat2Fn::from_values(grid, values))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CacheError::Malformed(e.to_string()))?;
    KernelCoefficients::from_theta(potential, thetas).map_err(|e| CacheError::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nsbf_core::dirac::fundamental_solution_zero;
    use nsbf_core::grid::Grid;
    use nsbf_core::kernel::build_coefficients;

    fn trig(m: usize) -> Potential {
        Potential::from_fns(
            Grid::new(1.0, m).unwrap(),
            |x| c64((std::f64::consts::PI * x).sin(), 0.0),
            |x| c64((std::f64::consts::PI * x).cos(), 0.0),
        )
        .unwrap()
    }

    #[test]
    fn keys_separate_problems() {
        let q = trig(100);
        let k = CacheKey::new(&q, OrderSetting::Fixed(8));
        assert_eq!(k, CacheKey::new(&trig(100), OrderSetting::Fixed(8)));
        assert_ne!(k, CacheKey::new(&q, OrderSetting::Fixed(9)));
        assert_ne!(k, CacheKey::new(&trig(105), OrderSetting::Fixed(8)));
        assert_ne!(k, CacheKey::new(&q, OrderSetting::Auto { tol: 1e-8 }));
    }

    #[test]
    fn round_trip_is_exact() {
        let q = trig(100);
        let hom = fundamental_solution_zero(&q).unwrap();
        let coeffs = build_coefficients(&q, &hom, 6).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = cache_path(dir.path(), CacheKey::new(&q, OrderSetting::Fixed(6)));
        store(&path, &coeffs).unwrap();
        let loaded = load(&path, &q).unwrap();
        assert_eq!(loaded.order(), 6);
        for n in -1..=6 {
            assert_eq!(loaded.theta(n).unwrap(), coeffs.theta(n).unwrap());
            assert_eq!(loaded.k(n).unwrap(), coeffs.k(n).unwrap());
        }
    }

    #[test]
    fn rejects_foreign_files() {
        let q = trig(100);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(matches!(load(&path, &q), Err(CacheError::Malformed(_))));
        let other = trig(200);
        let hom = fundamental_solution_zero(&other).unwrap();
        store(&path, &build_coefficients(&other, &hom, 2).unwrap()).unwrap();
        assert!(load(&path, &q).is_err());
    }
}
