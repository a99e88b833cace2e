use nalgebra::DMatrix;

use super::registry::{Registry, Split};
use super::state::StateVector;
use super::C64;
use crate::{tol, Error, Result};

/// Density matrix over a registry.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    registry: Registry,
    entries: DMatrix<C64>,
    subnormalized: bool,
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

impl DensityMatrix {
    /// Validated unit-trace density matrix.
    pub fn new(registry: Registry, entries: DMatrix<C64>) -> Result<Self> {
        let rho = Self::subnormalized(registry, entries)?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > tol::CONSTRUCTION {
            return Err(Error::InvalidTrace(tr));
        }
        Ok(Self {
            subnormalized: false,
            ..rho
        })
    }

    /// Hermitian positive block whose trace may be below 1 (a conditional
    /// block before renormalization).
    pub fn subnormalized(registry: Registry, entries: DMatrix<C64>) -> Result<Self> {
        let n = registry.dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: entries.nrows(),
            });
        }
        let dev = hermitian_deviation(&entries);
        if dev > tol::CONSTRUCTION {
            return Err(Error::NotHermitian(dev));
        }
        let rho = Self {
            registry,
            entries,
            subnormalized: true,
        };
        let min = rho.min_eigenvalue();
        if min < -tol::PSD {
            return Err(Error::NotPositive(min));
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|`; unnormalized branches give a subnormalized block.
    pub fn from_pure(psi: &StateVector) -> Self {
        Self {
            registry: psi.registry().clone(),
            entries: psi.outer(),
            subnormalized: !psi.is_normalized(),
        }
    }

    /// `Σ w_k |ψ_k⟩⟨ψ_k|` for states over a common registry.
    pub fn mixture(terms: &[(f64, StateVector)]) -> Result<Self> {
        let first = terms.first().ok_or(Error::InvalidTrace(0.0))?;
        let registry = first.1.registry().clone();
        let mut entries = DMatrix::zeros(registry.dim(), registry.dim());
        for (w, psi) in terms {
            if psi.registry() != &registry {
                return Err(Error::RegistryMismatch);
            }
            entries += psi.outer() * C64::new(*w, 0.0);
        }
        let tr: f64 = entries.diagonal().iter().map(|z| z.re).sum();
        if (tr - 1.0).abs() > tol::CONSTRUCTION {
            Self::subnormalized(registry, entries)
        } else {
            Self::new(registry, entries)
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Entry `⟨row|ρ|col⟩` addressed by basis labels.
    pub fn get<S: AsRef<str>>(&self, row: &[S], col: &[S]) -> Result<C64> {
        Ok(self.entries[(self.registry.index_of(row)?, self.registry.index_of(col)?)])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        self.entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `tr(ρ M)`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        (&self.entries * op).trace()
    }

    /// Traces out every subsystem not in `keep`. The result lists the kept
    /// subsystems in their original relative order.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::InvalidExperiment(
                "partial trace needs at least one kept subsystem".into(),
            ));
        }
        let kept = self.registry.restrict(keep)?;
        let kept_labels: Vec<&str> = kept.labels().collect();
        let split = Split::new(&self.registry, &kept_labels)?;
        let (k, d) = (split.target_dim, split.rest_dim);
        let mut out = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..d {
                    acc += self.entries[(split.join(i, r), split.join(j, r))];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(DensityMatrix {
            registry: kept,
            entries: out,
            subnormalized: self.subnormalized,
        })
    }

    /// `ρ / tr ρ`.
    pub fn renormalized(&self) -> Result<DensityMatrix> {
        let tr = self.trace();
        if tr <= tol::ZERO_BRANCH {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(self.registry.clone(), &self.entries / C64::new(tr, 0.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &DensityMatrix) -> Result<f64> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        Ok((&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }
}

/// `tr_{¬keep}(ρ)`.
pub fn partial_trace<S: AsRef<str>>(rho: &DensityMatrix, keep: &[S]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn two_qubits() -> Registry {
        Registry::new()
            .with("a", &["0", "1"])
            .unwrap()
            .with("b", &["0", "1"])
            .unwrap()
    }

    #[test]
    fn trace_out_product_factor() {
        let psi = StateVector::from_real(two_qubits(), &[H, H, 0.0, 0.0]).unwrap();
        let rho = DensityMatrix::from_pure(&psi)
            .partial_trace(&["a"])
            .unwrap();
        assert!((rho.get(&["0"], &["0"]).unwrap().re - 1.0).abs() < 1e-15);
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!(rho.get(&["1"], &["1"]).unwrap().norm() < 1e-15);
    }

    #[test]
    fn trace_out_bell_partner() {
        let bell = StateVector::from_real(two_qubits(), &[H, 0.0, 0.0, H]).unwrap();
        let rho = DensityMatrix::from_pure(&bell)
            .partial_trace(&["a"])
            .unwrap();
        for (r, c, v) in [("0", "0", 0.5), ("1", "1", 0.5), ("0", "1", 0.0)] {
            assert!((rho.get(&[r], &[c]).unwrap() - C64::new(v, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_errors() {
        let psi = StateVector::basis(&two_qubits(), &["0", "0"]).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        assert!(matches!(
            rho.partial_trace(&["z"]),
            Err(Error::UnknownLabel(_))
        ));
        assert!(rho.partial_trace::<&str>(&[]).is_err());
    }

    #[test]
    fn validation() {
        let r = Registry::new().with("a", &["0", "1"]).unwrap();
        let bad = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert!(matches!(
            DensityMatrix::new(r.clone(), bad),
            Err(Error::NotHermitian(_))
        ));
        let neg = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.5, 0.0),
            C64::new(-0.5, 0.0),
        ]));
        assert!(matches!(
            DensityMatrix::new(r.clone(), neg),
            Err(Error::NotPositive(_))
        ));
        let half = DMatrix::from_diagonal_element(2, 2, C64::new(0.25, 0.0));
        assert!(matches!(
            DensityMatrix::new(r.clone(), half.clone()),
            Err(Error::InvalidTrace(_))
        ));
        assert!(DensityMatrix::subnormalized(r, half)
            .unwrap()
            .is_subnormalized());
    }
}
