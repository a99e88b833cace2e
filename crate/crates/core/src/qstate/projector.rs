use nalgebra::DMatrix;

use super::density::DensityMatrix;
use super::registry::{Registry, Split};
use super::state::StateVector;
use super::C64;
use crate::{tol, Error, Result};

/// Embeds an operator on `targets` (in the given order) as `op ⊗ 1_rest`.
pub fn embed_operator<S: AsRef<str>>(
    registry: &Registry,
    targets: &[S],
    local: &DMatrix<C64>,
) -> Result<DMatrix<C64>> {
    let split = Split::new(registry, targets)?;
    if local.nrows() != split.target_dim || local.ncols() != split.target_dim {
        return Err(Error::DimensionMismatch {
            expected: split.target_dim,
            got: local.nrows(),
        });
    }
    let n = registry.dim();
    let mut full = DMatrix::zeros(n, n);
    for r in 0..split.rest_dim {
        for i in 0..split.target_dim {
            for j in 0..split.target_dim {
                let v = local[(i, j)];
                if v.norm_sqr() != 0.0 {
                    full[(split.join(i, r), split.join(j, r))] = v;
                }
            }
        }
    }
    Ok(full)
}

/// Orthogonal projector `π ⊗ 1_rest` acting on a group of target subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    registry: Registry,
    targets: Vec<String>,
    local: DMatrix<C64>,
    full: DMatrix<C64>,
}

impl Projector {
    pub fn new(registry: &Registry, targets: &[String], local: DMatrix<C64>) -> Result<Self> {
        let herm = (&local - local.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > tol::CONSTRUCTION {
            return Err(Error::NotHermitian(herm));
        }
        let idem = (&local * &local - &local)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if idem > tol::CONSTRUCTION {
            return Err(Error::NotIdempotent(idem));
        }
        let full = embed_operator(registry, targets, &local)?;
        Ok(Self {
            registry: registry.clone(),
            targets: targets.to_vec(),
            local,
            full,
        })
    }

    /// Rank-one `|v⟩⟨v| ⊗ 1_rest`; `v`'s registry names the targets.
    pub fn from_basis_vector(v: &StateVector, registry: &Registry) -> Result<Self> {
        let n = v.norm_sqr();
        if (n - 1.0).abs() > tol::BASIS {
            return Err(Error::NotNormalized(n));
        }
        for s in v.registry().subsystems() {
            if registry.get(s.label())? != s {
                return Err(Error::RegistryMismatch);
            }
        }
        let targets: Vec<String> = v.registry().labels().map(str::to_string).collect();
        // renormalize so idempotence holds at the tighter construction tolerance
        let v = v.normalized()?;
        Self::new(registry, &targets, v.outer())
    }

    /// Projector onto one computational basis state of one subsystem.
    pub fn basis_outcome(registry: &Registry, label: &str, basis_label: &str) -> Result<Self> {
        let sub = registry.get(label)?;
        let k = sub.basis_index(basis_label)?;
        let mut local = DMatrix::zeros(sub.dim(), sub.dim());
        local[(k, k)] = C64::new(1.0, 0.0);
        Self::new(registry, &[label.to_string()], local)
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    pub fn local(&self) -> &DMatrix<C64> {
        &self.local
    }

    pub fn full_matrix(&self) -> &DMatrix<C64> {
        &self.full
    }
}

/// States that can be measured with a [`Projector`].
pub trait BornState {
    fn registry(&self) -> &Registry;
    /// `tr(ρ M)` or `⟨ψ|M|ψ⟩`.
    fn expectation(&self, op: &DMatrix<C64>) -> C64;
}

impl BornState for StateVector {
    fn registry(&self) -> &Registry {
        StateVector::registry(self)
    }

    fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        let a = self.amplitudes();
        a.dotc(&(op * a))
    }
}

impl BornState for DensityMatrix {
    fn registry(&self) -> &Registry {
        DensityMatrix::registry(self)
    }

    fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        DensityMatrix::expectation(self, op)
    }
}

/// Born rule `tr(ρP)`, clamped to `[0, 1]` after a tolerance check.
pub fn born_probability<S: BornState + ?Sized>(state: &S, proj: &Projector) -> Result<f64> {
    if state.registry() != proj.registry() {
        return Err(Error::RegistryMismatch);
    }
    let p = state.expectation(proj.full_matrix()).re;
    if p < -tol::PSD {
        return Err(Error::NegativeProbability(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Rank-one projector from a normalized basis vector.
pub fn projector_from_basis_vector(v: &StateVector, registry: &Registry) -> Result<Projector> {
    Projector::from_basis_vector(v, registry)
}
