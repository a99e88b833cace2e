use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::registry::{Registry, Split};
use super::C64;
use crate::{tol, Error, Result};

/// Pure state over a registry. Normalized unless built with
/// [`StateVector::branch`].
#[derive(Clone, PartialEq)]
pub struct StateVector {
    registry: Registry,
    amps: DVector<C64>,
}

impl StateVector {
    /// Normalized state; squared norm must be 1 within 1e-12.
    pub fn new(registry: Registry, amps: Vec<C64>) -> Result<Self> {
        let s = Self::branch(registry, amps)?;
        let n = s.norm_sqr();
        if (n - 1.0).abs() > tol::CONSTRUCTION {
            return Err(Error::NotNormalized(n));
        }
        Ok(s)
    }

    /// Unnormalized branch; only the length is checked.
    pub fn branch(registry: Registry, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != registry.dim() {
            return Err(Error::DimensionMismatch {
                expected: registry.dim(),
                got: amps.len(),
            });
        }
        Ok(Self {
            registry,
            amps: DVector::from_vec(amps),
        })
    }

    pub fn from_real(registry: Registry, amps: &[f64]) -> Result<Self> {
        Self::new(registry, amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Product basis state, one basis label per subsystem.
    pub fn basis<S: AsRef<str>>(registry: &Registry, basis_labels: &[S]) -> Result<Self> {
        let i = registry.index_of(basis_labels)?;
        let mut amps = vec![C64::new(0.0, 0.0); registry.dim()];
        amps[i] = C64::new(1.0, 0.0);
        Self::new(registry.clone(), amps)
    }

    /// Normalized superposition of product basis states given by
    /// comma-joined keys, e.g. `[(1/√2, "↑,u"), (1/√2, "↓,d")]`.
    pub fn superposition(registry: &Registry, terms: &[(C64, &str)]) -> Result<Self> {
        let mut amps = vec![C64::new(0.0, 0.0); registry.dim()];
        for (c, key) in terms {
            amps[registry.index_of_key(key)?] += c;
        }
        Self::new(registry.clone(), amps)
    }

    /// Real-coefficient form of [`StateVector::superposition`].
    pub fn real_superposition(registry: &Registry, terms: &[(f64, &str)]) -> Result<Self> {
        let terms: Vec<(C64, &str)> = terms.iter().map(|&(c, k)| (C64::new(c, 0.0), k)).collect();
        Self::superposition(registry, &terms)
    }

    /// The one-dimensional scalar state over the empty registry.
    pub fn scalar_one() -> Self {
        Self {
            registry: Registry::new(),
            amps: DVector::from_element(1, C64::new(1.0, 0.0)),
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amplitude<S: AsRef<str>>(&self, basis_labels: &[S]) -> Result<C64> {
        Ok(self.amps[self.registry.index_of(basis_labels)?])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol::CONSTRUCTION
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= tol::ZERO_BRANCH * tol::ZERO_BRANCH {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self {
            registry: self.registry.clone(),
            amps: &self.amps / C64::new(n.sqrt(), 0.0),
        })
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            registry: self.registry.clone(),
            amps: &self.amps * c,
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `self ⊗ other` over the concatenated registry.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let registry = self.registry.concat(&other.registry)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Self::branch(registry, amps)
    }

    /// `|ψ⟩⟨ψ|` as a raw matrix.
    pub fn outer(&self) -> DMatrix<C64> {
        &self.amps * self.amps.adjoint()
    }

    /// Reorders the tensor factors to match `registry`, which must hold
    /// the same subsystems.
    pub fn permuted_to(&self, registry: &Registry) -> Result<Self> {
        if registry.len() != self.registry.len()
            || registry.labels().any(|l| !self.registry.contains(l))
        {
            return Err(Error::RegistryMismatch);
        }
        let labels: Vec<&str> = registry.labels().collect();
        let split = Split::new(&self.registry, &labels)?;
        let mut amps = vec![C64::new(0.0, 0.0); self.dim()];
        for (i, a) in self.amps.iter().enumerate() {
            let (t, _) = split.split(i);
            amps[t] = *a;
        }
        Self::branch(registry.clone(), amps)
    }

    /// Applies `local : H_targets → H_targets ⊗ H_appended` (rows indexed by
    /// `(target, appended)` flat index) and appends the new subsystems at the
    /// end of the registry.
    pub(crate) fn apply_local<S: AsRef<str>>(
        &self,
        targets: &[S],
        local: &DMatrix<C64>,
        appended: &Registry,
    ) -> Result<Self> {
        let split = Split::new(&self.registry, targets)?;
        let k = appended.dim();
        if local.ncols() != split.target_dim || local.nrows() != split.target_dim * k {
            return Err(Error::DimensionMismatch {
                expected: split.target_dim * k,
                got: local.nrows(),
            });
        }
        let registry = self.registry.concat(appended)?;
        let mut amps = vec![C64::new(0.0, 0.0); registry.dim()];
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let (b, rest) = split.split(i);
            for row in 0..local.nrows() {
                let m = local[(row, b)];
                if m.norm_sqr() == 0.0 {
                    continue;
                }
                let (t, z) = (row / k, row % k);
                amps[split.join(t, rest) * k + z] += m * a;
            }
        }
        Self::branch(registry, amps)
    }

    /// Zeroes every amplitude whose `label` digit differs from `index`
    /// (projection onto one computational basis state of one subsystem).
    pub(crate) fn project_basis(&self, label: &str, index: usize) -> Result<Self> {
        let pos = self
            .registry
            .position(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        let mut amps: Vec<C64> = self.amps.iter().copied().collect();
        for (i, a) in amps.iter_mut().enumerate() {
            if self.registry.multi_index(i)[pos] != index {
                *a = C64::new(0.0, 0.0);
            }
        }
        Self::branch(self.registry.clone(), amps)
    }
}

fn fmt_coeff(c: C64) -> String {
    if c.im.abs() < 1e-15 {
        format!("{:.6}", c.re)
    } else if c.re.abs() < 1e-15 {
        format!("{:.6}i", c.im)
    } else {
        format!("({:.6}{:+.6}i)", c.re, c.im)
    }
}

/// Lists nonzero amplitudes as `coeff |basis,…⟩` in multi-index order.
impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 1e-15)
            .map(|(i, a)| format!("{} |{}⟩", fmt_coeff(*a), self.registry.key_of(i)))
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector({}: {})", self.registry, self)
    }
}

/// `a ⊗ b`.
pub fn tensor(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    a.tensor(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn qubit(label: &str) -> Registry {
        Registry::new().with(label, &["0", "1"]).unwrap()
    }

    #[test]
    fn tensor_zero_plus() {
        let zero = StateVector::basis(&qubit("a"), &["0"]).unwrap();
        let plus = StateVector::from_real(qubit("b"), &[H, H]).unwrap();
        let t = tensor(&zero, &plus).unwrap();
        let re: Vec<f64> = t.amplitudes().iter().map(|a| a.re).collect();
        assert_eq!(re, vec![H, H, 0.0, 0.0]);
        assert_eq!(t.registry().labels().collect::<Vec<_>>(), vec!["a", "b"]);
    }

    #[test]
    fn tensor_spin_memory() {
        let s = Registry::new().with("S", &["↑", "↓"]).unwrap();
        let f = Registry::new().with("F", &["u", "d"]).unwrap();
        let t = StateVector::basis(&s, &["↑"])
            .unwrap()
            .tensor(&StateVector::basis(&f, &["u"]).unwrap())
            .unwrap();
        assert_eq!(t.dim(), 4);
        assert_eq!(t.amplitude(&["↑", "u"]).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(format!("{t}"), "1.000000 |↑,u⟩");
    }

    #[test]
    fn tensor_with_trivial_subsystem() {
        let one = StateVector::basis(&Registry::new().with("I", &["∅"]).unwrap(), &["∅"]).unwrap();
        let psi = StateVector::from_real(qubit("a"), &[0.6, 0.8]).unwrap();
        let t = one.tensor(&psi).unwrap();
        assert_eq!(t.amplitudes(), psi.amplitudes());
        assert_eq!(t.registry().len(), 2);
        assert_eq!(StateVector::scalar_one().tensor(&psi).unwrap(), psi);
    }

    #[test]
    fn tensor_rejects_collision() {
        let a = StateVector::basis(&qubit("a"), &["0"]).unwrap();
        assert_eq!(a.tensor(&a), Err(Error::LabelCollision("a".into())));
    }

    #[test]
    fn new_checks_normalization() {
        assert!(matches!(
            StateVector::from_real(qubit("a"), &[1.0, 1.0]),
            Err(Error::NotNormalized(_))
        ));
        assert!(StateVector::branch(qubit("a"), vec![C64::new(2.0, 0.0); 2]).is_ok());
        assert!(matches!(
            StateVector::branch(qubit("a"), vec![C64::new(1.0, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn permutation_moves_factors() {
        let r = qubit("a").concat(&qubit("b")).unwrap();
        let s = StateVector::basis(&r, &["0", "1"]).unwrap();
        let p = s
            .permuted_to(&qubit("b").concat(&qubit("a")).unwrap())
            .unwrap();
        assert_eq!(p.amplitude(&["1", "0"]).unwrap(), C64::new(1.0, 0.0));
    }
}
