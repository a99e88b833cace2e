use std::fmt;

use crate::{Error, Result};

/// One labelled tensor factor with named computational basis states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subsystem {
    label: String,
    basis: Vec<String>,
}

impl Subsystem {
    pub fn new(label: impl Into<String>, basis: Vec<String>) -> Result<Self> {
        let label = label.into();
        if basis.is_empty() {
            return Err(Error::EmptySubsystem(label));
        }
        for (i, b) in basis.iter().enumerate() {
            if basis[..i].contains(b) {
                return Err(Error::DuplicateBasisLabel {
                    label,
                    basis: b.clone(),
                });
            }
        }
        Ok(Self { label, basis })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis
    }

    pub fn basis_index(&self, basis_label: &str) -> Result<usize> {
        self.basis
            .iter()
            .position(|b| b == basis_label)
            .ok_or_else(|| Error::UnknownBasisLabel {
                label: self.label.clone(),
                basis: basis_label.to_string(),
            })
    }
}

/// Ordered set of subsystems. Registration order is the tensor order: the
/// first subsystem is the most significant digit of a flat index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Registry {
    subsystems: Vec<Subsystem>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder form of [`Registry::push`].
    pub fn with(mut self, label: &str, basis: &[&str]) -> Result<Self> {
        self.push(Subsystem::new(
            label,
            basis.iter().map(|b| b.to_string()).collect(),
        )?)?;
        Ok(self)
    }

    pub fn push(&mut self, subsystem: Subsystem) -> Result<()> {
        if self.contains(subsystem.label()) {
            return Err(Error::DuplicateLabel(subsystem.label.clone()));
        }
        self.subsystems.push(subsystem);
        Ok(())
    }

    pub fn from_subsystems(subsystems: impl IntoIterator<Item = Subsystem>) -> Result<Self> {
        let mut reg = Self::new();
        for s in subsystems {
            reg.push(s)?;
        }
        Ok(reg)
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.subsystems.iter().map(|s| s.label())
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.label == label)
    }

    pub fn get(&self, label: &str) -> Result<&Subsystem> {
        self.position(label)
            .map(|i| &self.subsystems[i])
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(Subsystem::dim).collect()
    }

    /// Total dimension; the empty registry is the scalar space of dimension 1.
    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(Subsystem::dim).product()
    }

    /// Concatenation `self ⊗ other`, rejecting label collisions.
    pub fn concat(&self, other: &Registry) -> Result<Registry> {
        let mut out = self.clone();
        for s in &other.subsystems {
            if out.contains(s.label()) {
                return Err(Error::LabelCollision(s.label.clone()));
            }
            out.subsystems.push(s.clone());
        }
        Ok(out)
    }

    /// Sub-registry of `labels`, kept in this registry's relative order.
    pub fn restrict<S: AsRef<str>>(&self, labels: &[S]) -> Result<Registry> {
        for l in labels {
            self.get(l.as_ref())?;
        }
        Ok(Registry {
            subsystems: self
                .subsystems
                .iter()
                .filter(|s| labels.iter().any(|l| l.as_ref() == s.label))
                .cloned()
                .collect(),
        })
    }

    /// Sub-registry of `labels` in the order given.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Registry> {
        let mut out = Registry::new();
        for l in labels {
            out.push(self.get(l.as_ref())?.clone())?;
        }
        Ok(out)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut digits = vec![0; self.len()];
        for (k, s) in self.subsystems.iter().enumerate().rev() {
            digits[k] = flat % s.dim();
            flat /= s.dim();
        }
        digits
    }

    pub fn flat_index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.subsystems)
            .fold(0, |acc, (&d, s)| acc * s.dim() + d)
    }

    /// Flat index of the product basis state named by one basis label per
    /// subsystem, in registry order.
    pub fn index_of<S: AsRef<str>>(&self, basis_labels: &[S]) -> Result<usize> {
        if basis_labels.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: basis_labels.len(),
            });
        }
        let digits = self
            .subsystems
            .iter()
            .zip(basis_labels)
            .map(|(s, b)| s.basis_index(b.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.flat_index(&digits))
    }

    /// Parses a comma-joined key such as `"↑,u"`.
    pub fn index_of_key(&self, key: &str) -> Result<usize> {
        if self.is_empty() {
            return if key.is_empty() {
                Ok(0)
            } else {
                Err(Error::DimensionMismatch {
                    expected: 0,
                    got: 1,
                })
            };
        }
        let parts: Vec<&str> = key.split(',').collect();
        self.index_of(&parts)
    }

    /// Comma-joined basis labels of a flat index, e.g. `"h,H,↓"`.
    pub fn key_of(&self, flat: usize) -> String {
        self.multi_index(flat)
            .iter()
            .zip(&self.subsystems)
            .map(|(&d, s)| s.basis[d].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .subsystems
            .iter()
            .map(|s| format!("{}[{}]", s.label, s.dim()))
            .collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

/// Precomputed split of a registry's flat indices into a group of target
/// subsystems (in caller order) and the remaining subsystems.
#[derive(Debug, Clone)]
pub(crate) struct Split {
    dims: Vec<usize>,
    target_pos: Vec<usize>,
    rest_pos: Vec<usize>,
    pub target_dim: usize,
    pub rest_dim: usize,
}

impl Split {
    pub fn new<S: AsRef<str>>(registry: &Registry, targets: &[S]) -> Result<Self> {
        let mut target_pos = Vec::with_capacity(targets.len());
        for t in targets {
            let p = registry
                .position(t.as_ref())
                .ok_or_else(|| Error::UnknownLabel(t.as_ref().to_string()))?;
            if target_pos.contains(&p) {
                return Err(Error::DuplicateLabel(t.as_ref().to_string()));
            }
            target_pos.push(p);
        }
        let rest_pos: Vec<usize> = (0..registry.len())
            .filter(|p| !target_pos.contains(p))
            .collect();
        let dims = registry.dims();
        let target_dim = target_pos.iter().map(|&p| dims[p]).product();
        let rest_dim = rest_pos.iter().map(|&p| dims[p]).product();
        Ok(Self {
            dims,
            target_pos,
            rest_pos,
            target_dim,
            rest_dim,
        })
    }

    fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut d = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            d[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
        d
    }

    /// `(target index, rest index)` of a flat index.
    pub fn split(&self, flat: usize) -> (usize, usize) {
        let d = self.digits(flat);
        let t = self
            .target_pos
            .iter()
            .fold(0, |acc, &p| acc * self.dims[p] + d[p]);
        let r = self
            .rest_pos
            .iter()
            .fold(0, |acc, &p| acc * self.dims[p] + d[p]);
        (t, r)
    }

    /// Inverse of [`Split::split`].
    pub fn join(&self, mut target: usize, mut rest: usize) -> usize {
        let mut d = vec![0; self.dims.len()];
        for &p in self.target_pos.iter().rev() {
            d[p] = target % self.dims[p];
            target /= self.dims[p];
        }
        for &p in self.rest_pos.iter().rev() {
            d[p] = rest % self.dims[p];
            rest /= self.dims[p];
        }
        d.iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &n)| acc * n + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> Registry {
        Registry::new()
            .with("C", &["h", "t"])
            .unwrap()
            .with("F1", &["H", "T"])
            .unwrap()
            .with("A", &["f", "o", "x"])
            .unwrap()
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert_eq!(
            Registry::new().with("S", &["a"]).unwrap().with("S", &["b"]),
            Err(Error::DuplicateLabel("S".into()))
        );
        assert!(matches!(
            Registry::new().with("S", &[]),
            Err(Error::EmptySubsystem(_))
        ));
        assert!(matches!(
            Registry::new().with("S", &["a", "a"]),
            Err(Error::DuplicateBasisLabel { .. })
        ));
    }

    #[test]
    fn index_round_trip() {
        let r = reg();
        assert_eq!(r.dim(), 12);
        for i in 0..r.dim() {
            assert_eq!(r.index_of_key(&r.key_of(i)).unwrap(), i);
            assert_eq!(r.flat_index(&r.multi_index(i)), i);
        }
        assert_eq!(r.index_of(&["t", "H", "o"]).unwrap(), 6 + 1);
    }

    #[test]
    fn split_join_inverse() {
        let r = reg();
        let s = Split::new(&r, &["A", "C"]).unwrap();
        assert_eq!((s.target_dim, s.rest_dim), (6, 2));
        for i in 0..r.dim() {
            let (t, rest) = s.split(i);
            assert_eq!(s.join(t, rest), i);
        }
        // C=t, F1=H, A=o: target index in (A, C) order is o*2 + t = 3
        assert_eq!(s.split(r.index_of(&["t", "H", "o"]).unwrap()), (3, 0));
    }

    #[test]
    fn restrict_keeps_registry_order() {
        let r = reg();
        let sub = r.restrict(&["A", "C"]).unwrap();
        assert_eq!(sub.labels().collect::<Vec<_>>(), vec!["C", "A"]);
        assert!(matches!(r.restrict(&["Q"]), Err(Error::UnknownLabel(_))));
    }
}
