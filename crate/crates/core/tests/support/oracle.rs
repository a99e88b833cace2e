//! Brute-force amplitude enumeration over explicit index tuples. Uses only
//! `f64` and the standard library, so it shares no code with the crate
//! under test. All amplitudes in these experiments are real.
#![allow(dead_code)]

use std::collections::BTreeMap;

pub type Key = Vec<usize>;
pub type Amps = BTreeMap<Key, f64>;

/// A basis vector as sparse `(local index tuple, amplitude)` pairs.
pub type Vector = Vec<(Key, f64)>;

const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn add(out: &mut Amps, key: Key, a: f64) {
    *out.entry(key).or_insert(0.0) += a;
}

fn prune(amps: Amps) -> Amps {
    amps.into_iter().filter(|(_, a)| a.abs() > 1e-15).collect()
}

fn coeff(v: &Vector, m: &[usize]) -> f64 {
    v.iter()
        .find(|(k, _)| k.as_slice() == m)
        .map_or(0.0, |(_, a)| *a)
}

/// `|m⟩ ↦ Σ_z |b_z⟩⟨b_z|m⟩ ⊗ |z⟩` plus the orthogonal remainder under one
/// extra record `z = basis.len()`. The record is appended to every key.
pub fn measure(amps: &Amps, on: &[usize], basis: &[Vector]) -> Amps {
    let rest = basis.len();
    let mut out = Amps::new();
    for (key, &a) in amps {
        let m: Key = on.iter().map(|&p| key[p]).collect();
        let mut with = |local: &[usize], z: usize, amp: f64| {
            let mut k = key.clone();
            for (p, v) in on.iter().zip(local) {
                k[*p] = *v;
            }
            k.push(z);
            add(&mut out, k, amp);
        };
        with(&m, rest, a);
        for (z, b) in basis.iter().enumerate() {
            let c = coeff(b, &m);
            if c == 0.0 {
                continue;
            }
            for (local, bm) in b {
                with(local, z, a * bm * c);
                with(local, rest, -a * bm * c);
            }
        }
    }
    prune(out)
}

/// Computational-basis copy of a `dim`-level subsystem.
pub fn copy(amps: &Amps, pos: usize, dim: usize) -> Amps {
    let basis: Vec<Vector> = (0..dim).map(|i| vec![(vec![i], 1.0)]).collect();
    measure(amps, &[pos], &basis)
}

pub fn probability(amps: &Amps, pred: impl Fn(&Key) -> bool) -> f64 {
    amps.iter()
        .filter(|(k, _)| pred(k))
        .map(|(_, a)| a * a)
        .sum()
}

pub fn norm(amps: &Amps) -> f64 {
    probability(amps, |_| true)
}

// Index conventions for the four-agent protocol.
pub const C: usize = 0;
pub const F1: usize = 1;
pub const S: usize = 2;
pub const F2: usize = 3;
pub const A: usize = 4;
pub const W: usize = 5;
pub const HEADS: usize = 0;
pub const TAILS: usize = 1;
pub const UP: usize = 0;
pub const DOWN: usize = 1;
pub const A_F: usize = 0;
pub const A_O: usize = 1;
pub const W_F: usize = 0;
pub const W_O: usize = 1;

pub fn coin() -> Amps {
    Amps::from([
        (vec![HEADS], (1.0f64 / 3.0).sqrt()),
        (vec![TAILS], (2.0f64 / 3.0).sqrt()),
    ])
}

/// Runs the protocol from a coin state through `stages` stages
/// (1: F1 measures and prepares, 2: F2, 3: A, 4: W).
pub fn fr(initial: Amps, stages: usize) -> Amps {
    let mut amps = copy(&initial, C, 2);
    let mut prepared = Amps::new();
    for (key, a) in &amps {
        let push = |out: &mut Amps, s: usize, amp: f64| {
            let mut k = key.clone();
            k.push(s);
            add(out, k, amp);
        };
        if key[F1] == HEADS {
            push(&mut prepared, DOWN, *a);
        } else {
            push(&mut prepared, DOWN, a * R);
            push(&mut prepared, UP, a * R);
        }
    }
    amps = prune(prepared);
    if stages >= 2 {
        amps = copy(&amps, S, 2);
    }
    if stages >= 3 {
        let f = vec![(vec![HEADS, HEADS], R), (vec![TAILS, TAILS], R)];
        let o = vec![(vec![HEADS, HEADS], R), (vec![TAILS, TAILS], -R)];
        amps = measure(&amps, &[C, F1], &[f, o]);
    }
    if stages >= 4 {
        let f = vec![(vec![DOWN, DOWN], R), (vec![UP, UP], R)];
        let o = vec![(vec![DOWN, DOWN], R), (vec![UP, UP], -R)];
        amps = measure(&amps, &[S, F2], &[f, o]);
    }
    amps
}

/// `P(target = t | given = g)` as a map `(g, t) → p`, absent `g` omitted.
pub fn conditional(amps: &Amps, target: usize, given: usize) -> BTreeMap<(usize, usize), f64> {
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut marg: BTreeMap<usize, f64> = BTreeMap::new();
    for (k, a) in amps {
        *joint.entry((k[given], k[target])).or_insert(0.0) += a * a;
        *marg.entry(k[given]).or_insert(0.0) += a * a;
    }
    joint
        .into_iter()
        .filter(|((g, _), _)| marg[g] > 1e-12)
        .map(|((g, t), p)| ((g, t), p / marg[&g]))
        .collect()
}

/// Coin restricted to one face and renormalized: the collapsed first friend.
pub fn collapsed_coin(face: usize) -> Amps {
    let c = coin();
    let p = c[&vec![face]];
    Amps::from([(vec![face], p / p.abs())])
}

/// Two-party experiment: spin `(↑+↓)/√2`, friend copies it, Wigner
/// measures `(S, F)` in the product or `±` basis.
pub fn wigner_friend(product: bool) -> Amps {
    let spin = Amps::from([(vec![UP], R), (vec![DOWN], R)]);
    wigner_after_friend(copy(&spin, 0, 2), product)
}

pub fn wigner_after_friend(spin_friend: Amps, product: bool) -> Amps {
    let basis = if product {
        vec![vec![(vec![UP, UP], 1.0)], vec![(vec![DOWN, DOWN], 1.0)]]
    } else {
        vec![
            vec![(vec![UP, UP], R), (vec![DOWN, DOWN], R)],
            vec![(vec![UP, UP], R), (vec![DOWN, DOWN], -R)],
        ]
    };
    measure(&spin_friend, &[0, 1], &basis)
}

/// Sparse matrix keyed by `((f, w), (f', w'))`.
pub type Density = BTreeMap<((usize, usize), (usize, usize)), f64>;

/// `ρ[(f, w), (f', w')] = Σ_s ψ(s, f, w) ψ(s, f', w')`.
pub fn memory_density(amps: &Amps) -> Density {
    let mut out = BTreeMap::new();
    for (k, a) in amps {
        for (l, b) in amps {
            if k[0] == l[0] {
                *out.entry(((k[1], k[2]), (l[1], l[2]))).or_insert(0.0) += a * b;
            }
        }
    }
    out
}
