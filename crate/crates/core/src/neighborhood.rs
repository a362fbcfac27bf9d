//! Insertion, transpose and exchange move operators.
//!
//! Insertion `(a, b)` removes the job at position `a` and reinserts it so
//! that it ends at position `b`.  Since insertion `(a, a + 1)` and
//! `(a + 1, a)` yield the same neighbor, the canonical set drops the
//! `b = a + 1` form, leaving exactly `(N - 1)^2` distinct neighbors.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Insertion,
    Transpose,
    Exchange,
}

impl FromStr for MoveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "insertion" => Ok(MoveKind::Insertion),
            "transpose" => Ok(MoveKind::Transpose),
            "exchange" => Ok(MoveKind::Exchange),
            other => Err(Error::Config(format!("unknown move kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub a: usize,
    pub b: usize,
}

impl Move {
    pub fn insertion(a: usize, b: usize) -> Self {
        Self { kind: MoveKind::Insertion, a, b }
    }

    pub fn transpose(a: usize) -> Self {
        Self { kind: MoveKind::Transpose, a, b: a + 1 }
    }

    pub fn exchange(a: usize, b: usize) -> Self {
        Self { kind: MoveKind::Exchange, a: a.min(b), b: a.max(b) }
    }

    /// The move that undoes this one.
    pub fn inverse(self) -> Self {
        match self.kind {
            MoveKind::Insertion => Move::insertion(self.b, self.a),
            MoveKind::Transpose | MoveKind::Exchange => self,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let ok = self.a < n
            && self.b < n
            && match self.kind {
                MoveKind::Insertion => self.a != self.b,
                MoveKind::Transpose => self.b == self.a + 1,
                MoveKind::Exchange => self.a < self.b,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::Contract(format!("{self} is not a valid move on {n} jobs")))
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            MoveKind::Insertion => "insertion",
            MoveKind::Transpose => "transpose",
            MoveKind::Exchange => "exchange",
        };
        write!(f, "{name}({}, {})", self.a, self.b)
    }
}

/// True when insertion `(a, b)` belongs to the deduplicated neighbor set.
#[inline]
pub fn is_canonical_insertion(a: usize, b: usize) -> bool {
    a != b && b != a + 1
}

pub fn apply_move(perm: &Permutation, mv: Move) -> Result<Permutation> {
    let mut out = perm.clone();
    apply_move_in_place(&mut out, mv)?;
    Ok(out)
}

pub fn apply_move_in_place(perm: &mut Permutation, mv: Move) -> Result<()> {
    mv.validate(perm.len())?;
    let v = perm.as_mut_vec();
    match mv.kind {
        MoveKind::Insertion => {
            if mv.a < mv.b {
                v[mv.a..=mv.b].rotate_left(1);
            } else {
                v[mv.b..=mv.a].rotate_right(1);
            }
        }
        MoveKind::Transpose | MoveKind::Exchange => v.swap(mv.a, mv.b),
    }
    Ok(())
}

/// Canonical insertion moves, `a` ascending then `b` ascending.
pub fn enumerate_insertion_moves(n: usize) -> Vec<Move> {
    if n < 2 {
        return Vec::new();
    }
    let mut moves = Vec::with_capacity((n - 1) * (n - 1));
    for a in 0..n {
        for b in 0..n {
            if is_canonical_insertion(a, b) {
                moves.push(Move::insertion(a, b));
            }
        }
    }
    moves
}

/// Uniform draw from the canonical move set of `kind`.
pub fn random_move<R: Rng + ?Sized>(kind: MoveKind, n: usize, rng: &mut R) -> Move {
    assert!(n >= 2, "moves need at least two jobs");
    match kind {
        MoveKind::Insertion => loop {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if is_canonical_insertion(a, b) {
                return Move::insertion(a, b);
            }
        },
        MoveKind::Transpose => Move::transpose(rng.random_range(0..n - 1)),
        MoveKind::Exchange => {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            Move::exchange(a, b)
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeSet, HashMap};

    use super::*;
    use crate::rng::search_rng;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    /// All distinct permutations reachable by any remove/reinsert pair.
    fn materialize(perm: &Permutation) -> BTreeSet<Vec<usize>> {
        let n = perm.len();
        let mut set = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                let mut v = perm.as_slice().to_vec();
                let job = v.remove(i);
                v.insert(j, job);
                if v != perm.as_slice() {
                    set.insert(v);
                }
            }
        }
        set
    }

    #[test]
    fn insertion_shifts_intermediate_jobs() {
        let r = apply_move(&p(&[0, 1, 2, 3]), Move::insertion(0, 2)).unwrap();
        assert_eq!(r.as_slice(), &[1, 2, 0, 3]);
        let r = apply_move(&p(&[0, 1, 2, 3]), Move::insertion(3, 1)).unwrap();
        assert_eq!(r.as_slice(), &[0, 3, 1, 2]);
    }

    #[test]
    fn transpose_and_exchange() {
        assert_eq!(apply_move(&p(&[0, 1]), Move::transpose(0)).unwrap().as_slice(), &[1, 0]);
        assert_eq!(apply_move(&p(&[0, 1, 2]), Move::exchange(0, 2)).unwrap().as_slice(), &[2, 1, 0]);
    }

    #[test]
    fn out_of_range_moves_rejected() {
        assert!(apply_move(&p(&[0, 1]), Move::insertion(0, 2)).is_err());
        assert!(apply_move(&p(&[0, 1]), Move::insertion(1, 1)).is_err());
        assert!(apply_move(&p(&[0, 1]), Move::transpose(1)).is_err());
        assert!(apply_move(&p(&[0, 1]), Move { kind: MoveKind::Exchange, a: 1, b: 0 }).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_insertion_moves(20).len(), 361);
        assert_eq!(enumerate_insertion_moves(2).len(), 1);
        assert!(enumerate_insertion_moves(1).is_empty());
        let moves = enumerate_insertion_moves(5);
        let mut sorted = moves.clone();
        sorted.sort_by_key(|m| (m.a, m.b));
        assert_eq!(moves, sorted);
    }

    #[test]
    fn canonical_moves_cover_all_distinct_neighbors() {
        for n in 2..=8 {
            let id = Permutation::identity(n);
            let reached: BTreeSet<Vec<usize>> = enumerate_insertion_moves(n)
                .into_iter()
                .map(|m| apply_move(&id, m).unwrap().into_vec())
                .collect();
            assert_eq!(reached.len(), (n - 1) * (n - 1), "n={n}");
            assert_eq!(reached, materialize(&id), "n={n}");
        }
    }

    #[test]
    fn insertion_neighborhood_is_symmetric() {
        let mut rng = search_rng(4);
        for n in 2..=6 {
            let s = Permutation::random(n, &mut rng);
            for nb in materialize(&s) {
                let back = materialize(&Permutation::new(nb).unwrap());
                assert!(back.contains(s.as_slice()));
            }
        }
    }

    #[test]
    fn transpose_neighbors_are_insertion_neighbors() {
        for n in 2..=6 {
            let id = Permutation::identity(n);
            let ins = materialize(&id);
            for a in 0..n - 1 {
                let t = apply_move(&id, Move::transpose(a)).unwrap();
                assert!(ins.contains(t.as_slice()));
            }
        }
    }

    #[test]
    fn inverse_restores_original() {
        let mut rng = search_rng(9);
        let s = Permutation::random(7, &mut rng);
        for kind in [MoveKind::Insertion, MoveKind::Transpose, MoveKind::Exchange] {
            for _ in 0..50 {
                let m = random_move(kind, 7, &mut rng);
                let there = apply_move(&s, m).unwrap();
                assert_eq!(apply_move(&there, m.inverse()).unwrap(), s);
            }
        }
    }

    #[test]
    fn random_transpose_on_two_jobs() {
        let mut rng = search_rng(0);
        for _ in 0..20 {
            assert_eq!(random_move(MoveKind::Transpose, 2, &mut rng).a, 0);
        }
    }

    #[test]
    fn random_exchange_is_uniform() {
        let mut rng = search_rng(17);
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        let draws = 100_000;
        for _ in 0..draws {
            let m = random_move(MoveKind::Exchange, 3, &mut rng);
            *counts.entry((m.a, m.b)).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        let expected = draws as f64 / 3.0;
        for (&k, &c) in &counts {
            assert!(((c as f64) - expected).abs() / expected < 0.05, "{k:?}: {c}");
        }
    }

    #[test]
    fn random_insertion_is_canonical() {
        let mut rng = search_rng(5);
        let all: BTreeSet<(usize, usize)> =
            enumerate_insertion_moves(20).iter().map(|m| (m.a, m.b)).collect();
        for _ in 0..1000 {
            let m = random_move(MoveKind::Insertion, 20, &mut rng);
            assert!(all.contains(&(m.a, m.b)));
        }
    }

    #[test]
    fn random_moves_are_seed_deterministic() {
        let a: Vec<Move> = {
            let mut r = search_rng(3);
            (0..20).map(|_| random_move(MoveKind::Insertion, 9, &mut r)).collect()
        };
        let b: Vec<Move> = {
            let mut r = search_rng(3);
            (0..20).map(|_| random_move(MoveKind::Insertion, 9, &mut r)).collect()
        };
        assert_eq!(a, b);
    }
}
