use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use super::MonodromyError;

/// A permutation of the sheets `{1..m}`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Self {
            images: (0..m).collect(),
        }
    }

    /// From 1-based images, as printed.
    pub fn from_images(images: &[usize]) -> Result<Self, MonodromyError> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &i in images {
            if i == 0 || i > m || seen[i - 1] {
                return Err(MonodromyError::InvalidPermutation(format!(
                    "{images:?} is not a bijection of 1..{m}"
                )));
            }
            seen[i - 1] = true;
        }
        Ok(Self {
            images: images.iter().map(|i| i - 1).collect(),
        })
    }

    pub(crate) fn from_zero_based(images: Vec<usize>) -> Self {
        Self { images }
    }

    pub fn transposition(m: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(m);
        p.images.swap(a - 1, b - 1);
        p
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 1-based images.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    /// Image of the 1-based sheet `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Self) -> Self {
        Self {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Self { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_transposition(&self) -> bool {
        self.cycle_type() == [2]
    }

    /// Cycles of length at least two, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.images[i];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Lengths of the nontrivial cycles, descending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|i| i.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            images: Vec<usize>,
            cycles: String,
        }
        Repr {
            images: self.images(),
            cycles: self.to_string(),
        }
        .serialize(serializer)
    }
}

/// A count that is either known or beyond the enumeration cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capped<T> {
    Known(T),
    ExceedsCap,
}

impl<T: Copy> Capped<T> {
    pub fn known(&self) -> Option<T> {
        match self {
            Capped::Known(v) => Some(*v),
            Capped::ExceedsCap => None,
        }
    }
}

impl<T: Serialize> Serialize for Capped<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Capped::Known(v) => v.serialize(serializer),
            Capped::ExceedsCap => serializer.serialize_str("exceeds cap"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    SymmetricGroup,
    Subgroup,
    Inconclusive,
}

pub const SOLVABILITY_NOTE: &str =
    "solvability is decided by the derived series of the enumerated finite group";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupReport {
    pub m: usize,
    pub generators: Vec<Permutation>,
    pub is_transitive: bool,
    pub all_transpositions: bool,
    pub order: Capped<u64>,
    pub equals_symmetric: bool,
    pub solvable: Capped<bool>,
    pub verdict: Verdict,
    pub note: &'static str,
}

pub const DEFAULT_ORDER_CAP: usize = 100_000;

pub fn factorial(m: usize) -> Option<u64> {
    (1..=m as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

/// Transitivity, the transposition criterion, the order by closure up to
/// `order_cap` elements and solvability by the derived series.
pub fn group_analyze(
    generators: &[Permutation],
    m: usize,
    order_cap: usize,
) -> Result<GroupReport, MonodromyError> {
    if let Some(g) = generators.iter().find(|g| g.degree() != m) {
        return Err(MonodromyError::InvalidPermutation(format!(
            "{g} acts on {} points, expected {m}",
            g.degree()
        )));
    }
    let is_transitive = transitive(generators, m);
    let all_transpositions =
        !generators.is_empty() && generators.iter().all(Permutation::is_transposition);
    let equals_symmetric = is_transitive && all_transpositions;

    let (order, solvable) = match closure(generators, m, order_cap) {
        Some(elements) => {
            let order = elements.len() as u64;
            (
                Capped::Known(order),
                Capped::Known(solvable(generators, m, order_cap)),
            )
        }
        None => (Capped::ExceedsCap, Capped::ExceedsCap),
    };
    let verdict = match order.known() {
        _ if equals_symmetric => Verdict::SymmetricGroup,
        Some(n) if Some(n) == factorial(m) => Verdict::SymmetricGroup,
        Some(_) => Verdict::Subgroup,
        None => Verdict::Inconclusive,
    };
    Ok(GroupReport {
        m,
        generators: generators.to_vec(),
        is_transitive,
        all_transpositions,
        order,
        equals_symmetric,
        solvable,
        verdict,
        note: SOLVABILITY_NOTE,
    })
}

fn transitive(generators: &[Permutation], m: usize) -> bool {
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for g in generators {
        for (i, &j) in g.images.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    let root = find(&mut parent, 0);
    (1..m).all(|i| find(&mut parent, i) == root)
}

/// All elements of the group generated by `generators`, or `None` past `cap`.
fn closure(generators: &[Permutation], m: usize, cap: usize) -> Option<HashSet<Permutation>> {
    let id = Permutation::identity(m);
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in generators {
            let q = p.then(g);
            if seen.insert(q.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(q);
            }
        }
    }
    Some(seen)
}

fn commutator(a: &Permutation, b: &Permutation) -> Permutation {
    a.inverse().then(&b.inverse()).then(a).then(b)
}

/// Generators of the normal closure of `seeds` in the group generated by
/// `ambient`, together with the closure's size.
fn normal_closure(
    seeds: Vec<Permutation>,
    ambient: &[Permutation],
    m: usize,
    cap: usize,
) -> Option<(Vec<Permutation>, usize)> {
    let mut gens: Vec<Permutation> = Vec::new();
    let mut elements = closure(&gens, m, cap)?;
    let mut pending: VecDeque<Permutation> = seeds.into();
    while let Some(c) = pending.pop_front() {
        if elements.contains(&c) {
            continue;
        }
        gens.push(c.clone());
        elements = closure(&gens, m, cap)?;
        for g in ambient {
            pending.push_back(g.inverse().then(&c).then(g));
        }
    }
    // conjugates of earlier generators were queued when each was added
    Some((gens, elements.len()))
}

fn solvable(generators: &[Permutation], m: usize, cap: usize) -> bool {
    let mut gens: Vec<Permutation> = generators
        .iter()
        .filter(|g| !g.is_identity())
        .cloned()
        .collect();
    let mut size = match closure(&gens, m, cap) {
        Some(e) => e.len(),
        None => return false,
    };
    loop {
        if size == 1 {
            return true;
        }
        let mut seeds = Vec::new();
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i + 1..] {
                seeds.push(commutator(a, b));
            }
        }
        let Some((next, next_size)) = normal_closure(seeds, &gens, m, cap) else {
            return false;
        };
        if next_size == size {
            return false;
        }
        gens = next;
        size = next_size;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(m: usize, a: usize, b: usize) -> Permutation {
        Permutation::transposition(m, a, b)
    }

    #[test]
    fn cycle_notation() {
        let p = Permutation::from_images(&[2, 3, 1, 4]).unwrap();
        assert_eq!(p.to_string(), "(1 2 3)");
        assert_eq!(p.cycle_type(), vec![3]);
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert!(p.then(&p.inverse()).is_identity());
        assert!(Permutation::from_images(&[1, 1]).is_err());
        assert_eq!(
            serde_json::to_string(&t(3, 1, 2)).unwrap(),
            r#"{"images":[2,1,3],"cycles":"(1 2)"}"#
        );
    }

    #[test]
    fn s3() {
        let r = group_analyze(&[t(3, 1, 2), t(3, 2, 3)], 3, DEFAULT_ORDER_CAP).unwrap();
        assert!(r.is_transitive && r.all_transpositions && r.equals_symmetric);
        assert_eq!(r.order, Capped::Known(6));
        assert_eq!(r.solvable, Capped::Known(true));
        assert_eq!(r.verdict, Verdict::SymmetricGroup);
    }

    #[test]
    fn intransitive() {
        let r = group_analyze(&[t(3, 1, 2)], 3, DEFAULT_ORDER_CAP).unwrap();
        assert!(!r.is_transitive);
        assert_eq!(r.verdict, Verdict::Subgroup);
        assert_eq!(r.order, Capped::Known(2));
    }

    #[test]
    fn s5_not_solvable() {
        let gens: Vec<_> = (1..5).map(|i| t(5, i, i + 1)).collect();
        let r = group_analyze(&gens, 5, DEFAULT_ORDER_CAP).unwrap();
        assert!(r.equals_symmetric);
        assert_eq!(r.order, Capped::Known(120));
        assert_eq!(r.solvable, Capped::Known(false));
    }

    #[test]
    fn s4_and_cyclic_solvable() {
        let gens: Vec<_> = (1..4).map(|i| t(4, i, i + 1)).collect();
        let r = group_analyze(&gens, 4, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(
            (r.order, r.solvable),
            (Capped::Known(24), Capped::Known(true))
        );
        let c5 = Permutation::from_images(&[2, 3, 4, 5, 1]).unwrap();
        let r = group_analyze(&[c5], 5, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(
            (r.order, r.solvable, r.verdict),
            (Capped::Known(5), Capped::Known(true), Verdict::Subgroup)
        );
        // A5 from 3-cycles is perfect
        let a = Permutation::from_images(&[2, 3, 1, 4, 5]).unwrap();
        let b = Permutation::from_images(&[1, 2, 4, 5, 3]).unwrap();
        let c = Permutation::from_images(&[1, 3, 4, 2, 5]).unwrap();
        let r = group_analyze(&[a, b, c], 5, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(
            (r.order, r.solvable),
            (Capped::Known(60), Capped::Known(false))
        );
    }

    #[test]
    fn cap_exceeded() {
        let gens: Vec<_> = (1..9).map(|i| t(9, i, i + 1)).collect();
        let r = group_analyze(&gens, 9, DEFAULT_ORDER_CAP).unwrap();
        assert_eq!(r.order, Capped::ExceedsCap);
        assert!(r.equals_symmetric);
        assert_eq!(r.verdict, Verdict::SymmetricGroup);
        let r = group_analyze(
            &[
                Permutation::from_images(&[2, 3, 4, 5, 6, 7, 8, 9, 1]).unwrap(),
                t(9, 1, 2),
            ],
            9,
            1000,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn wrong_degree() {
        assert!(matches!(
            group_analyze(&[t(3, 1, 2)], 4, 10),
            Err(MonodromyError::InvalidPermutation(_))
        ));
    }
}
