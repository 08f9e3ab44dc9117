//! Finite abelian groups, their characters, class functions, induction and the
//! standard pairing.
//!
//! Groups are presented by invariant factors; elements are exponent vectors.
//! All values are exact cyclotomic numbers, so orthogonality and Frobenius
//! reciprocity hold on the nose.

use std::collections::BTreeSet;
use std::fmt;

use crate::cyclotomic::Cyc;
use crate::error::{CoreError, CoreResult};
use crate::rat::Rat;

/// G = Z/n_1 x ... x Z/n_k as invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupDesc {
    factors: Vec<u64>,
}

/// Element of a `GroupDesc`: exponent vector, componentwise mod n_i.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElem(pub Vec<u64>);

/// A subgroup, stored by its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub elements: Vec<GroupElem>,
}

impl GroupDesc {
    pub fn new(factors: Vec<u64>) -> CoreResult<Self> {
        if factors.iter().any(|&n| n == 0) {
            return Err(CoreError::Domain("zero invariant factor".into()));
        }
        Ok(GroupDesc { factors })
    }

    pub fn trivial() -> Self {
        GroupDesc { factors: vec![1] }
    }

    pub fn cyclic(n: u64) -> Self {
        GroupDesc { factors: vec![n] }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |acc, &n| num_integer::lcm(acc, n))
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem(vec![0; self.factors.len()])
    }

    pub fn add(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        GroupElem(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElem) -> GroupElem {
        GroupElem(
            a.0.iter()
                .zip(&self.factors)
                .map(|(x, n)| (n - x % n) % n)
                .collect(),
        )
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<GroupElem> {
        let mut out = vec![self.identity()];
        for (i, &n) in self.factors.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for e in &out {
                for v in 0..n {
                    let mut e2 = e.clone();
                    e2.0[i] = v;
                    next.push(e2);
                }
            }
            out = next;
        }
        out
    }

    pub fn index_of(&self, e: &GroupElem) -> usize {
        let mut idx = 0usize;
        for (x, &n) in e.0.iter().zip(&self.factors) {
            idx = idx * n as usize + (*x % n) as usize;
        }
        idx
    }

    /// Closure of a generating set.
    pub fn generated_subgroup(&self, gens: &[GroupElem]) -> Subgroup {
        let mut set: BTreeSet<GroupElem> = BTreeSet::new();
        set.insert(self.identity());
        let mut frontier: Vec<GroupElem> = vec![self.identity()];
        while let Some(e) = frontier.pop() {
            for g in gens {
                let f = self.add(&e, g);
                if set.insert(f.clone()) {
                    frontier.push(f);
                }
            }
        }
        Subgroup {
            elements: set.into_iter().collect(),
        }
    }

    /// Every subgroup, deduplicated, sorted by (order, elements). Subgroups of
    /// an abelian group of rank k need at most k generators.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let elems = self.elements();
        let rank = self.factors.len();
        let mut seen: BTreeSet<Vec<GroupElem>> = BTreeSet::new();
        let mut gens: Vec<GroupElem> = Vec::new();
        self.subgroup_search(&elems, rank, &mut gens, &mut seen);
        let mut out: Vec<Subgroup> = seen
            .into_iter()
            .map(|elements| Subgroup { elements })
            .collect();
        out.sort_by_key(|h| (h.elements.len(), h.elements.clone()));
        out
    }

    fn subgroup_search(
        &self,
        elems: &[GroupElem],
        depth: usize,
        gens: &mut Vec<GroupElem>,
        seen: &mut BTreeSet<Vec<GroupElem>>,
    ) {
        seen.insert(self.generated_subgroup(gens).elements);
        if depth == 0 {
            return;
        }
        for e in elems {
            gens.push(e.clone());
            self.subgroup_search(elems, depth - 1, gens, seen);
            gens.pop();
        }
    }

    /// All one-dimensional characters, exact, in lexicographic index order.
    pub fn characters(&self) -> Vec<ClassFun> {
        let n_exp = self.exponent();
        let indices = self.elements(); // index vectors have the same shape
        indices
            .iter()
            .map(|j| {
                let values = self
                    .elements()
                    .iter()
                    .map(|s| {
                        let mut k = 0u64;
                        for ((ji, si), &ni) in j.0.iter().zip(&s.0).zip(&self.factors) {
                            k = (k + ji * si % ni * (n_exp / ni)) % n_exp;
                        }
                        Cyc::root_of_unity(n_exp, k)
                    })
                    .collect();
                ClassFun {
                    group: self.clone(),
                    values,
                }
            })
            .collect()
    }

    /// Character of the regular representation.
    pub fn regular_character(&self) -> ClassFun {
        let mut f = ClassFun::zero(self);
        let order = Rat::int(self.order() as i64);
        let idx = self.index_of(&self.identity());
        f.values[idx] = Cyc::from_rat(self.exponent(), order);
        f
    }

    pub fn trivial_character(&self) -> ClassFun {
        ClassFun::constant(self, Rat::one())
    }

    /// Character of the permutation representation Q[G/H].
    pub fn permutation_character(&self, h: &Subgroup) -> ClassFun {
        let ratio = Rat::int((self.order() / h.order()) as i64);
        let mut f = ClassFun::zero(self);
        for e in &h.elements {
            let idx = self.index_of(e);
            f.values[idx] = Cyc::from_rat(self.exponent(), ratio.clone());
        }
        f
    }
}

impl Subgroup {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, e: &GroupElem) -> bool {
        self.elements.binary_search(e).is_ok()
    }
}

/// Exact class function on a finite abelian group, indexed by element rank.
#[derive(Clone, PartialEq, Eq)]
pub struct ClassFun {
    group: GroupDesc,
    values: Vec<Cyc>,
}

impl ClassFun {
    pub fn zero(group: &GroupDesc) -> Self {
        let n = group.exponent();
        ClassFun {
            group: group.clone(),
            values: vec![Cyc::zero(n); group.order() as usize],
        }
    }

    pub fn constant(group: &GroupDesc, r: Rat) -> Self {
        let n = group.exponent();
        ClassFun {
            group: group.clone(),
            values: vec![Cyc::from_rat(n, r); group.order() as usize],
        }
    }

    pub fn group(&self) -> &GroupDesc {
        &self.group
    }

    pub fn value(&self, e: &GroupElem) -> &Cyc {
        &self.values[self.group.index_of(e)]
    }

    pub fn set_value(&mut self, e: &GroupElem, v: Cyc) {
        let idx = self.group.index_of(e);
        self.values[idx] = v;
    }

    pub fn set_rat(&mut self, e: &GroupElem, r: Rat) {
        let n = self.group.exponent();
        self.set_value(e, Cyc::from_rat(n, r));
    }

    pub fn add(&self, other: &Self) -> CoreResult<Self> {
        self.assert_group(other)?;
        Ok(ClassFun {
            group: self.group.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> CoreResult<Self> {
        self.assert_group(other)?;
        Ok(ClassFun {
            group: self.group.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    pub fn scale(&self, r: &Rat) -> Self {
        ClassFun {
            group: self.group.clone(),
            values: self.values.iter().map(|v| v.scale(r)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    fn assert_group(&self, other: &Self) -> CoreResult<()> {
        if self.group != other.group {
            return Err(CoreError::Domain("class functions on different groups".into()));
        }
        Ok(())
    }

    /// `(1/|G|) sum_s f(s) conj(g(s))`.
    pub fn pairing(&self, other: &Self) -> CoreResult<Cyc> {
        self.assert_group(other)?;
        let n = self.group.exponent();
        let mut acc = Cyc::zero(n);
        for (a, b) in self.values.iter().zip(&other.values) {
            acc = acc.add(&a.mul(&b.conj()));
        }
        let inv_order = Rat::new(1, self.group.order() as i64);
        Ok(acc.scale(&inv_order))
    }

    /// Pairing that must land in Q; errors when it does not.
    pub fn pairing_rat(&self, other: &Self) -> CoreResult<Rat> {
        let c = self.pairing(other)?;
        c.as_rat().ok_or_else(|| {
            CoreError::ModelError("pairing expected to be rational".into())
        })
    }

    /// Restriction to a subgroup, as (element, value) pairs.
    pub fn restrict(&self, h: &Subgroup) -> Vec<(GroupElem, Cyc)> {
        h.elements
            .iter()
            .map(|e| (e.clone(), self.value(e).clone()))
            .collect()
    }
}

/// Induction of a class function from a subgroup, by the general sum
/// `(Ind f)(s) = (1/|H|) sum_{g in G, g s g^-1 in H} f(g s g^-1)`; for abelian
/// G the conjugation is trivial but the sum is kept verbatim.
pub fn induce(group: &GroupDesc, h: &Subgroup, f: &[(GroupElem, Cyc)]) -> CoreResult<ClassFun> {
    for (e, _) in f {
        if !h.contains(e) {
            return Err(CoreError::Domain("induced function not supported on H".into()));
        }
    }
    let lookup = |e: &GroupElem| -> Option<&Cyc> {
        f.iter().find(|(x, _)| x == e).map(|(_, v)| v)
    };
    let n = group.exponent();
    let mut out = ClassFun::zero(group);
    let inv_h = Rat::new(1, h.order() as i64);
    for s in group.elements() {
        let mut acc = Cyc::zero(n);
        for _g in group.elements() {
            // abelian: g s g^-1 = s
            if h.contains(&s) {
                if let Some(v) = lookup(&s) {
                    acc = acc.add(v);
                }
            }
        }
        out.set_value(&s, acc.scale(&inv_h));
    }
    Ok(out)
}

impl fmt::Debug for ClassFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClassFun[")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:?}")?;
        }
        write!(f, "]")
    }
}
