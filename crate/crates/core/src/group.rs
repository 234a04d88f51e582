//! Finite groups presented by Cayley tables.
//!
//! Every group in this crate is a [`FiniteGroup`]: elements are the indices
//! `0..order`, element `0` is the identity, and multiplication is a table
//! lookup. Constructors for the usual small families live here too, so that
//! the cohomology and representation code never needs anything beyond the
//! table.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite group stored as a flat Cayley table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("abelian", &self.is_abelian())
            .finish()
    }
}

/// Invariant factors `d_1 | d_2 | ... | d_r` of a finite abelian group.
///
/// The empty list is the trivial group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AbelianInvariants {
    pub factors: Vec<u64>,
}

impl AbelianInvariants {
    pub fn trivial() -> Self {
        Self { factors: Vec::new() }
    }

    /// Canonical invariant factors of `Z/c_1 ⊕ ... ⊕ Z/c_k` for arbitrary
    /// cyclic orders (zeros and ones are ignored).
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let mut prime_parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &c in orders {
            if c <= 1 {
                continue;
            }
            for (p, e) in factorize(c) {
                prime_parts.entry(p).or_default().push(e);
            }
        }
        Self::from_prime_parts(prime_parts)
    }

    fn from_prime_parts(mut prime_parts: BTreeMap<u64, Vec<u32>>) -> Self {
        let rank = prime_parts.values().map(Vec::len).max().unwrap_or(0);
        for exps in prime_parts.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        // factor k (counted from the largest) collects the k-th largest
        // exponent of every prime
        let mut factors: Vec<u64> = (0..rank)
            .map(|k| {
                prime_parts
                    .iter()
                    .map(|(&p, exps)| exps.get(k).map_or(1, |&e| p.pow(e)))
                    .product()
            })
            .collect();
        factors.reverse();
        Self { factors }
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Returns true when the divisibility chain holds and all factors are at
    /// least 2.
    pub fn is_canonical(&self) -> bool {
        self.factors.iter().all(|&d| d >= 2)
            && self.factors.windows(2).all(|w| w[1] % w[0] == 0)
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl FiniteGroup {
    /// Validates a Cayley table and builds the group. When the identity is
    /// not at index 0 the elements are relabelled; use
    /// [`FiniteGroup::from_cayley_table_with_relabel`] to see the permutation.
    pub fn from_cayley_table(table: &[Vec<usize>]) -> Result<Self> {
        Self::from_cayley_table_with_relabel(table).map(|(g, _)| g)
    }

    /// Like [`FiniteGroup::from_cayley_table`], also returning `perm` with
    /// `perm[old] = new` whenever a relabelling was needed.
    pub fn from_cayley_table_with_relabel(
        table: &[Vec<usize>],
    ) -> Result<(Self, Option<Vec<usize>>)> {
        let n = table.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotAGroup(format!(
                    "row {g} has length {} but the table has {n} rows",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(Error::NotAGroup(format!(
                    "entry {bad} in row {g} is out of range [0, {n})"
                )));
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        for g in 0..n {
            let count = (0..n)
                .filter(|&h| table[g][h] == e && table[h][g] == e)
                .count();
            if count != 1 {
                return Err(Error::NotAGroup(format!("no inverse for element {g}")));
            }
        }
        if let Some(g) = (0..n).find(|&g| table[g][e] != g) {
            return Err(Error::NotAGroup(format!(
                "identity law fails: {g} * {e} = {}",
                table[g][e]
            )));
        }
        for g in 0..n {
            for h in 0..n {
                let gh = table[g][h];
                for k in 0..n {
                    if table[gh][k] != table[g][table[h][k]] {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails at ({g}, {h}, {k})"
                        )));
                    }
                }
            }
        }
        let perm: Vec<usize> = (0..n)
            .map(|x| {
                if x == e {
                    0
                } else if x == 0 {
                    e
                } else {
                    x
                }
            })
            .collect();
        let mut flat = vec![0; n * n];
        for g in 0..n {
            for h in 0..n {
                flat[perm[g] * n + perm[h]] = perm[table[g][h]];
            }
        }
        let group = Self::from_flat_unchecked(n, flat);
        Ok((group, (e != 0).then_some(perm)))
    }

    fn from_flat_unchecked(order: usize, table: Vec<usize>) -> Self {
        let mut inverse = vec![0; order];
        for g in 0..order {
            inverse[g] = (0..order)
                .find(|&h| table[g * order + h] == 0)
                .expect("validated table has inverses");
        }
        Self { order, table, inverse }
    }

    /// Builds a group from a multiplication rule on `0..order`, validating
    /// the result.
    pub fn from_mul_fn(order: usize, mul: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let rows: Vec<Vec<usize>> = (0..order)
            .map(|g| (0..order).map(|h| mul(g, h)).collect())
            .collect();
        Self::from_cayley_table(&rows)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z/n` with `g * h = (g + h) mod n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group needs n >= 1");
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        Self::from_flat_unchecked(n, table)
    }

    /// Componentwise product; `(g, h)` has index `g * |H| + h`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (m, k) = (g.order, h.order);
        let n = m * k;
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let (a1, a2) = (a / k, a % k);
                let (b1, b2) = (b / k, b % k);
                table[a * n + b] = g.mul(a1, b1) * k + h.mul(a2, b2);
            }
        }
        Self::from_flat_unchecked(n, table)
    }

    /// `⟨a, x | a^n = 1, x^2 = a^s, x a x^{-1} = a^r⟩`, element `a^k x^j`
    /// at index `k + n j`.
    pub fn metacyclic(n: usize, r: usize, s: usize) -> Result<Self> {
        let rr = r % n;
        let pow_r = |j: usize| if j == 0 { 1 } else { rr };
        Self::from_mul_fn(2 * n, |g, h| {
            let (k, j) = (g % n, g / n);
            let (l, m) = (h % n, h / n);
            let mut e = k + l * pow_r(j);
            let mut t = j + m;
            if t == 2 {
                e += s;
                t = 0;
            }
            e % n + n * t
        })
    }

    /// Dihedral group of order `2n`.
    pub fn dihedral(n: usize) -> Self {
        Self::metacyclic(n, n - 1, 0).expect("dihedral presentation is valid")
    }

    /// Dicyclic group of order `4n` (`n = 2` gives the quaternion group).
    pub fn dicyclic(n: usize) -> Self {
        Self::metacyclic(2 * n, 2 * n - 1, n).expect("dicyclic presentation is valid")
    }

    /// Closure of a set of permutations of `0..degree` under composition,
    /// `(p q)(x) = p(q(x))`.
    pub fn from_permutation_generators(gens: &[Vec<usize>]) -> Result<Self> {
        let degree = gens.first().map_or(0, Vec::len);
        let identity: Vec<usize> = (0..degree).collect();
        let mut elements = vec![identity.clone()];
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        index.insert(identity, 0);
        let mut queue = VecDeque::from([0usize]);
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&x| p[x]).collect() };
        while let Some(i) = queue.pop_front() {
            for s in gens {
                let next = compose(s, &elements[i]);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(next);
                }
            }
        }
        let n = elements.len();
        let rows: Vec<Vec<usize>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| index[&compose(&elements[a], &elements[b])])
                    .collect()
            })
            .collect();
        Self::from_cayley_table(&rows)
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            let mut t: Vec<usize> = (0..n).collect();
            t.swap(0, 1);
            gens.push(t);
            gens.push((0..n).map(|i| (i + 1) % n).collect());
        } else {
            gens.push((0..n).collect());
        }
        Self::from_permutation_generators(&gens).expect("permutations form a group")
    }

    /// Alternating group on 4 points.
    pub fn alternating4() -> Self {
        Self::from_permutation_generators(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]])
            .expect("permutations form a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order + h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// The table as nested rows, in the file-format layout.
    pub fn cayley_table(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|g| self.elements().all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    pub fn commutes(&self, g: usize, h: usize) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        self.elements()
            .map(|g| self.element_order(g))
            .fold(1, |a, b| a.lcm(&b))
    }

    pub fn conjugate(&self, g: usize, by: usize) -> usize {
        self.mul(self.mul(by, g), self.inv(by))
    }

    /// Conjugacy classes, each sorted, listed by smallest element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut classes = Vec::new();
        for g in self.elements() {
            if seen[g] {
                continue;
            }
            let mut class: Vec<usize> = self.elements().map(|x| self.conjugate(g, x)).collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c] = true;
            }
            classes.push(class);
        }
        classes
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order];
        inside[0] = true;
        let mut members = vec![0];
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !inside[y] {
                    inside[y] = true;
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
        members.sort_unstable();
        members
    }

    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let comms: Vec<usize> = self
            .elements()
            .flat_map(|g| {
                self.elements().map(move |h| {
                    self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))
                })
            })
            .collect();
        self.generated_subgroup(&comms)
    }

    /// Invariant factors of `G / [G, G]`.
    pub fn abelianization(&self) -> AbelianInvariants {
        let derived = self.commutator_subgroup();
        let mut in_derived = vec![false; self.order];
        for &d in &derived {
            in_derived[d] = true;
        }
        // coset representatives: smallest element of each coset g[G,G]
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for g in self.elements() {
            if coset_of[g] != usize::MAX {
                continue;
            }
            for &d in &derived {
                coset_of[self.mul(g, d)] = reps.len();
            }
            reps.push(g);
        }
        // p-primary structure from element-order counts in the quotient
        let quotient_order = reps.len() as u64;
        let quotient_element_order = |g: usize| -> u64 {
            let mut x = g;
            let mut k = 1u64;
            while !in_derived[x] {
                x = self.mul(x, g);
                k += 1;
            }
            k
        };
        let orders: Vec<u64> = reps.iter().map(|&g| quotient_element_order(g)).collect();
        let mut prime_parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for (p, total) in factorize(quotient_order) {
            // s_k = log_p #{x : x^(p^k) = 1}; s_k - s_{k-1} = #{cyclic factors with exponent >= k}
            let mut prev = 0u32;
            let mut at_least = vec![0u32; total as usize + 1];
            for k in 1..=total {
                let pk = p.pow(k);
                let n_k = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
                let s_k = n_k.ilog(p);
                at_least[k as usize - 1] = s_k - prev;
                prev = s_k;
            }
            let mut exps = Vec::new();
            for k in 1..=total as usize {
                let exactly = at_least[k - 1] - at_least[k];
                exps.extend(std::iter::repeat_n(k as u32, exactly as usize));
            }
            prime_parts.insert(p, exps);
        }
        AbelianInvariants::from_prime_parts(prime_parts)
    }
}

/// The small-group corpus used by tests, examples and the acceptance suite:
/// one presentation per isomorphism type listed, all of order at most 16.
pub fn small_group_corpus() -> Vec<(String, FiniteGroup)> {
    let c = FiniteGroup::cyclic;
    let x = |a: &FiniteGroup, b: &FiniteGroup| FiniteGroup::direct_product(a, b);
    let mut out: Vec<(String, FiniteGroup)> = (1..=16).map(|n| (format!("Z{n}"), c(n))).collect();
    let named = [
        ("Z2xZ2", x(&c(2), &c(2))),
        ("Z2xZ4", x(&c(2), &c(4))),
        ("Z2xZ2xZ2", x(&x(&c(2), &c(2)), &c(2))),
        ("Z3xZ3", x(&c(3), &c(3))),
        ("Z2xZ6", x(&c(2), &c(6))),
        ("Z4xZ4", x(&c(4), &c(4))),
        ("Z2xZ8", x(&c(2), &c(8))),
        ("Z2xZ2xZ4", x(&x(&c(2), &c(2)), &c(4))),
        ("Z2^4", x(&x(&c(2), &c(2)), &x(&c(2), &c(2)))),
        ("S3", FiniteGroup::symmetric(3)),
        ("D4", FiniteGroup::dihedral(4)),
        ("Q8", FiniteGroup::dicyclic(2)),
        ("D5", FiniteGroup::dihedral(5)),
        ("D6", FiniteGroup::dihedral(6)),
        ("Dic3", FiniteGroup::dicyclic(3)),
        ("A4", FiniteGroup::alternating4()),
        ("D7", FiniteGroup::dihedral(7)),
        ("D8", FiniteGroup::dihedral(8)),
        ("Q16", FiniteGroup::dicyclic(4)),
        ("SD16", FiniteGroup::metacyclic(8, 3, 0).expect("semidihedral")),
        ("M16", FiniteGroup::metacyclic(8, 5, 0).expect("modular group")),
        ("Z2xD4", x(&c(2), &FiniteGroup::dihedral(4))),
        ("Z2xQ8", x(&c(2), &FiniteGroup::dicyclic(2))),
    ];
    out.extend(named.into_iter().map(|(n, g)| (n.to_string(), g)));
    out
}
