//! Permutation groups on `{0, .., n-1}`.
//!
//! Groups carry a Schreier-Sims stabilizer chain built once at construction.
//! The groups handled by this crate have order at most 51840, so element
//! enumeration through the chain is routinely used as a building block.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("group order {order} exceeds bound {bound}")]
    OrderBoundExceeded { order: u64, bound: u64 },
    #[error("not a subgroup")]
    NotASubgroup,
}

/// A permutation, stored by its list of images: `x -> images[x]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Perm {
    images: Vec<u32>,
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n as u32).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(PermError::NotAPermutation(n));
            }
            seen[x] = true;
        }
        Ok(Perm { images: images.into_iter().map(|x| x as u32).collect() })
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        for cyc in cycles {
            for (k, &x) in cyc.iter().enumerate() {
                if x >= n {
                    return Err(PermError::NotAPermutation(n));
                }
                images[x] = cyc[(k + 1) % cyc.len()];
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm { images: other.images.iter().map(|&x| self.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv }
    }

    pub fn pow(&self, mut e: u64) -> Perm {
        let mut base = self.clone();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut l = 1u64;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            l = num_integer::lcm(l, len);
        }
        l
    }

    /// `self ∘ h ∘ self^-1`.
    pub fn conjugate(&self, h: &Perm) -> Perm {
        self.compose(h).compose(&self.inverse())
    }

    pub fn first_moved_point(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i)
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &x)| *i as u32 == x).count()
    }

    pub fn commutes_with(&self, other: &Perm) -> bool {
        self.compose(other) == other.compose(self)
    }
}

#[derive(Clone, Debug)]
struct Level {
    base: usize,
    gens: Vec<Perm>,
    /// `transversal[x] = Some(u)` with `u(base) = x` for `x` in the basic orbit.
    transversal: Vec<Option<Perm>>,
    orbit: Vec<usize>,
}

impl Level {
    fn new(base: usize, n: usize) -> Self {
        let mut transversal = vec![None; n];
        transversal[base] = Some(Perm::identity(n));
        Level { base, gens: Vec::new(), transversal, orbit: vec![base] }
    }

    fn rebuild_orbit(&mut self) {
        let n = self.transversal.len();
        let mut transversal: Vec<Option<Perm>> = vec![None; n];
        transversal[self.base] = Some(Perm::identity(n));
        let mut orbit = vec![self.base];
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            let ux = transversal[x].clone().expect("orbit point has transversal");
            for g in &self.gens {
                let y = g.apply(x);
                if transversal[y].is_none() {
                    transversal[y] = Some(g.compose(&ux));
                    orbit.push(y);
                }
            }
            i += 1;
        }
        self.transversal = transversal;
        self.orbit = orbit;
    }
}

/// A permutation group with its stabilizer chain.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    levels: Vec<Level>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators.len())
            .finish()
    }
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, generators: Vec::new(), levels: Vec::new() }
    }

    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self, PermError> {
        Self::with_base(degree, generators, &[])
    }

    /// Builds the group with a prescribed prefix of base points.
    pub fn with_base(degree: usize, generators: Vec<Perm>, base: &[usize]) -> Result<Self, PermError> {
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch(g.degree(), degree));
            }
        }
        let mut gens: Vec<Perm> = generators.into_iter().filter(|g| !g.is_identity()).collect();
        gens.sort();
        gens.dedup();
        let mut grp = PermGroup { degree, generators: gens.clone(), levels: Vec::new() };
        for &b in base {
            grp.levels.push(Level::new(b, degree));
        }
        for g in gens {
            grp.insert(g, 0);
        }
        // Drop trailing levels that ended up trivial.
        while grp.levels.last().is_some_and(|l| l.orbit.len() == 1 && l.gens.is_empty()) {
            grp.levels.pop();
        }
        Ok(grp)
    }

    fn insert(&mut self, g: Perm, level: usize) {
        if self.sift_from(&g, level).is_identity() {
            return;
        }
        if level == self.levels.len() {
            let b = g.first_moved_point().expect("non-identity");
            self.levels.push(Level::new(b, self.degree));
        }
        self.levels[level].gens.push(g);
        self.levels[level].rebuild_orbit();
        // Schreier generators of this level must lie in the next group.
        loop {
            let mut added = false;
            let lv = self.levels[level].clone();
            'outer: for &x in &lv.orbit {
                let ux = lv.transversal[x].as_ref().expect("orbit point");
                for s in &lv.gens {
                    let y = s.apply(x);
                    let uy = lv.transversal[y].as_ref().expect("orbit closed");
                    let schreier = uy.inverse().compose(s).compose(ux);
                    let residue = self.sift_from(&schreier, level + 1);
                    if !residue.is_identity() {
                        self.insert(residue, level + 1);
                        added = true;
                        break 'outer;
                    }
                }
            }
            if !added {
                break;
            }
        }
    }

    /// Sifts `g` through the chain starting at `level`, returning the residue.
    fn sift_from(&self, g: &Perm, level: usize) -> Perm {
        let mut h = g.clone();
        for lv in &self.levels[level.min(self.levels.len())..] {
            let x = h.apply(lv.base);
            match &lv.transversal[x] {
                Some(u) => h = u.inverse().compose(&h),
                None => return h,
            }
        }
        h
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> u64 {
        self.levels.iter().map(|l| l.orbit.len() as u64).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.sift_from(g, 0).is_identity()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    /// All elements, in the deterministic order of the chain.
    pub fn elements(&self) -> Vec<Perm> {
        let mut out = Vec::with_capacity(self.order() as usize);
        self.for_each_element(|g| {
            out.push(g.clone());
        });
        out
    }

    pub fn for_each_element(&self, mut f: impl FnMut(&Perm)) {
        self.search(&mut |_, _| true, &mut |g| {
            f(g);
            false
        });
    }

    /// Depth-first walk over the chain. `keep(depth, partial)` is called with
    /// the partial product `u_1 ∘ ... ∘ u_depth`, which already determines the
    /// images of the first `depth` base points; returning `false` prunes the
    /// subtree. `visit` receives complete elements and may stop the walk by
    /// returning `true`.
    fn search(
        &self,
        keep: &mut dyn FnMut(usize, &Perm) -> bool,
        visit: &mut dyn FnMut(&Perm) -> bool,
    ) -> bool {
        fn rec(
            grp: &PermGroup,
            depth: usize,
            partial: &Perm,
            keep: &mut dyn FnMut(usize, &Perm) -> bool,
            visit: &mut dyn FnMut(&Perm) -> bool,
        ) -> bool {
            if depth == grp.levels.len() {
                return visit(partial);
            }
            let lv = &grp.levels[depth];
            for &x in &lv.orbit {
                let u = lv.transversal[x].as_ref().expect("orbit point");
                let next = partial.compose(u);
                if keep(depth + 1, &next) && rec(grp, depth + 1, &next, keep, visit) {
                    return true;
                }
            }
            false
        }
        rec(self, 0, &Perm::identity(self.degree), keep, visit)
    }

    /// Subgroup of elements satisfying `pred`, which must define a subgroup.
    ///
    /// `invariant_sets` lists point sets that every element of the result maps
    /// onto themselves; they are used to prune the search at each base point.
    pub fn subgroup_where(
        &self,
        invariant_sets: &[Vec<usize>],
        mut pred: impl FnMut(&Perm) -> bool,
    ) -> PermGroup {
        let masks: Vec<Vec<bool>> = invariant_sets
            .iter()
            .map(|s| {
                let mut m = vec![false; self.degree];
                for &x in s {
                    m[x] = true;
                }
                m
            })
            .collect();
        let base = self.base();
        let mut found = PermGroup::trivial(self.degree);
        let mut keep = |depth: usize, partial: &Perm| {
            let b = base[depth - 1];
            let y = partial.apply(b);
            masks.iter().all(|m| m[b] == m[y])
        };
        let mut visit = |g: &Perm| {
            if !found.contains(g) && pred(g) {
                let mut gens = found.generators.clone();
                gens.push(g.clone());
                found = PermGroup::new(self.degree, gens).expect("same degree");
            }
            false
        };
        self.search(&mut keep, &mut visit);
        found
    }

    /// Setwise stabilizer of a point set.
    pub fn setwise_stabilizer(&self, set: &[usize]) -> PermGroup {
        let mut mask = vec![false; self.degree];
        for &x in set {
            mask[x] = true;
        }
        self.subgroup_where(&[set.to_vec()], |g| set.iter().all(|&x| mask[g.apply(x)]))
    }

    /// Orbit of a single point.
    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        seen[point] = true;
        let mut orbit = vec![point];
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit.sort_unstable();
        orbit
    }

    /// Partition of `points` (assumed to be a union of orbits, or the whole
    /// set when `None`) into orbits, each sorted, ordered by least element.
    pub fn orbits(&self, points: Option<&[usize]>) -> Vec<Vec<usize>> {
        let pts: Vec<usize> = match points {
            Some(p) => p.to_vec(),
            None => (0..self.degree).collect(),
        };
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        let mut sorted = pts.clone();
        sorted.sort_unstable();
        for p in sorted {
            if seen[p] {
                continue;
            }
            let orb = self.orbit(p);
            for &x in &orb {
                seen[x] = true;
            }
            out.push(orb);
        }
        out
    }

    /// Sorted orbit lengths on all points.
    pub fn orbit_structure(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.orbits(None).iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        g.iter().enumerate().all(|(i, a)| g[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    /// Normal closure of `gens` in this group.
    pub fn normal_closure(&self, gens: &[Perm]) -> PermGroup {
        let mut n = PermGroup::new(self.degree, gens.to_vec()).expect("same degree");
        loop {
            let mut extra = Vec::new();
            for h in n.generators() {
                for g in &self.generators {
                    let c = g.conjugate(h);
                    if !n.contains(&c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return n;
            }
            let mut all = n.generators.clone();
            all.extend(extra);
            n = PermGroup::new(self.degree, all).expect("same degree");
        }
    }

    pub fn derived_subgroup(&self) -> PermGroup {
        let g = &self.generators;
        let mut comms = Vec::new();
        for a in g {
            for b in g {
                let c = a.inverse().compose(&b.inverse()).compose(a).compose(b);
                if !c.is_identity() {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(&comms)
    }

    pub fn center(&self) -> PermGroup {
        let gens = self.generators.clone();
        self.subgroup_where(&[], |x| gens.iter().all(|g| g.commutes_with(x)))
    }

    pub fn is_normal_in(&self, sup: &PermGroup) -> bool {
        sup.generators.iter().all(|g| self.generators.iter().all(|h| self.contains(&g.conjugate(h))))
    }

    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.order() == other.order() && self.is_subgroup_of(other)
    }

    /// Number of elements of order exactly `k`.
    pub fn count_elements_of_order(&self, k: u64) -> usize {
        let mut c = 0;
        self.for_each_element(|g| {
            if g.order() == k {
                c += 1;
            }
        });
        c
    }

    /// Induced action on a list of objects, given the image index of each
    /// object under a single permutation.
    pub fn induced(
        &self,
        n_objects: usize,
        image_of: impl Fn(&Perm, usize) -> usize,
    ) -> PermGroup {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                Perm::from_images((0..n_objects).map(|i| image_of(g, i)).collect())
                    .expect("action permutes the objects")
            })
            .collect();
        PermGroup::new(n_objects, gens).expect("consistent degree")
    }
}

/// Default order bound for [`all_subgroups`].
pub const SUBGROUP_ORDER_BOUND: u64 = 1000;

/// Every subgroup of `g`, each exactly once, sorted by order and then by a
/// canonical element-set key.
pub fn all_subgroups(g: &PermGroup) -> Result<Vec<PermGroup>, PermError> {
    all_subgroups_bounded(g, SUBGROUP_ORDER_BOUND)
}

pub fn all_subgroups_bounded(g: &PermGroup, bound: u64) -> Result<Vec<PermGroup>, PermError> {
    let order = g.order();
    if order > bound {
        return Err(PermError::OrderBoundExceeded { order, bound });
    }
    let mut elems = g.elements();
    elems.sort();
    let n = elems.len();
    let index: HashMap<Perm, usize> = elems.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let identity = index[&Perm::identity(g.degree())];
    let mul: Vec<Vec<u32>> = elems
        .iter()
        .map(|a| elems.iter().map(|b| index[&a.compose(b)] as u32).collect())
        .collect();
    let words = n.div_ceil(64);
    let closure = |gens: &[usize]| -> Vec<u64> {
        let mut bits = vec![0u64; words];
        bits[identity / 64] |= 1 << (identity % 64);
        let mut queue = vec![identity];
        while let Some(x) = queue.pop() {
            for &s in gens {
                let y = mul[x][s] as usize;
                if bits[y / 64] >> (y % 64) & 1 == 0 {
                    bits[y / 64] |= 1 << (y % 64);
                    queue.push(y);
                }
            }
        }
        bits
    };
    let contains = |bits: &[u64], x: usize| bits[x / 64] >> (x % 64) & 1 == 1;

    // one generator per cyclic subgroup
    let mut cyclic_seen: HashSet<Vec<u64>> = HashSet::new();
    let mut cyclic_gens = Vec::new();
    for x in 0..n {
        let c = closure(&[x]);
        if cyclic_seen.insert(c) {
            cyclic_gens.push(x);
        }
    }

    let mut found: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
    let trivial = closure(&[]);
    found.insert(trivial.clone(), Vec::new());
    let mut queue = VecDeque::from([(trivial, Vec::<usize>::new())]);
    while let Some((bits, gens)) = queue.pop_front() {
        for &c in &cyclic_gens {
            if contains(&bits, c) {
                continue;
            }
            let mut ng = gens.clone();
            ng.push(c);
            let nb = closure(&ng);
            if !found.contains_key(&nb) {
                found.insert(nb.clone(), ng.clone());
                queue.push_back((nb, ng));
            }
        }
    }
    let mut subs: Vec<(u32, Vec<u64>, Vec<usize>)> = found
        .into_iter()
        .map(|(b, gens)| (b.iter().map(|w| w.count_ones()).sum(), b, gens))
        .collect();
    subs.sort();
    Ok(subs
        .into_iter()
        .map(|(_, _, gens)| {
            PermGroup::new(g.degree(), gens.iter().map(|&i| elems[i].clone()).collect())
                .expect("same degree")
        })
        .collect())
}

/// A Sylow 3-subgroup.
pub fn sylow3(g: &PermGroup) -> PermGroup {
    sylow(g, 3)
}

/// A Sylow `p`-subgroup, grown inside normalizers by elements of `p`-power
/// order.
pub fn sylow(g: &PermGroup, p: u64) -> PermGroup {
    let mut target = 1u64;
    let mut o = g.order();
    while o % p == 0 {
        o /= p;
        target *= p;
    }
    let is_p_power = |mut k: u64| {
        while k % p == 0 {
            k /= p;
        }
        k == 1
    };
    let elems = g.elements();
    let mut sub = PermGroup::trivial(g.degree());
    while sub.order() < target {
        let next = elems.iter().find(|x| {
            is_p_power(x.order())
                && !sub.contains(x)
                && sub.generators().iter().all(|h| sub.contains(&x.conjugate(h)))
        });
        let x = next.expect("normalizer contains a p-element outside a non-Sylow p-subgroup");
        let mut gens = sub.generators().to_vec();
        gens.push(x.clone());
        sub = PermGroup::new(g.degree(), gens).expect("same degree");
    }
    sub
}

/// Left coset representatives of `sub` in `sup`, deterministic order.
pub fn left_coset_reps(sup: &PermGroup, sub: &PermGroup) -> Result<Vec<Perm>, PermError> {
    if !sub.is_subgroup_of(sup) {
        return Err(PermError::NotASubgroup);
    }
    let mut reps: Vec<Perm> = Vec::new();
    let index = sup.order() / sub.order();
    let mut elems = sup.elements();
    elems.sort();
    for g in elems {
        let gi = g.inverse();
        if reps.iter().all(|r| !sub.contains(&gi.compose(r))) {
            reps.push(g);
            if reps.len() as u64 == index {
                break;
            }
        }
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s_n(n: usize) -> PermGroup {
        let t = Perm::from_cycles(n, &[&[0, 1]]).unwrap();
        let c: Vec<usize> = (0..n).collect();
        let c = Perm::from_cycles(n, &[&c]).unwrap();
        PermGroup::new(n, vec![t, c]).unwrap()
    }

    #[test]
    fn symmetric_orders() {
        assert_eq!(s_n(3).order(), 6);
        assert_eq!(s_n(6).order(), 720);
        assert_eq!(s_n(8).order(), 40320);
        assert_eq!(PermGroup::trivial(27).order(), 1);
    }

    #[test]
    fn membership_matches_enumeration() {
        let g = s_n(5);
        let a5 = g.derived_subgroup();
        assert_eq!(a5.order(), 60);
        let elems: HashSet<Perm> = a5.elements().into_iter().collect();
        assert_eq!(elems.len(), 60);
        for x in g.elements() {
            assert_eq!(a5.contains(&x), elems.contains(&x));
        }
    }

    #[test]
    fn subgroup_counts() {
        let c3 = PermGroup::new(3, vec![Perm::from_cycles(3, &[&[0, 1, 2]]).unwrap()]).unwrap();
        assert_eq!(all_subgroups(&c3).unwrap().len(), 2);
        let subs = all_subgroups(&s_n(3)).unwrap();
        let orders: Vec<u64> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 3, 6]);
        // S4 has 30 subgroups
        assert_eq!(all_subgroups(&s_n(4)).unwrap().len(), 30);
    }

    #[test]
    fn subgroup_bound() {
        assert!(matches!(
            all_subgroups_bounded(&s_n(5), 100),
            Err(PermError::OrderBoundExceeded { order: 120, bound: 100 })
        ));
    }

    #[test]
    fn sylow_orders() {
        assert_eq!(sylow3(&s_n(3)).order(), 3);
        assert_eq!(sylow3(&PermGroup::trivial(4)).order(), 1);
        assert_eq!(sylow3(&s_n(6)).order(), 9);
        assert_eq!(sylow(&s_n(6), 2).order(), 16);
    }

    #[test]
    fn setwise_stabilizer_in_s6() {
        let g = s_n(6);
        let st = g.setwise_stabilizer(&[0, 1]);
        assert_eq!(st.order(), 48);
        assert_eq!(st.orbit_structure(), vec![2, 4]);
    }

    #[test]
    fn coset_reps() {
        let g = s_n(4);
        let h = g.setwise_stabilizer(&[0]);
        let reps = left_coset_reps(&g, &h).unwrap();
        assert_eq!(reps.len(), 4);
    }

    #[test]
    fn center_and_perm_order() {
        assert_eq!(s_n(4).center().order(), 1);
        let p = Perm::from_cycles(6, &[&[0, 1, 2], &[3, 4]]).unwrap();
        assert_eq!(p.order(), 6);
        assert!(p.pow(6).is_identity());
        assert!(Perm::from_images(vec![0, 0]).is_err());
    }
}
