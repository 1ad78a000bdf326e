//! `W(E6)` as the automorphism group of the 27-line configuration, the named
//! subgroups used throughout the crate, and their actions on configuration
//! objects.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lines27::{idx, Configuration, LineLabel, TrihedronKind, N_LINES};
use crate::permgrp::{all_subgroups, sylow3, Perm, PermGroup};

pub const WEYL_ORDER: u64 = 51840;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("automorphism group has order {0}, expected 51840")]
    OrderMismatch(u64),
    #[error("permutation does not preserve the intersection pairing")]
    NotAnAutomorphism,
    #[error("unknown subgroup tag {0:?}")]
    UnknownTag(String),
}

pub struct WeylGroup {
    group: PermGroup,
}

impl WeylGroup {
    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }
}

/// `W(E6)`, computed once by backtracking over intersection-preserving
/// bijections and certified by its order.
pub fn weyl() -> &'static WeylGroup {
    static W: OnceLock<WeylGroup> = OnceLock::new();
    W.get_or_init(|| build_weyl().expect("automorphism group of the 27 lines"))
}

pub fn build_weyl() -> Result<WeylGroup, WeylError> {
    let cfg = Configuration::get();
    let mut group = PermGroup::trivial(N_LINES);
    let mut image = [usize::MAX; N_LINES];
    let mut used = [false; N_LINES];

    fn extend(
        x: usize,
        image: &mut [usize; N_LINES],
        used: &mut [bool; N_LINES],
        cfg: &Configuration,
        group: &mut PermGroup,
    ) {
        if x == N_LINES {
            let p = Perm::from_images(image.to_vec()).expect("bijection");
            if !group.contains(&p) {
                let mut gens = group.generators().to_vec();
                gens.push(p);
                *group = PermGroup::new(N_LINES, gens).expect("degree 27");
            }
            return;
        }
        for y in 0..N_LINES {
            if used[y] || (0..x).any(|z| cfg.meet(x, z) != cfg.meet(y, image[z])) {
                continue;
            }
            image[x] = y;
            used[y] = true;
            extend(x + 1, image, used, cfg, group);
            used[y] = false;
            image[x] = usize::MAX;
        }
    }
    extend(0, &mut image, &mut used, cfg, &mut group);

    if group.order() != WEYL_ORDER {
        return Err(WeylError::OrderMismatch(group.order()));
    }
    for g in group.generators() {
        if !preserves_intersections(g) {
            return Err(WeylError::NotAnAutomorphism);
        }
    }
    Ok(WeylGroup { group })
}

pub fn preserves_intersections(g: &Perm) -> bool {
    let cfg = Configuration::get();
    g.degree() == N_LINES
        && (0..N_LINES).all(|x| (0..N_LINES).all(|y| cfg.meet(x, y) == cfg.meet(g.apply(x), g.apply(y))))
}

/// The permutation of the 27 lines induced by permuting the blow-up indices.
pub fn index_permutation(sigma: &[u8; 6]) -> Perm {
    let s = |i: u8| sigma[i as usize - 1];
    let images = (0..N_LINES)
        .map(|x| match LineLabel::from_index(x) {
            LineLabel::A(i) => LineLabel::A(s(i)).index(),
            LineLabel::B(i) => LineLabel::B(s(i)).index(),
            LineLabel::C(i, j) => LineLabel::c(s(i), s(j)).index(),
        })
        .collect();
    Perm::from_images(images).expect("index permutation is a bijection")
}

/// Image of `S6` acting on the labels.
pub fn s6_image() -> PermGroup {
    let t = index_permutation(&[2, 1, 3, 4, 5, 6]);
    let c = index_permutation(&[2, 3, 4, 5, 6, 1]);
    PermGroup::new(N_LINES, vec![t, c]).expect("degree 27")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SubgroupTag {
    #[serde(rename = "stab_pair")]
    StabPair,
    #[serde(rename = "U_t")]
    Ut,
    #[serde(rename = "U_t3sylow")]
    Ut3Sylow,
    #[serde(rename = "U_tt")]
    Utt,
    #[serde(rename = "U_tt_prime")]
    UttPrime,
    #[serde(rename = "D18_first_kind")]
    D18FirstKind,
}

impl SubgroupTag {
    pub const ALL: [SubgroupTag; 6] = [
        SubgroupTag::StabPair,
        SubgroupTag::Ut,
        SubgroupTag::Ut3Sylow,
        SubgroupTag::Utt,
        SubgroupTag::UttPrime,
        SubgroupTag::D18FirstKind,
    ];

    pub fn expected_order(self) -> u64 {
        match self {
            SubgroupTag::StabPair => 432,
            SubgroupTag::Ut => 216,
            SubgroupTag::Ut3Sylow => 27,
            SubgroupTag::Utt => 3,
            SubgroupTag::UttPrime => 8,
            SubgroupTag::D18FirstKind => 18,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SubgroupTag::StabPair => "stab_pair",
            SubgroupTag::Ut => "U_t",
            SubgroupTag::Ut3Sylow => "U_t3sylow",
            SubgroupTag::Utt => "U_tt",
            SubgroupTag::UttPrime => "U_tt_prime",
            SubgroupTag::D18FirstKind => "D18_first_kind",
        }
    }
}

impl fmt::Display for SubgroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SubgroupTag {
    type Err = WeylError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SubgroupTag::ALL
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(s) || t.name().replace('_', "").eq_ignore_ascii_case(s))
            .ok_or_else(|| WeylError::UnknownTag(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct NamedSubgroup {
    pub tag: SubgroupTag,
    pub group: PermGroup,
    /// Human-readable description of the defining objects.
    pub defining: String,
}

/// The standard decomposition `St_(123)(456)`.
pub fn standard_decomposition() -> usize {
    Configuration::get().decomposition_by_name("St_(123)(456)").expect("standard decomposition")
}

/// Stabilizer in `W(E6)` of an ordered triplet (each pair fixed).
pub fn triplet_stabilizer(t: usize) -> PermGroup {
    let cfg = Configuration::get();
    let tr = cfg.triplets()[t];
    let sets: Vec<Vec<usize>> = tr
        .pairs
        .iter()
        .map(|&p| cfg.steiner_pairs()[p].lines().iter().map(|&x| x as usize).collect())
        .collect();
    weyl().group().subgroup_where(&sets, |g| cfg.triplet_image(t, g) == t)
}

/// Stabilizer in `W(E6)` of a Steiner pair.
pub fn pair_stabilizer(p: usize) -> PermGroup {
    let cfg = Configuration::get();
    let set: Vec<usize> = cfg.steiner_pairs()[p].lines().iter().map(|&x| x as usize).collect();
    weyl().group().subgroup_where(&[set], |g| cfg.pair_image(p, g) == p)
}

/// Stabilizer of a family of line sets, each mapped onto itself.
pub fn line_sets_stabilizer(sets: &[Vec<usize>]) -> PermGroup {
    let masks: Vec<Vec<bool>> = sets
        .iter()
        .map(|s| {
            let mut m = vec![false; N_LINES];
            for &x in s {
                m[x] = true;
            }
            m
        })
        .collect();
    weyl()
        .group()
        .subgroup_where(sets, |g| sets.iter().zip(&masks).all(|(s, m)| s.iter().all(|&x| m[g.apply(x)])))
}

/// Partitions of the lines into three line sets of first-kind trihedra.
pub fn first_kind_partitions() -> Vec<[Vec<usize>; 3]> {
    let cfg = Configuration::get();
    let planes = cfg.tritangent_planes();
    let sets: Vec<Vec<usize>> = cfg
        .trihedra()
        .iter()
        .filter(|t| t.1 == TrihedronKind::First)
        .map(|t| {
            let mut v: Vec<usize> =
                t.0.iter().flat_map(|&p| planes[p as usize].iter().map(|&x| x as usize)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    let disjoint = |a: &[usize], b: &[usize]| a.iter().all(|x| !b.contains(x));
    let mut out = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if !disjoint(&sets[i], &sets[j]) {
                continue;
            }
            for k in j + 1..sets.len() {
                if disjoint(&sets[i], &sets[k]) && disjoint(&sets[j], &sets[k]) {
                    out.push([sets[i].clone(), sets[j].clone(), sets[k].clone()]);
                }
            }
        }
    }
    out
}

/// True if `g` is dihedral of order `2n` with `n >= 3`.
pub fn is_dihedral(g: &PermGroup) -> bool {
    let order = g.order();
    if order % 2 != 0 || order < 6 {
        return false;
    }
    let n = order / 2;
    let elems = g.elements();
    let Some(r) = elems.iter().find(|x| x.order() == n) else { return false };
    let rinv = r.inverse();
    let cyclic = PermGroup::new(g.degree(), vec![r.clone()]).expect("same degree");
    elems
        .iter()
        .any(|t| !cyclic.contains(t) && t.order() == 2 && t.compose(r).compose(t) == rinv)
}

pub fn named(tag: SubgroupTag) -> &'static NamedSubgroup {
    static CACHE: [OnceLock<NamedSubgroup>; 6] = [const { OnceLock::new() }; 6];
    let slot = SubgroupTag::ALL.iter().position(|t| *t == tag).expect("known tag");
    CACHE[slot].get_or_init(|| build_named(tag))
}

fn build_named(tag: SubgroupTag) -> NamedSubgroup {
    let cfg = Configuration::get();
    let st = standard_decomposition();
    let t_std = cfg.triplet_index(&cfg.standard_triplet(st)).expect("standard triplet");
    let (group, defining) = match tag {
        SubgroupTag::StabPair => {
            let p = cfg.standard_triplet(st).pairs[0];
            (pair_stabilizer(p), format!("pair {}", cfg.steiner_pairs()[p]))
        }
        SubgroupTag::Ut => (triplet_stabilizer(t_std), "triplet St_(123)(456)".to_string()),
        SubgroupTag::Ut3Sylow => (sylow3(&named(SubgroupTag::Ut).group), "3-Sylow of U_t".to_string()),
        SubgroupTag::Utt | SubgroupTag::UttPrime => {
            let other = if tag == SubgroupTag::Utt { "St_(14)(25)(36)" } else { "St_(12)(34)(56)" };
            let d2 = cfg.decomposition_by_name(other).expect("named decomposition");
            let t2 = cfg.triplet_index(&cfg.standard_triplet(d2)).expect("triplet");
            let ut = &named(SubgroupTag::Ut).group;
            let g = ut.subgroup_where(&[], |g| cfg.triplet_image(t2, g) == t2);
            (g, format!("triplets St_(123)(456) and {other}"))
        }
        SubgroupTag::D18FirstKind => {
            let found = first_kind_partitions().into_iter().find_map(|part| {
                let g = line_sets_stabilizer(&part);
                (g.order() == 18 && g.orbit_structure() == vec![9, 9, 9] && is_dihedral(&g))
                    .then_some((g, part))
            });
            let (g, part) = found.expect("a first-kind partition with dihedral stabilizer of order 18");
            let desc: Vec<String> = part
                .iter()
                .map(|s| {
                    let v: Vec<u8> = s.iter().map(|&x| x as u8).collect();
                    crate::lines27::labels_string(&v)
                })
                .collect();
            (g, format!("first-kind trihedra {{{}}}", desc.join(" | ")))
        }
    };
    NamedSubgroup { tag, group, defining }
}

/// Orbits of the group generated by `gens` on `0..n`, acting through
/// `image(g, i)`. Sorted lengths.
pub fn orbit_lengths(gens: &[Perm], n: usize, image: impl Fn(&Perm, usize) -> usize) -> Vec<usize> {
    let mut seen = vec![false; n];
    let mut lengths = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut len = 0;
        while let Some(x) = stack.pop() {
            len += 1;
            for g in gens {
                let y = image(g, x);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        lengths.push(len);
    }
    lengths.sort_unstable();
    lengths
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub lines: Vec<usize>,
    pub steiner_pairs: Vec<usize>,
    pub decompositions: Vec<usize>,
    pub triplets: Vec<usize>,
    pub double_sixes: Vec<usize>,
}

pub fn orbit_report(g: &PermGroup) -> OrbitReport {
    let cfg = Configuration::get();
    let gens = g.generators();
    OrbitReport {
        lines: g.orbit_structure(),
        steiner_pairs: orbit_lengths(gens, cfg.steiner_pairs().len(), |p, i| cfg.pair_image(i, p)),
        decompositions: orbit_lengths(gens, cfg.decompositions().len(), |p, i| {
            cfg.decomposition_image(i, p)
        }),
        triplets: orbit_lengths(gens, cfg.triplets().len(), |p, i| cfg.triplet_image(i, p)),
        double_sixes: orbit_lengths(gens, cfg.double_sixes().len(), |p, i| cfg.double_six_image(i, p)),
    }
}

/// Objects fixed by every element of `g`, as indices into the configuration
/// tables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizedObjects {
    pub double_sixes: Vec<usize>,
    pub steiner_pairs: Vec<usize>,
    pub triplets: Vec<usize>,
    pub sixers: Vec<usize>,
}

pub fn stabilized_objects(g: &PermGroup) -> StabilizedObjects {
    let cfg = Configuration::get();
    let gens = g.generators();
    let fixed = |n: usize, image: &dyn Fn(&Perm, usize) -> usize| -> Vec<usize> {
        (0..n).filter(|&i| gens.iter().all(|p| image(p, i) == i)).collect()
    };
    StabilizedObjects {
        double_sixes: fixed(cfg.double_sixes().len(), &|p, i| cfg.double_six_image(i, p)),
        steiner_pairs: fixed(cfg.steiner_pairs().len(), &|p, i| cfg.pair_image(i, p)),
        triplets: fixed(cfg.triplets().len(), &|p, i| cfg.triplet_image(i, p)),
        sixers: fixed(cfg.sixers().len(), &|p, i| cfg.sixer_image(i, p)),
    }
}

/// Certificate that a group of order 216 is `S3 x S3 x S3`: three normal
/// non-abelian subgroups of order 6 that commute elementwise and generate.
#[derive(Clone, Debug)]
pub struct S3CubedCertificate {
    pub factors: [PermGroup; 3],
    pub center_order: u64,
    pub derived_order: u64,
    pub involutions: usize,
}

pub fn s3_cubed_certificate(g: &PermGroup) -> Option<S3CubedCertificate> {
    if g.order() != 216 {
        return None;
    }
    let subs = all_subgroups(g).ok()?;
    let cands: Vec<&PermGroup> =
        subs.iter().filter(|h| h.order() == 6 && !h.is_abelian() && h.is_normal_in(g)).collect();
    let commute = |a: &PermGroup, b: &PermGroup| {
        a.generators().iter().all(|x| b.generators().iter().all(|y| x.commutes_with(y)))
    };
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            if !commute(cands[i], cands[j]) {
                continue;
            }
            for k in j + 1..cands.len() {
                if !commute(cands[i], cands[k]) || !commute(cands[j], cands[k]) {
                    continue;
                }
                let gens: Vec<Perm> =
                    [cands[i], cands[j], cands[k]].iter().flat_map(|h| h.generators().to_vec()).collect();
                if PermGroup::new(g.degree(), gens).ok()?.order() == 216 {
                    return Some(S3CubedCertificate {
                        factors: [cands[i].clone(), cands[j].clone(), cands[k].clone()],
                        center_order: g.center().order(),
                        derived_order: g.derived_subgroup().order(),
                        involutions: g.count_elements_of_order(2),
                    });
                }
            }
        }
    }
    None
}

/// Distinct traces on `Pic` of the elements of a group acting on the lines.
pub fn pic_traces(g: &PermGroup) -> Vec<i64> {
    let mut set = std::collections::BTreeSet::new();
    g.for_each_element(|p| {
        set.insert(pic_trace(p));
    });
    set.into_iter().collect()
}

/// Trace of `p` on the rank-7 lattice, by expressing the images of a basis
/// of `Pic` (the classes `l, e1, .., e6`) through line classes.
pub fn pic_trace(p: &Perm) -> i64 {
    // e_i = a_i and l = c12 + a1 + a2
    let basis_lines: [[usize; 3]; 7] = [
        [idx("c12"), idx("a1"), idx("a2")],
        [idx("a1"), usize::MAX, usize::MAX],
        [idx("a2"), usize::MAX, usize::MAX],
        [idx("a3"), usize::MAX, usize::MAX],
        [idx("a4"), usize::MAX, usize::MAX],
        [idx("a5"), usize::MAX, usize::MAX],
        [idx("a6"), usize::MAX, usize::MAX],
    ];
    let mut trace = 0i64;
    for (k, lines) in basis_lines.iter().enumerate() {
        let mut img = [0i64; 7];
        for &x in lines.iter().filter(|&&x| x != usize::MAX) {
            let c = LineLabel::from_index(p.apply(x)).pic_class();
            for t in 0..7 {
                img[t] += c[t];
            }
        }
        trace += img[k];
    }
    trace
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_order_and_s6() {
        let w = weyl();
        assert_eq!(w.order(), 51840);
        let s6 = s6_image();
        assert_eq!(s6.order(), 720);
        assert!(s6.is_subgroup_of(w.group()));
        assert!(w.group().generators().iter().all(preserves_intersections));
    }

    #[test]
    fn transitivity() {
        let r = orbit_report(weyl().group());
        assert_eq!(r.lines, vec![27]);
        assert_eq!(r.steiner_pairs, vec![120]);
        assert_eq!(r.triplets, vec![240]);
        assert_eq!(r.decompositions, vec![40]);
        assert_eq!(r.double_sixes, vec![36]);
        assert_eq!(stabilized_objects(weyl().group()), StabilizedObjects::default());
    }

    #[test]
    fn pair_stabilizer_orbits() {
        let g = &named(SubgroupTag::StabPair).group;
        assert_eq!(g.order(), 432);
        assert_eq!(orbit_report(g).steiner_pairs, vec![1, 2, 27, 36, 54]);
    }

    #[test]
    fn ut_structure() {
        let g = &named(SubgroupTag::Ut).group;
        assert_eq!(g.order(), 216);
        let r = orbit_report(g);
        assert_eq!(r.lines, vec![9, 9, 9]);
        assert_eq!(r.decompositions, vec![1, 12, 27]);
        assert_eq!(r.triplets, vec![1, 1, 1, 1, 1, 1, 27, 27, 27, 27, 27, 27, 72]);
        let cert = s3_cubed_certificate(g).expect("S3^3");
        assert_eq!(cert.center_order, 1);
        assert_eq!(cert.derived_order, 27);
        assert_eq!(cert.involutions, 63);
        let s = stabilized_objects(g);
        assert!(s.sixers.is_empty());
        assert_eq!(s.triplets.len(), 6);
    }

    #[test]
    fn small_named_subgroups() {
        for tag in SubgroupTag::ALL {
            assert_eq!(named(tag).group.order(), tag.expected_order(), "{tag}");
        }
        let syl = &named(SubgroupTag::Ut3Sylow).group;
        assert!(syl.is_abelian());
        assert!(syl.elements().iter().all(|x| x.order() <= 3));
        let utt = &named(SubgroupTag::Utt).group;
        let fixed = (0..40)
            .filter(|&d| utt.generators().iter().all(|g| Configuration::get().decomposition_image(d, g) == d))
            .count();
        assert_eq!(fixed, 4);
        assert_eq!(utt.orbit_structure(), vec![3; 9]);
        let d18 = &named(SubgroupTag::D18FirstKind).group;
        assert!(is_dihedral(d18));
    }

    #[test]
    fn utt_prime_pairs() {
        let g = &named(SubgroupTag::UttPrime).group;
        assert_eq!(stabilized_objects(g).steiner_pairs.len(), 6);
    }

    #[test]
    fn traces() {
        assert_eq!(pic_trace(&Perm::identity(27)), 7);
        let t = pic_traces(weyl().group());
        assert!(t.contains(&7));
        assert!(t.iter().all(|x| (-2..=7).contains(x)));
    }

    #[test]
    fn tag_parsing() {
        assert_eq!("U_t".parse::<SubgroupTag>().unwrap(), SubgroupTag::Ut);
        assert_eq!("utt".parse::<SubgroupTag>().unwrap(), SubgroupTag::Utt);
        assert!("nope".parse::<SubgroupTag>().is_err());
    }
}
