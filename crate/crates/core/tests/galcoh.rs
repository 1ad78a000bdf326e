use std::sync::OnceLock;

use cubic_brauer::galcoh::{self, h1, pic_rank_fixed, restriction, H1Presentation};
use cubic_brauer::lines27::Configuration;
use cubic_brauer::permgrp::{all_subgroups, PermGroup};
use cubic_brauer::weylact::{named, SubgroupTag};
use proptest::prelude::*;

fn ut_subgroups() -> &'static Vec<H1Presentation> {
    static S: OnceLock<Vec<H1Presentation>> = OnceLock::new();
    S.get_or_init(|| {
        all_subgroups(&named(SubgroupTag::Ut).group).unwrap().iter().map(|g| h1(g).unwrap()).collect()
    })
}

#[test]
fn ut_subgroup_count_is_stable() {
    assert_eq!(ut_subgroups().len(), 904);
}

#[test]
fn ut_sweep() {
    let r = galcoh::sweep_subgroups(&named(SubgroupTag::Ut).group).unwrap();
    assert!(r.ok(), "{:?}", r.failures);
    assert_eq!(r.histogram, vec![(vec![], 766), (vec![3], 134), (vec![3, 3], 4)]);
    assert!(r.injective_pairs_checked > 0);
}

#[test]
fn named_subgroups_in_range() {
    for tag in SubgroupTag::ALL {
        let g = &named(tag).group;
        let f = h1(g).unwrap().invariant_factors();
        assert!(galcoh::in_swinnerton_dyer_range(&f), "{tag}: {f:?}");
        if galcoh::is_nontrivial_3_group(&f) {
            assert!(!cubic_brauer::weylact::stabilized_objects(g).triplets.is_empty(), "{tag}");
        }
    }
}

#[test]
fn two_triplet_theorem() {
    let cfg = Configuration::get();
    let d1 = cfg.decomposition_by_name("St_(123)(456)").unwrap();
    let d2 = cfg.decomposition_by_name("St_(14)(25)(36)").unwrap();
    let r = galcoh::two_triplet_report(&named(SubgroupTag::Utt).group, d1, d2).unwrap();
    assert_eq!(r.h1_invariant_factors, vec![3, 3]);
    assert_eq!(r.invariant_decompositions.len(), 4);
    assert_eq!(r.classes.len(), 24);
    assert!(r.ok(), "{r:?}");
}

#[test]
fn utt_pic_rank_differs_from_trivial() {
    let utt = pic_rank_fixed(&named(SubgroupTag::Utt).group);
    assert_eq!(pic_rank_fixed(&PermGroup::trivial(27)), 7);
    assert!(utt < 7);
}

#[test]
fn parallelogram_rejects_wrong_orbits() {
    let pres = h1(&named(SubgroupTag::Ut).group).unwrap();
    let cfg = Configuration::get();
    let d1 = cfg.decomposition_by_name("St_(123)(456)").unwrap();
    let d2 = cfg.decomposition_by_name("St_(14)(25)(36)").unwrap();
    assert!(galcoh::parallelogram_check(&pres, &galcoh::intersection_orbits(d1, d2)).is_err());
}

#[test]
fn class_map_requires_invariance() {
    let pres = h1(&named(SubgroupTag::Ut).group).unwrap();
    let cfg = Configuration::get();
    let moved = (0..cfg.triplets().len())
        .find(|&t| pres.group.generators().iter().any(|g| cfg.triplet_image(t, g) != t))
        .unwrap();
    let mut cache = Default::default();
    assert!(galcoh::class_map(&pres, moved, &mut cache).is_err());
}

fn chain(a: usize, b: usize, c: usize) -> Option<(usize, usize, usize)> {
    let subs = ut_subgroups();
    let g = a % subs.len();
    let hs: Vec<usize> = (0..subs.len()).filter(|&i| subs[i].group.is_subgroup_of(&subs[g].group)).collect();
    let h = hs[b % hs.len()];
    let ks: Vec<usize> = hs.iter().copied().filter(|&i| subs[i].group.is_subgroup_of(&subs[h].group)).collect();
    Some((g, h, ks[c % ks.len()]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn restriction_is_functorial(a in 0usize..10_000, b in 0usize..10_000, c in 0usize..10_000) {
        let subs = ut_subgroups();
        let (g, h, k) = chain(a, b, c).unwrap();
        let gh = restriction(&subs[h], &subs[g]).unwrap();
        let hk = restriction(&subs[k], &subs[h]).unwrap();
        let gk = restriction(&subs[k], &subs[g]).unwrap();
        let composed = gh.compose(&hk);
        for chi in subs[g].all_classes() {
            prop_assert_eq!(composed.apply(&chi), gk.apply(&chi));
        }
    }

    #[test]
    fn restriction_to_self_is_identity(a in 0usize..904) {
        let p = &ut_subgroups()[a];
        let r = restriction(p, p).unwrap();
        for chi in p.all_classes() {
            prop_assert_eq!(r.apply(&chi), chi);
        }
    }

    #[test]
    fn nd0_inside_m_inside_nd(a in 0usize..904) {
        let p = &ut_subgroups()[a];
        prop_assert!(p.m.contains_lattice(&p.nd0));
        prop_assert!(p.nd.contains_lattice(&p.m));
        prop_assert_eq!(p.d0.rank(), 20);
    }
}
