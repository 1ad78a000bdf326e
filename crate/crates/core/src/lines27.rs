//! The configuration of the 27 lines on a smooth cubic surface.
//!
//! Lines are indexed `0..27`: `a1..a6` are `0..6`, `b1..b6` are `6..12` and
//! `c12, c13, .., c56` follow in lexicographic order. All configuration
//! objects are enumerated by brute force from the intersection pairing and
//! cached in a process-wide [`Configuration`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::permgrp::Perm;

pub const N_LINES: usize = 27;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown line label {0:?}")]
    BadLabel(String),
    #[error("not a trihedron")]
    NotATrihedron,
    #[error("not a pair of Steiner trihedra")]
    NotASteinerPair,
    #[error("line sets are not disjoint")]
    NotDisjoint,
    #[error("the two decompositions coincide")]
    SameDecomposition,
    #[error("unknown decomposition name {0:?}")]
    BadDecompositionName(String),
}

/// Schläfli's labels for the 27 lines. Indices are 1-based as in the
/// classical notation; `C(i, j)` always has `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LineLabel {
    A(u8),
    B(u8),
    C(u8, u8),
}

impl LineLabel {
    pub fn index(self) -> usize {
        match self {
            LineLabel::A(i) => i as usize - 1,
            LineLabel::B(i) => 5 + i as usize,
            LineLabel::C(i, j) => {
                let (i, j) = (i as usize, j as usize);
                // pairs (1,2)..(1,6) come first
                let before: usize = (1..i).map(|r| 6 - r).sum();
                12 + before + (j - i - 1)
            }
        }
    }

    pub fn from_index(idx: usize) -> LineLabel {
        all_labels()[idx]
    }

    /// Class in `Pic` with coordinates `(l, e1, .., e6)`.
    pub fn pic_class(self) -> PicClass {
        let mut v = [0i64; 7];
        match self {
            LineLabel::A(i) => v[i as usize] = 1,
            LineLabel::B(i) => {
                v = [2, -1, -1, -1, -1, -1, -1];
                v[i as usize] = 0;
            }
            LineLabel::C(i, j) => {
                v[0] = 1;
                v[i as usize] = -1;
                v[j as usize] = -1;
            }
        }
        v
    }

    /// Convenience constructor for `C` with unordered indices.
    pub fn c(i: u8, j: u8) -> LineLabel {
        LineLabel::C(i.min(j), i.max(j))
    }
}

fn all_labels() -> &'static [LineLabel; N_LINES] {
    static LABELS: OnceLock<[LineLabel; N_LINES]> = OnceLock::new();
    LABELS.get_or_init(|| {
        let mut v = Vec::with_capacity(N_LINES);
        v.extend((1..=6).map(LineLabel::A));
        v.extend((1..=6).map(LineLabel::B));
        for i in 1..=6 {
            for j in i + 1..=6 {
                v.push(LineLabel::C(i, j));
            }
        }
        v.try_into().expect("27 labels")
    })
}

impl fmt::Display for LineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineLabel::A(i) => write!(f, "a{i}"),
            LineLabel::B(i) => write!(f, "b{i}"),
            LineLabel::C(i, j) => write!(f, "c{i}{j}"),
        }
    }
}

impl FromStr for LineLabel {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::BadLabel(s.to_string());
        let t = s.trim();
        let mut chars = t.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let digits: Vec<u8> = chars
            .filter(|c| *c != '_')
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(bad))
            .collect::<Result<_, _>>()?;
        let ok = |d: u8| (1..=6).contains(&d);
        match (kind, digits.as_slice()) {
            ('a', [i]) if ok(*i) => Ok(LineLabel::A(*i)),
            ('b', [i]) if ok(*i) => Ok(LineLabel::B(*i)),
            ('c', [i, j]) if ok(*i) && ok(*j) && i != j => Ok(LineLabel::c(*i, *j)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for LineLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LineLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn label(idx: usize) -> LineLabel {
    LineLabel::from_index(idx)
}

pub fn idx(s: &str) -> usize {
    s.parse::<LineLabel>().expect("valid label").index()
}

pub fn labels_string(lines: &[u8]) -> String {
    lines.iter().map(|&l| label(l as usize).to_string()).collect::<Vec<_>>().join(" ")
}

pub type PicClass = [i64; 7];

/// The canonical class `K = -3l + e1 + .. + e6`.
pub const CANONICAL_CLASS: PicClass = [-3, 1, 1, 1, 1, 1, 1];

/// The pairing with signature `(1, -1^6)`.
pub fn pairing(x: &PicClass, y: &PicClass) -> i64 {
    x[0] * y[0] - (1..7).map(|i| x[i] * y[i]).sum::<i64>()
}

pub fn intersection(x: LineLabel, y: LineLabel) -> i64 {
    pairing(&x.pic_class(), &y.pic_class())
}

/// A tritangent plane: three pairwise meeting lines, sorted.
pub type Plane = [u8; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrihedronKind {
    First,
    Second,
    Third,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchlafliType {
    I,
    II,
    III,
}

impl SchlafliType {
    /// Type from the numbers of `a`, `b` and `c` lines involved.
    pub fn from_counts(a: usize, b: usize, c: usize) -> Option<Self> {
        match (a, b, c) {
            (3, 3, 3) => Some(SchlafliType::I),
            (0, 0, 9) => Some(SchlafliType::II),
            (2, 2, 5) => Some(SchlafliType::III),
            _ => None,
        }
    }
}

/// A pair of Steiner trihedra as a 3x3 matrix whose rows and columns are
/// tritangent planes. The stored matrix is the lexicographically least one
/// over row permutations, column permutations and transposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SteinerPair {
    matrix: [[u8; 3]; 3],
    schlafli: SchlafliType,
}

impl SteinerPair {
    /// Validates a displayed matrix and canonicalizes it.
    pub fn from_matrix(m: [[u8; 3]; 3]) -> Result<Self, ConfigError> {
        let cfg = Configuration::get();
        let mut all: Vec<u8> = m.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        if all.len() != 9 {
            return Err(ConfigError::NotASteinerPair);
        }
        for i in 0..3 {
            let row = sorted3([m[i][0], m[i][1], m[i][2]]);
            let col = sorted3([m[0][i], m[1][i], m[2][i]]);
            if !cfg.is_plane(&row) || !cfg.is_plane(&col) {
                return Err(ConfigError::NotASteinerPair);
            }
        }
        let counts = abc_counts(&all);
        let schlafli =
            SchlafliType::from_counts(counts.0, counts.1, counts.2).ok_or(ConfigError::NotASteinerPair)?;
        Ok(SteinerPair { matrix: canonical_matrix(m), schlafli })
    }

    pub fn from_labels(m: [[LineLabel; 3]; 3]) -> Result<Self, ConfigError> {
        Self::from_matrix(m.map(|r| r.map(|l| l.index() as u8)))
    }

    pub fn matrix(&self) -> [[u8; 3]; 3] {
        self.matrix
    }

    pub fn schlafli_type(&self) -> SchlafliType {
        self.schlafli
    }

    pub fn lines(&self) -> [u8; 9] {
        let mut v: [u8; 9] = [0; 9];
        for (k, x) in self.matrix.iter().flatten().enumerate() {
            v[k] = *x;
        }
        v.sort_unstable();
        v
    }

    pub fn rows(&self) -> [Plane; 3] {
        self.matrix.map(sorted3)
    }

    pub fn columns(&self) -> [Plane; 3] {
        let m = self.matrix;
        [0, 1, 2].map(|j| sorted3([m[0][j], m[1][j], m[2][j]]))
    }

    /// Image under a permutation of the lines.
    pub fn image(&self, g: &Perm) -> SteinerPair {
        let m = self.matrix.map(|r| r.map(|x| g.apply(x as usize) as u8));
        let all: Vec<u8> = m.iter().flatten().copied().collect();
        let c = abc_counts(&all);
        SteinerPair {
            matrix: canonical_matrix(m),
            schlafli: SchlafliType::from_counts(c.0, c.1, c.2).expect("automorphisms preserve pairs"),
        }
    }

    pub fn to_labels(&self) -> [[LineLabel; 3]; 3] {
        self.matrix.map(|r| r.map(|x| label(x as usize)))
    }
}

impl fmt::Display for SteinerPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.matrix.iter().map(|r| labels_string(r)).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

fn sorted3(mut p: [u8; 3]) -> [u8; 3] {
    p.sort_unstable();
    p
}

fn abc_counts(lines: &[u8]) -> (usize, usize, usize) {
    let a = lines.iter().filter(|&&x| x < 6).count();
    let b = lines.iter().filter(|&&x| (6..12).contains(&x)).count();
    (a, b, lines.len() - a - b)
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn canonical_matrix(m: [[u8; 3]; 3]) -> [[u8; 3]; 3] {
    let mut best = m;
    for t in [false, true] {
        for rp in PERMS3 {
            for cp in PERMS3 {
                let mut c = [[0u8; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        c[i][j] = if t { m[cp[j]][rp[i]] } else { m[rp[i]][cp[j]] };
                    }
                }
                if c < best {
                    best = c;
                }
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DecompositionKind {
    /// Two pairs of type I and one of type II.
    TwoTriples,
    /// Three pairs of type III.
    ThreePairs,
}

/// Three Steiner pairs covering all 27 lines, as sorted indices into
/// [`Configuration::steiner_pairs`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decomposition {
    pub pairs: [usize; 3],
    pub kind: DecompositionKind,
    /// Classical name, `St_(123)(456)` or `St_(14)(25)(36)`.
    pub name: String,
    /// The pairs in the order of the classical display.
    pub display_order: [usize; 3],
}

/// An ordered triple of pairwise disjoint Steiner pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triplet {
    pub pairs: [usize; 3],
}

impl Triplet {
    pub fn rotate(&self) -> Triplet {
        Triplet { pairs: [self.pairs[1], self.pairs[2], self.pairs[0]] }
    }

    pub fn swap12(&self) -> Triplet {
        Triplet { pairs: [self.pairs[1], self.pairs[0], self.pairs[2]] }
    }

    pub fn sorted(&self) -> [usize; 3] {
        let mut p = self.pairs;
        p.sort_unstable();
        p
    }
}

/// Two sixers arranged so that `rows[0][i]` and `rows[1][i]` are skew.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DoubleSix {
    pub rows: [[u8; 6]; 2],
}

impl DoubleSix {
    pub fn lines(&self) -> [u8; 12] {
        let mut v = [0u8; 12];
        v[..6].copy_from_slice(&self.rows[0]);
        v[6..].copy_from_slice(&self.rows[1]);
        v.sort_unstable();
        v
    }

    /// Canonical arrangement: the sixer with the smaller least line first,
    /// columns sorted by the first row.
    fn canonical(a: [u8; 6], b: [u8; 6]) -> DoubleSix {
        let (first, second) = if a.iter().min() <= b.iter().min() { (a, b) } else { (b, a) };
        let mut cols: Vec<(u8, u8)> = first.iter().copied().zip(second.iter().copied()).collect();
        cols.sort_unstable();
        let mut rows = [[0u8; 6]; 2];
        for (k, (x, y)) in cols.into_iter().enumerate() {
            rows[0][k] = x;
            rows[1][k] = y;
        }
        DoubleSix { rows }
    }

    pub fn image(&self, g: &Perm) -> DoubleSix {
        let a = self.rows[0].map(|x| g.apply(x as usize) as u8);
        let b = self.rows[1].map(|x| g.apply(x as usize) as u8);
        DoubleSix::canonical(a, b)
    }
}

/// Nine tritangent planes containing all lines, with the decompositions it
/// arises from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enneahedron {
    pub planes: [u16; 9],
    pub decompositions: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairType {
    A,
    B,
}

/// The full configuration, computed once.
pub struct Configuration {
    meet: [[i8; N_LINES]; N_LINES],
    planes: Vec<Plane>,
    plane_index: HashMap<Plane, usize>,
    trihedra: Vec<([u16; 3], TrihedronKind)>,
    pairs: Vec<SteinerPair>,
    pair_index: HashMap<[u8; 9], usize>,
    decompositions: Vec<Decomposition>,
    decomposition_index: HashMap<[usize; 3], usize>,
    triplets: Vec<Triplet>,
    triplet_index: HashMap<[usize; 3], usize>,
    sixers: Vec<[u8; 6]>,
    sixer_index: HashMap<[u8; 6], usize>,
    double_sixes: Vec<DoubleSix>,
    double_six_index: HashMap<[u8; 12], usize>,
    enneahedra: Vec<Enneahedron>,
}

impl Configuration {
    pub fn get() -> &'static Configuration {
        static CFG: OnceLock<Configuration> = OnceLock::new();
        CFG.get_or_init(Configuration::build)
    }

    fn build() -> Configuration {
        let mut meet = [[0i8; N_LINES]; N_LINES];
        for (i, row) in meet.iter_mut().enumerate() {
            for (j, m) in row.iter_mut().enumerate() {
                *m = intersection(label(i), label(j)) as i8;
            }
        }
        let meets = |x: usize, y: usize| meet[x][y] == 1;

        // tritangent planes: pairwise meeting triples summing to -K
        let mut planes = Vec::new();
        for x in 0..N_LINES {
            for y in x + 1..N_LINES {
                for z in y + 1..N_LINES {
                    if meets(x, y) && meets(y, z) && meets(x, z) {
                        let mut s = [0i64; 7];
                        for l in [x, y, z] {
                            let c = label(l).pic_class();
                            for k in 0..7 {
                                s[k] += c[k];
                            }
                        }
                        if s.iter().zip(CANONICAL_CLASS).all(|(a, k)| *a == -k) {
                            planes.push([x as u8, y as u8, z as u8]);
                        }
                    }
                }
            }
        }
        let plane_index: HashMap<Plane, usize> =
            planes.iter().enumerate().map(|(i, p)| (*p, i)).collect();

        let shares = |p: &Plane, q: &Plane| p.iter().any(|x| q.contains(x));
        let common = |p: &Plane, q: &Plane| -> Option<u8> {
            let c: Vec<u8> = p.iter().filter(|x| q.contains(x)).copied().collect();
            (c.len() == 1).then(|| c[0])
        };

        // trihedra, their kinds, and Steiner pairs from the third kind
        let np = planes.len();
        let mut trihedra = Vec::new();
        let mut pair_set: BTreeMap<[[u8; 3]; 3], SchlafliType> = BTreeMap::new();
        for i in 0..np {
            for j in i + 1..np {
                if shares(&planes[i], &planes[j]) {
                    continue;
                }
                for k in j + 1..np {
                    if shares(&planes[i], &planes[k]) || shares(&planes[j], &planes[k]) {
                        continue;
                    }
                    let tri = [planes[i], planes[j], planes[k]];
                    let conj: Vec<usize> = (0..np)
                        .filter(|&e| tri.iter().all(|t| common(t, &planes[e]).is_some()))
                        .collect();
                    let kind = match conj.len() {
                        0 => TrihedronKind::First,
                        1 => TrihedronKind::Second,
                        3 => TrihedronKind::Third,
                        n => panic!("trihedron with {n} conjugate planes"),
                    };
                    trihedra.push(([i as u16, j as u16, k as u16], kind));
                    if kind == TrihedronKind::Third {
                        let mut m = [[0u8; 3]; 3];
                        for (r, t) in tri.iter().enumerate() {
                            for (c, &e) in conj.iter().enumerate() {
                                m[r][c] = common(t, &planes[e]).expect("conjugate plane");
                            }
                        }
                        let all: Vec<u8> = m.iter().flatten().copied().collect();
                        let cnt = abc_counts(&all);
                        let ty = SchlafliType::from_counts(cnt.0, cnt.1, cnt.2)
                            .expect("Steiner pair of a known Schläfli type");
                        pair_set.insert(canonical_matrix(m), ty);
                    }
                }
            }
        }
        let pairs: Vec<SteinerPair> =
            pair_set.into_iter().map(|(matrix, schlafli)| SteinerPair { matrix, schlafli }).collect();
        let pair_index: HashMap<[u8; 9], usize> =
            pairs.iter().enumerate().map(|(i, p)| (p.lines(), i)).collect();
        assert_eq!(pair_index.len(), pairs.len(), "pairs are determined by their lines");

        // decompositions and triplets
        let disjoint = |a: usize, b: usize| {
            let la = pairs[a].lines();
            pairs[b].lines().iter().all(|x| !la.contains(x))
        };
        let mut decomp_keys = Vec::new();
        for a in 0..pairs.len() {
            for b in a + 1..pairs.len() {
                if !disjoint(a, b) {
                    continue;
                }
                for c in b + 1..pairs.len() {
                    if disjoint(a, c) && disjoint(b, c) {
                        decomp_keys.push([a, b, c]);
                    }
                }
            }
        }
        let decompositions: Vec<Decomposition> =
            decomp_keys.iter().map(|k| name_decomposition(*k, &pairs)).collect();
        let decomposition_index = decompositions.iter().enumerate().map(|(i, d)| (d.pairs, i)).collect();
        let mut triplets = Vec::new();
        for d in &decompositions {
            for p in PERMS3 {
                triplets.push(Triplet { pairs: p.map(|i| d.pairs[i]) });
            }
        }
        triplets.sort();
        let triplet_index = triplets.iter().enumerate().map(|(i, t)| (t.pairs, i)).collect();

        // sixers by backtracking over skew sets
        let mut sixers = Vec::new();
        let mut stack = Vec::new();
        fn grow(
            start: usize,
            stack: &mut Vec<u8>,
            out: &mut Vec<[u8; 6]>,
            meet: &[[i8; N_LINES]; N_LINES],
        ) {
            if stack.len() == 6 {
                out.push(stack.clone().try_into().expect("six lines"));
                return;
            }
            for x in start..N_LINES {
                if stack.iter().all(|&y| meet[x][y as usize] == 0) {
                    stack.push(x as u8);
                    grow(x + 1, stack, out, meet);
                    stack.pop();
                }
            }
        }
        grow(0, &mut stack, &mut sixers, &meet);
        let sixer_index: HashMap<[u8; 6], usize> =
            sixers.iter().enumerate().map(|(i, s)| (*s, i)).collect();

        let mut ds_set = std::collections::BTreeSet::new();
        for s in &sixers {
            let mut partner = [0u8; 6];
            for (k, &x) in s.iter().enumerate() {
                let cands: Vec<usize> = (0..N_LINES)
                    .filter(|&y| {
                        !s.contains(&(y as u8))
                            && meet[x as usize][y] == 0
                            && s.iter().filter(|&&z| z != x).all(|&z| meet[z as usize][y] == 1)
                    })
                    .collect();
                assert_eq!(cands.len(), 1, "unique partner line");
                partner[k] = cands[0] as u8;
            }
            let mut sorted = partner;
            sorted.sort_unstable();
            assert!(sixer_index.contains_key(&sorted), "partner is a sixer");
            ds_set.insert(DoubleSix::canonical(*s, partner));
        }
        let double_sixes: Vec<DoubleSix> = ds_set.into_iter().collect();
        let double_six_index = double_sixes.iter().enumerate().map(|(i, d)| (d.lines(), i)).collect();

        // enneahedra
        let mut ennea: BTreeMap<[u16; 9], Vec<usize>> = BTreeMap::new();
        for (di, d) in decompositions.iter().enumerate() {
            for choice in 0..8u8 {
                let mut ps = Vec::with_capacity(9);
                for (k, &pi) in d.pairs.iter().enumerate() {
                    let sys = if choice >> k & 1 == 0 { pairs[pi].rows() } else { pairs[pi].columns() };
                    ps.extend(sys.iter().map(|p| plane_index[p] as u16));
                }
                ps.sort_unstable();
                let key: [u16; 9] = ps.try_into().expect("nine planes");
                ennea.entry(key).or_default().push(di);
            }
        }
        let enneahedra =
            ennea.into_iter().map(|(planes, decompositions)| Enneahedron { planes, decompositions }).collect();

        Configuration {
            meet,
            planes,
            plane_index,
            trihedra,
            pairs,
            pair_index,
            decompositions,
            decomposition_index,
            triplets,
            triplet_index,
            sixers,
            sixer_index,
            double_sixes,
            double_six_index,
            enneahedra,
        }
    }

    pub fn meet(&self, x: usize, y: usize) -> i64 {
        self.meet[x][y] as i64
    }

    pub fn tritangent_planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn is_plane(&self, p: &Plane) -> bool {
        self.plane_index.contains_key(&sorted3(*p))
    }

    pub fn plane_index(&self, p: &Plane) -> Option<usize> {
        self.plane_index.get(&sorted3(*p)).copied()
    }

    /// All trihedra as plane indices, with their kind.
    pub fn trihedra(&self) -> &[([u16; 3], TrihedronKind)] {
        &self.trihedra
    }

    /// Kind of a trihedron given by its three planes.
    pub fn trihedron_kind(&self, t: [Plane; 3]) -> Result<TrihedronKind, ConfigError> {
        for p in &t {
            if !self.is_plane(p) {
                return Err(ConfigError::NotATrihedron);
            }
        }
        let shares = |p: &Plane, q: &Plane| p.iter().any(|x| q.contains(x));
        if shares(&t[0], &t[1]) || shares(&t[0], &t[2]) || shares(&t[1], &t[2]) {
            return Err(ConfigError::NotATrihedron);
        }
        let n = self
            .planes
            .iter()
            .filter(|e| t.iter().all(|p| p.iter().filter(|x| e.contains(x)).count() == 1))
            .count();
        Ok(match n {
            0 => TrihedronKind::First,
            1 => TrihedronKind::Second,
            _ => TrihedronKind::Third,
        })
    }

    pub fn steiner_pairs(&self) -> &[SteinerPair] {
        &self.pairs
    }

    pub fn pair_by_lines(&self, lines: &[u8]) -> Option<usize> {
        let mut v = lines.to_vec();
        v.sort_unstable();
        let key: [u8; 9] = v.try_into().ok()?;
        self.pair_index.get(&key).copied()
    }

    pub fn pair_image(&self, pair: usize, g: &Perm) -> usize {
        let img: Vec<u8> = self.pairs[pair].lines().iter().map(|&x| g.apply(x as usize) as u8).collect();
        self.pair_by_lines(&img).expect("automorphisms permute pairs")
    }

    pub fn decompositions(&self) -> &[Decomposition] {
        &self.decompositions
    }

    pub fn decomposition_of(&self, pairs: [usize; 3]) -> Option<usize> {
        let mut p = pairs;
        p.sort_unstable();
        self.decomposition_index.get(&p).copied()
    }

    pub fn decomposition_by_name(&self, name: &str) -> Result<usize, ConfigError> {
        let norm: String = name.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
        self.decompositions
            .iter()
            .position(|d| d.name.replace('_', "") == norm)
            .ok_or_else(|| ConfigError::BadDecompositionName(name.to_string()))
    }

    pub fn decomposition_image(&self, d: usize, g: &Perm) -> usize {
        let p = self.decompositions[d].pairs.map(|x| self.pair_image(x, g));
        self.decomposition_of(p).expect("automorphisms permute decompositions")
    }

    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn triplet_index(&self, t: &Triplet) -> Option<usize> {
        self.triplet_index.get(&t.pairs).copied()
    }

    pub fn triplet_image(&self, t: usize, g: &Perm) -> usize {
        let img = Triplet { pairs: self.triplets[t].pairs.map(|x| self.pair_image(x, g)) };
        self.triplet_index(&img).expect("automorphisms permute triplets")
    }

    /// The triplet of a decomposition in its classical display order.
    pub fn standard_triplet(&self, d: usize) -> Triplet {
        Triplet { pairs: self.decompositions[d].display_order }
    }

    pub fn sixers(&self) -> &[[u8; 6]] {
        &self.sixers
    }

    pub fn sixer_index(&self, s: &[u8]) -> Option<usize> {
        let mut v = s.to_vec();
        v.sort_unstable();
        let key: [u8; 6] = v.try_into().ok()?;
        self.sixer_index.get(&key).copied()
    }

    pub fn sixer_image(&self, s: usize, g: &Perm) -> usize {
        let img: Vec<u8> = self.sixers[s].iter().map(|&x| g.apply(x as usize) as u8).collect();
        self.sixer_index(&img).expect("automorphisms permute sixers")
    }

    pub fn double_sixes(&self) -> &[DoubleSix] {
        &self.double_sixes
    }

    pub fn double_six_image(&self, d: usize, g: &Perm) -> usize {
        let img = self.double_sixes[d].image(g);
        self.double_six_index[&img.lines()]
    }

    /// Partner sixer completing `s` to a double-six.
    pub fn partner_sixer(&self, s: &[u8]) -> Option<[u8; 6]> {
        let mut v = s.to_vec();
        v.sort_unstable();
        self.double_sixes.iter().find_map(|d| {
            if d.rows[0].iter().copied().collect::<std::collections::BTreeSet<_>>()
                == v.iter().copied().collect()
            {
                let mut p = d.rows[1];
                p.sort_unstable();
                Some(p)
            } else if d.rows[1].iter().copied().collect::<std::collections::BTreeSet<_>>()
                == v.iter().copied().collect()
            {
                let mut p = d.rows[0];
                p.sort_unstable();
                Some(p)
            } else {
                None
            }
        })
    }

    /// Double-sixes whose twelve lines lie among the eighteen lines of two
    /// disjoint Steiner pairs.
    pub fn double_sixes_within(&self, t1: usize, t2: usize) -> Result<Vec<DoubleSix>, ConfigError> {
        let l1 = self.pairs[t1].lines();
        let l2 = self.pairs[t2].lines();
        if l1.iter().any(|x| l2.contains(x)) {
            return Err(ConfigError::NotDisjoint);
        }
        let inside = |x: &u8| l1.contains(x) || l2.contains(x);
        Ok(self.double_sixes.iter().filter(|d| d.lines().iter().all(inside)).copied().collect())
    }

    pub fn enneahedra(&self) -> &[Enneahedron] {
        &self.enneahedra
    }

    /// `J[i][j] = |T_i ∩ T'_j|` for the pairs in display order.
    pub fn intersection_sizes(&self, d1: usize, d2: usize) -> [[usize; 3]; 3] {
        let a = self.decompositions[d1].display_order;
        let b = self.decompositions[d2].display_order;
        let mut j = [[0usize; 3]; 3];
        for (r, &p) in a.iter().enumerate() {
            let lp = self.pairs[p].lines();
            for (c, &q) in b.iter().enumerate() {
                j[r][c] = self.pairs[q].lines().iter().filter(|x| lp.contains(x)).count();
            }
        }
        j
    }

    /// Matrix of mutual intersections `I[i][j] = T_i ∩ T'_j`.
    pub fn intersection_sets(&self, d1: usize, d2: usize) -> [[Vec<u8>; 3]; 3] {
        let a = self.decompositions[d1].display_order;
        let b = self.decompositions[d2].display_order;
        let set = |p: usize, q: usize| {
            let lp = self.pairs[p].lines();
            self.pairs[q].lines().iter().filter(|x| lp.contains(x)).copied().collect::<Vec<u8>>()
        };
        [0, 1, 2].map(|r| [0, 1, 2].map(|c| set(a[r], b[c])))
    }

    /// Type A (all intersections of size 3) or B (the 5/2 pattern).
    pub fn decomposition_pair_type(&self, d1: usize, d2: usize) -> Result<PairType, ConfigError> {
        if d1 == d2 {
            return Err(ConfigError::SameDecomposition);
        }
        let j = self.intersection_sizes(d1, d2);
        if j.iter().flatten().all(|&x| x == 3) {
            return Ok(PairType::A);
        }
        // 5/2 pattern: some column permutation puts 5 on the diagonal
        let is_b = PERMS3.iter().any(|p| {
            (0..3).all(|r| (0..3).all(|c| j[r][p[c]] == if r == c { 5 } else { 2 }))
        });
        assert!(is_b, "unexpected intersection pattern {j:?}");
        Ok(PairType::B)
    }
}

fn name_decomposition(pairs: [usize; 3], all: &[SteinerPair]) -> Decomposition {
    let idx_of = |l: u8| -> Vec<u8> {
        match label(l as usize) {
            LineLabel::A(i) | LineLabel::B(i) => vec![i],
            LineLabel::C(i, j) => vec![i, j],
        }
    };
    let types: Vec<SchlafliType> = pairs.iter().map(|&p| all[p].schlafli).collect();
    if types.contains(&SchlafliType::II) {
        // The type-II pair is {c_xy : x in P, y in Q}; P is the part containing 1.
        let ii = pairs[types.iter().position(|t| *t == SchlafliType::II).expect("type II")];
        let edges: Vec<Vec<u8>> = all[ii].lines().iter().map(|&l| idx_of(l)).collect();
        let p2: Vec<u8> =
            (2..=6).filter(|x| edges.iter().any(|e| e.contains(&1) && e.contains(x))).collect();
        let mut p1: Vec<u8> = (1..=6).filter(|x| !p2.contains(x)).collect();
        p1.sort_unstable();
        let first = pairs
            .iter()
            .copied()
            .find(|&p| p != ii && all[p].lines().iter().all(|&l| idx_of(l).iter().all(|x| p1.contains(x))))
            .expect("type-I pair on the first triple");
        let second = pairs.iter().copied().find(|&p| p != ii && p != first).expect("second type-I pair");
        let s = |v: &[u8]| v.iter().map(|x| x.to_string()).collect::<String>();
        Decomposition {
            pairs,
            kind: DecompositionKind::TwoTriples,
            name: format!("St_({})({})", s(&p1), s(&p2)),
            display_order: [first, second, ii],
        }
    } else {
        // Each type-III pair has a-lines on {i,j} and b-lines on {k,l}.
        let ab = |p: usize| -> (Vec<u8>, Vec<u8>) {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for &l in all[p].lines().iter() {
                match label(l as usize) {
                    LineLabel::A(i) => a.push(i),
                    LineLabel::B(i) => b.push(i),
                    _ => {}
                }
            }
            a.sort_unstable();
            b.sort_unstable();
            (a, b)
        };
        let first = pairs.iter().copied().find(|&p| ab(p).0.contains(&1)).expect("a1 is covered");
        let next_of = |p: usize| {
            let b = ab(p).1;
            pairs.iter().copied().find(|&q| ab(q).0 == b).expect("cyclic chain of pairs")
        };
        let second = next_of(first);
        let third = next_of(second);
        let s = |v: Vec<u8>| v.iter().map(|x| x.to_string()).collect::<String>();
        Decomposition {
            pairs,
            kind: DecompositionKind::ThreePairs,
            name: format!("St_({})({})({})", s(ab(first).0), s(ab(second).0), s(ab(third).0)),
            display_order: [first, second, third],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> LineLabel {
        s.parse().unwrap()
    }

    #[test]
    fn label_roundtrip() {
        for i in 0..N_LINES {
            let lab = label(i);
            assert_eq!(lab.index(), i);
            assert_eq!(lab.to_string().parse::<LineLabel>().unwrap(), lab);
        }
        assert!("c11".parse::<LineLabel>().is_err());
        assert!("a7".parse::<LineLabel>().is_err());
        assert_eq!(l("c21"), LineLabel::C(1, 2));
    }

    #[test]
    fn intersections() {
        assert_eq!(intersection(l("a1"), l("a1")), -1);
        assert_eq!(intersection(l("a1"), l("b1")), 0);
        assert_eq!(intersection(l("a1"), l("b2")), 1);
        assert_eq!(intersection(l("c12"), l("c34")), 1);
        for x in all_labels() {
            let c = x.pic_class();
            assert_eq!(pairing(&c, &c), -1);
            assert_eq!(pairing(&c, &CANONICAL_CLASS), -1);
            let meets = all_labels().iter().filter(|y| intersection(*x, **y) == 1).count();
            assert_eq!(meets, 10);
        }
    }

    #[test]
    fn planes() {
        let cfg = Configuration::get();
        assert_eq!(cfg.tritangent_planes().len(), 45);
        let p = |a: &str, b: &str, c: &str| [l(a).index() as u8, l(b).index() as u8, l(c).index() as u8];
        assert!(cfg.is_plane(&p("a1", "b2", "c12")));
        assert!(!cfg.is_plane(&p("a1", "a2", "c12")));
        for x in 0..N_LINES as u8 {
            assert_eq!(cfg.tritangent_planes().iter().filter(|q| q.contains(&x)).count(), 5);
        }
    }

    #[test]
    fn steiner_pairs_by_type() {
        let cfg = Configuration::get();
        let pairs = cfg.steiner_pairs();
        assert_eq!(pairs.len(), 120);
        let count = |t| pairs.iter().filter(|p| p.schlafli_type() == t).count();
        assert_eq!((count(SchlafliType::I), count(SchlafliType::II), count(SchlafliType::III)), (20, 10, 90));
        let m = [["a1", "b2", "c12"], ["b3", "c23", "a2"], ["c13", "a3", "b1"]].map(|r| r.map(l));
        let sp = SteinerPair::from_labels(m).unwrap();
        assert!(pairs.contains(&sp));
        assert_eq!(sp.schlafli_type(), SchlafliType::I);
    }

    #[test]
    fn trihedron_kinds() {
        let cfg = Configuration::get();
        for p in cfg.steiner_pairs() {
            assert_eq!(cfg.trihedron_kind(p.rows()).unwrap(), TrihedronKind::Third);
            assert_eq!(cfg.trihedron_kind(p.columns()).unwrap(), TrihedronKind::Third);
        }
        assert!(cfg.trihedra().iter().any(|t| t.1 == TrihedronKind::First));
        let third = cfg.trihedra().iter().filter(|t| t.1 == TrihedronKind::Third).count();
        assert_eq!(third, 240);
        let bad = cfg.tritangent_planes()[0];
        assert_eq!(cfg.trihedron_kind([bad, bad, bad]), Err(ConfigError::NotATrihedron));
    }

    #[test]
    fn decompositions_and_triplets() {
        let cfg = Configuration::get();
        assert_eq!(cfg.decompositions().len(), 40);
        assert_eq!(cfg.triplets().len(), 240);
        let k1 = cfg.decompositions().iter().filter(|d| d.kind == DecompositionKind::TwoTriples).count();
        assert_eq!(k1, 10);
        let st = cfg.decomposition_by_name("St_(123)(456)").unwrap();
        let d = &cfg.decompositions()[st];
        let t3: Vec<u8> = (1..=3)
            .flat_map(|i| (4..=6).map(move |j| LineLabel::C(i, j).index() as u8))
            .collect();
        assert_eq!(cfg.steiner_pairs()[d.display_order[2]].lines().to_vec(), {
            let mut v = t3.clone();
            v.sort_unstable();
            v
        });
        assert!(cfg.decomposition_by_name("St_(14)(25)(36)").is_ok());
        assert!(cfg.decomposition_by_name("St_(12)(34)(56)").is_ok());
        let names: std::collections::HashSet<&str> =
            cfg.decompositions().iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names.len(), 40);
    }

    #[test]
    fn sixers_and_double_sixes() {
        let cfg = Configuration::get();
        assert_eq!(cfg.sixers().len(), 72);
        assert_eq!(cfg.double_sixes().len(), 36);
        let a: Vec<u8> = (0..6).collect();
        let b: [u8; 6] = [6, 7, 8, 9, 10, 11];
        assert_eq!(cfg.partner_sixer(&a), Some(b));
        let ds = DoubleSix::canonical([0, 1, 2, 3, 4, 5], b);
        assert!(cfg.double_sixes().contains(&ds));
    }

    #[test]
    fn double_sixes_in_two_pairs() {
        let cfg = Configuration::get();
        for d in cfg.decompositions() {
            for (x, y) in [(0, 1), (0, 2), (1, 2)] {
                let ds = cfg.double_sixes_within(d.pairs[x], d.pairs[y]).unwrap();
                assert_eq!(ds.len(), 3);
                for i in 0..3 {
                    for j in i + 1..3 {
                        let li = ds[i].lines();
                        let common = ds[j].lines().iter().filter(|z| li.contains(z)).count();
                        assert_eq!(common, 6);
                    }
                }
            }
        }
    }

    #[test]
    fn enneahedra_counts() {
        let cfg = Configuration::get();
        let e = cfg.enneahedra();
        assert_eq!(e.len(), 200);
        assert_eq!(e.iter().filter(|x| x.decompositions.len() == 4).count(), 40);
        assert_eq!(e.iter().filter(|x| x.decompositions.len() == 1).count(), 160);
    }

    #[test]
    fn pair_types_from_standard() {
        let cfg = Configuration::get();
        let st = cfg.decomposition_by_name("St_(123)(456)").unwrap();
        let mut a = 0;
        let mut b = 0;
        for d in 0..cfg.decompositions().len() {
            if d == st {
                assert_eq!(cfg.decomposition_pair_type(d, d), Err(ConfigError::SameDecomposition));
                continue;
            }
            match cfg.decomposition_pair_type(st, d).unwrap() {
                PairType::A => a += 1,
                PairType::B => b += 1,
            }
        }
        assert_eq!((a, b), (12, 27));
        let ta = cfg.decomposition_by_name("St_(14)(25)(36)").unwrap();
        let tb = cfg.decomposition_by_name("St_(12)(34)(56)").unwrap();
        let tc = cfg.decomposition_by_name("St_(124)(356)").unwrap();
        assert_eq!(cfg.decomposition_pair_type(st, ta).unwrap(), PairType::A);
        assert_eq!(cfg.decomposition_pair_type(st, tb).unwrap(), PairType::B);
        assert_eq!(cfg.decomposition_pair_type(st, tc).unwrap(), PairType::B);
    }
}
