use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::RotationSystem;

/// Isomorphism-invariant encoding of a spherical map, identifying mirror
/// images.
///
/// The code is the lexicographically least breadth-first planar code over all
/// starting darts and both rotational senses. Each entry is stored as a
/// big-endian `u16`; the first entry is the vertex count, so codes order by
/// size first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    bytes: Vec<u8>,
}

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s).ok()?;
        let code = CanonicalCode { bytes };
        code.decode().map(|_| code)
    }

    pub fn vertex_count(&self) -> usize {
        u16::from_be_bytes([self.bytes[0], self.bytes[1]]) as usize
    }

    fn entries(&self) -> impl Iterator<Item = u16> + '_ {
        self.bytes.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]))
    }

    /// Rebuilds the map the code describes (the canonical representative).
    pub fn decode(&self) -> Option<RotationSystem> {
        if self.bytes.len() < 2 || !self.bytes.len().is_multiple_of(2) {
            return None;
        }
        let mut it = self.entries();
        let n = it.next()? as usize;
        let mut rot = vec![Vec::new(); n];
        let mut v = 0;
        for x in it {
            if v >= n {
                return None;
            }
            if x == 0 {
                v += 1;
            } else {
                rot[v].push(x as usize - 1);
            }
        }
        if v != n {
            return None;
        }
        RotationSystem::new(rot).ok()
    }

    /// 64-bit FNV-1a digest, used to derive deterministic solver seeds.
    pub fn digest(&self) -> u64 {
        self.bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonicalCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalCode::from_hex(&s).ok_or_else(|| serde::de::Error::custom("invalid canonical code"))
    }
}

struct Scratch {
    num: Vec<u16>,
    first: Vec<usize>,
    order: Vec<usize>,
    code: Vec<u16>,
}

/// Breadth-first code from dart `start -> rot[start][first]`. Compares against
/// `best` while writing and aborts as soon as the code is known to be larger.
fn bfs_code(rs: &RotationSystem, start: usize, first: usize, forward: bool, best: &[u16], s: &mut Scratch) -> Ordering {
    let n = rs.vertex_count();
    s.num.iter_mut().for_each(|x| *x = 0);
    s.order.clear();
    s.code.clear();
    let mut cmp = if best.is_empty() { Ordering::Less } else { Ordering::Equal };
    let mut emit = |x: u16, code: &mut Vec<u16>| -> bool {
        let k = code.len();
        code.push(x);
        if cmp == Ordering::Equal {
            cmp = x.cmp(&best[k]);
        }
        cmp != Ordering::Greater
    };
    if !emit(n as u16, &mut s.code) {
        return Ordering::Greater;
    }
    s.num[start] = 1;
    s.first[start] = first;
    s.order.push(start);
    let mut next_num = 2u16;
    let mut head = 0;
    while head < s.order.len() {
        let v = s.order[head];
        head += 1;
        let rot = rs.neighbors(v);
        let d = rot.len();
        for step in 0..d {
            let i = if forward { (s.first[v] + step) % d } else { (s.first[v] + d - step) % d };
            let u = rot[i];
            if s.num[u] == 0 {
                s.num[u] = next_num;
                next_num += 1;
                s.first[u] = rs.position(u, v).expect("symmetric");
                s.order.push(u);
            }
            if !emit(s.num[u], &mut s.code) {
                return Ordering::Greater;
            }
        }
        if !emit(0, &mut s.code) {
            return Ordering::Greater;
        }
    }
    cmp
}

/// Canonical code together with the canonical vertex numbering
/// (`perm[old] = new`) and whether that numbering reads the map mirrored.
pub(crate) fn canonical_labeling(rs: &RotationSystem) -> (CanonicalCode, Vec<usize>, bool) {
    let n = rs.vertex_count();
    let mut s = Scratch { num: vec![0; n], first: vec![0; n], order: Vec::with_capacity(n), code: Vec::new() };
    let mut best: Vec<u16> = Vec::new();
    let mut best_perm = Vec::new();
    let mut best_forward = true;
    // starts restricted by an isomorphism- and mirror-invariant signature:
    // the vertex degree followed by its neighbors' degrees, largest first
    let sig: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut d: Vec<usize> = rs.neighbors(v).iter().map(|&u| rs.degree(u)).collect();
            d.sort_unstable_by(|a, b| b.cmp(a));
            d.insert(0, rs.degree(v));
            d
        })
        .collect();
    let top = sig.iter().max().cloned().unwrap_or_default();
    for v in (0..n).filter(|&v| sig[v] == top) {
        let best_nbr = rs.neighbors(v).iter().map(|&u| &sig[u]).max().cloned().unwrap_or_default();
        for first in 0..rs.degree(v) {
            if sig[rs.neighbors(v)[first]] != best_nbr {
                continue;
            }
            for forward in [true, false] {
                if bfs_code(rs, v, first, forward, &best, &mut s) == Ordering::Less {
                    best = s.code.clone();
                    best_perm = s.num.iter().map(|&x| x as usize - 1).collect();
                    best_forward = forward;
                }
            }
        }
    }
    if n == 1 {
        best = vec![1, 0];
        best_perm = vec![0];
    }
    let bytes = best.iter().flat_map(|x| x.to_be_bytes()).collect();
    (CanonicalCode { bytes }, best_perm, !best_forward)
}

impl RotationSystem {
    pub fn canonical_code(&self) -> CanonicalCode {
        canonical_labeling(self).0
    }

    /// Canonical representative of the isomorphism class (mirror images
    /// identified).
    pub fn canonical_form(&self) -> RotationSystem {
        self.canonical_code().decode().expect("canonical code decodes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::shapes;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn decode_round_trip() {
        for rs in [shapes::dodecahedron().skeleton().clone(), shapes::pyramid(5), shapes::path(4)] {
            let code = rs.canonical_code();
            let back = code.decode().unwrap();
            assert_eq!(back.canonical_code(), code);
            assert_eq!(CanonicalCode::from_hex(&code.to_hex()), Some(code));
        }
    }

    #[test]
    fn relabel_and_mirror_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in [shapes::dodecahedron(), shapes::antiprism(4), shapes::prism(5)] {
            let code = p.skeleton().canonical_code();
            for _ in 0..5 {
                let mut perm: Vec<usize> = (0..p.vertex_count()).collect();
                perm.shuffle(&mut rng);
                assert_eq!(p.relabel(&perm).skeleton().canonical_code(), code);
                assert_eq!(p.relabel(&perm).mirror().skeleton().canonical_code(), code);
            }
        }
    }

    #[test]
    fn distinct_maps_get_distinct_codes() {
        let a = shapes::octahedron().skeleton().canonical_code();
        let b = shapes::antiprism(4).skeleton().canonical_code();
        let c = shapes::prism(4).skeleton().canonical_code();
        assert_ne!(a, b);
        assert_ne!(b, c);
        assert!(a < b, "codes order by vertex count first");
    }

    #[test]
    fn chiral_pair_identified() {
        // pentagonal antiprism is achiral, but any relabeled mirror must match
        let p = shapes::antiprism(5);
        assert_eq!(p.skeleton().canonical_code(), p.mirror().skeleton().canonical_code());
    }
}
