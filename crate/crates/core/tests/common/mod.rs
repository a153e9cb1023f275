//! Independent brute-force oracles shared by the integration tests. None of
//! these call into the algorithms they are used to check.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::hash::{BuildHasherDefault, Hasher};

use grouptk::coxeter::CoxeterMatrix;
use grouptk::graphprod::{CommutationGraph, Syllable};
use grouptk::words::{Generator, Word};

pub fn codes(w: &Word) -> Vec<u8> {
    w.letters().iter().map(|g| g.code() as u8).collect()
}

pub fn from_codes(c: &[u8]) -> Word {
    Word::reduce(c.iter().map(|&x| Generator::from_code(x as usize)))
}

/// Calls `f` on every freely reduced word over `rank` generators of length
/// at most `max_len` that starts with `prefix` (as letter codes).
pub fn for_each_reduced_word(rank: usize, max_len: usize, prefix: &[u8], f: &mut impl FnMut(&[u8])) {
    let mut buf = prefix.to_vec();
    fn rec(rank: usize, max_len: usize, buf: &mut Vec<u8>, f: &mut impl FnMut(&[u8])) {
        f(buf);
        if buf.len() == max_len {
            return;
        }
        for c in 0..(2 * rank) as u8 {
            if buf.last() == Some(&(c ^ 1)) {
                continue;
            }
            buf.push(c);
            rec(rank, max_len, buf, f);
            buf.pop();
        }
    }
    rec(rank, max_len, &mut buf, f);
}

fn cancellation(a: &[u8], b: &[u8]) -> usize {
    let mut k = 0;
    while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[k] ^ 1 {
        k += 1;
    }
    k
}

fn product(a: &[u8], b: &[u8], out: &mut Vec<u8>) {
    let k = cancellation(a, b);
    out.clear();
    out.extend_from_slice(&a[..a.len() - k]);
    out.extend_from_slice(&b[k..]);
}

/// All words of length at most `max_len` that are products of at most three
/// conjugates `g r^{±1} g⁻¹` with `|g| ≤ conj_len`.
pub fn conjugate_product_trivial_words(relators: &[Word], rank: usize, conj_len: usize, max_len: usize) -> HashSet<Vec<u8>> {
    let mut conjugators = Vec::new();
    for_each_reduced_word(rank, conj_len, &[], &mut |w| conjugators.push(from_codes(w)));
    let mut s1: Vec<Vec<u8>> = conjugators
        .iter()
        .flat_map(|g| relators.iter().flat_map(move |r| [r.clone(), r.inverse()].map(|x| codes(&x.conjugate(g)))))
        .collect();
    s1.sort();
    s1.dedup();

    let mut trivial: HashSet<Vec<u8>> = HashSet::new();
    trivial.insert(Vec::new());
    for w in &s1 {
        if w.len() <= max_len {
            trivial.insert(w.clone());
        }
    }
    let longest = s1.iter().map(Vec::len).max().unwrap_or(0);
    let shortest = s1.iter().map(Vec::len).min().unwrap_or(0);
    let mut pair = Vec::new();
    let mut triple = Vec::new();
    for a in &s1 {
        for b in &s1 {
            let k = cancellation(a, b);
            let p = a.len() + b.len() - 2 * k;
            if p > max_len + longest {
                continue;
            }
            product(a, b, &mut pair);
            if p <= max_len {
                trivial.insert(pair.clone());
            }
            // A third factor c must cancel at least (p + |c| − max_len)/2
            // letters against the end of the pair product.
            let need = (p + shortest).saturating_sub(max_len).div_ceil(2).min(p);
            let key: Vec<u8> = pair[p - need..].iter().rev().map(|&x| x ^ 1).collect();
            let lo = s1.partition_point(|c| c.as_slice() < key.as_slice());
            for c in s1[lo..].iter().take_while(|c| c.starts_with(&key)) {
                if p + c.len() - 2 * cancellation(&pair, c) <= max_len {
                    product(&pair, c, &mut triple);
                    trivial.insert(triple.clone());
                }
            }
        }
    }
    trivial
}

/// Normal form of a graph-product word by exhaustive search: breadth-first
/// closure under swapping adjacent commuting syllables and merging adjacent
/// syllables on the same vertex; the answer is the lexicographically least
/// (by vertex, then exponent) among the shortest words reached.
///
/// Words of up to seven syllables with vertices in `0..16` and exponents in
/// `−8..8` are packed into a `u64`, one byte per syllable, so that for equal
/// lengths integer order is lexicographic order.
pub fn gp_bfs_normal_form(seq: &[Syllable], graph: &CommutationGraph) -> Vec<Syllable> {
    GpOracle::new(graph).normal_form(seq)
}

/// [`gp_bfs_normal_form`] with the commutation table and search buffers kept
/// between calls.
pub struct GpOracle {
    commute: [[bool; 16]; 16],
    seen: HashSet<u64, BuildHasherDefault<MulHasher>>,
    queue: VecDeque<u64>,
}

impl GpOracle {
    pub fn new(graph: &CommutationGraph) -> Self {
        let mut commute = [[false; 16]; 16];
        for (a, row) in commute.iter_mut().enumerate() {
            for (b, c) in row.iter_mut().enumerate() {
                *c = graph.commute(a as i64, b as i64);
            }
        }
        GpOracle { commute, seen: HashSet::default(), queue: VecDeque::new() }
    }

    pub fn normal_form(&mut self, seq: &[Syllable]) -> Vec<Syllable> {
        assert!(seq.len() <= 7, "oracle handles at most seven syllables");
        let start: Vec<u8> = seq
            .iter()
            .filter(|s| s.exponent != 0)
            .map(|s| {
                assert!((0..16).contains(&s.vertex) && s.exponent.abs() <= 7);
                (s.vertex as u8) << 4 | (s.exponent + 8) as u8
            })
            .collect();
        let commute = &self.commute;
        let (seen, queue) = (&mut self.seen, &mut self.queue);
        seen.clear();
        let first = pack(&start);
        seen.insert(first);
        queue.push_back(first);
        let mut best = first;
        while let Some(code) = queue.pop_front() {
            best = best.min(code);
            let len = (code >> 56) as usize;
            for i in 0..len.saturating_sub(1) {
                let (a, b) = (byte(code, i), byte(code, i + 1));
                let (va, vb) = ((a >> 4) as usize, (b >> 4) as usize);
                let next = if va == vb {
                    let e = (a & 15) as i64 + (b & 15) as i64 - 16;
                    assert!(e.abs() <= 7, "exponent overflow in oracle");
                    let merged = remove_byte(code, i + 1);
                    if e == 0 {
                        remove_byte(merged, i)
                    } else {
                        set_byte(merged, i, (va as u8) << 4 | (e + 8) as u8)
                    }
                } else if commute[va][vb] {
                    set_byte(set_byte(code, i, b), i + 1, a)
                } else {
                    continue;
                };
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        let mut buf = Vec::new();
        unpack(best, &mut buf);
        buf.iter().map(|&b| Syllable::new((b >> 4) as i64, (b & 15) as i64 - 8)).collect()
    }
}

fn byte(c: u64, i: usize) -> u8 {
    (c >> (48 - 8 * i)) as u8
}

fn set_byte(c: u64, i: usize, b: u8) -> u64 {
    let shift = 48 - 8 * i;
    c & !(0xff << shift) | (b as u64) << shift
}

/// Deletes syllable `i`, shifting the later ones up.
fn remove_byte(c: u64, i: usize) -> u64 {
    let len = (c >> 56) as usize;
    let body = c & ((1 << 56) - 1);
    let shift = 56 - 8 * i; // bits at and below this belong to syllables ≥ i
    let keep_hi = body & !((1u64 << shift) - 1);
    let low = (body & ((1u64 << (shift - 8)) - 1)) << 8;
    ((len as u64 - 1) << 56) | keep_hi | low
}

/// Length in the top byte, then the syllables from the most significant
/// byte down.
fn pack(w: &[u8]) -> u64 {
    let mut c = (w.len() as u64) << 56;
    for (i, &b) in w.iter().enumerate() {
        c |= (b as u64) << (48 - 8 * i);
    }
    c
}

fn unpack(c: u64, out: &mut Vec<u8>) {
    out.clear();
    let len = (c >> 56) as usize;
    out.extend((0..len).map(|i| (c >> (48 - 8 * i)) as u8));
}

/// Multiplicative hashing for `u64` keys.
#[derive(Default)]
pub struct MulHasher(u64);

impl Hasher for MulHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100_0000_01b3);
        }
    }
    fn write_u64(&mut self, x: u64) {
        self.0 = (x ^ (x >> 29)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

/// Triviality in a Coxeter group by the full rewriting closure: every word
/// reachable by deleting an adjacent equal pair or applying a braid move.
pub fn coxeter_closure_trivial(word: &[i64], matrix: &CoxeterMatrix) -> bool {
    let mut seen: HashSet<Vec<i64>> = HashSet::from([word.to_vec()]);
    let mut queue = VecDeque::from([word.to_vec()]);
    while let Some(w) = queue.pop_front() {
        if w.is_empty() {
            return true;
        }
        let mut next = Vec::new();
        for i in 0..w.len().saturating_sub(1) {
            if w[i] == w[i + 1] {
                let mut v = w.clone();
                v.drain(i..i + 2);
                next.push(v);
                continue;
            }
            if let Some(m) = matrix.entry(w[i], w[i + 1]).finite() {
                let m = m as usize;
                let (s, t) = (w[i], w[i + 1]);
                if i + m <= w.len() && (0..m).all(|j| w[i + j] == if j % 2 == 0 { s } else { t }) {
                    let mut v = w.clone();
                    for j in 0..m {
                        v[i + j] = if j % 2 == 0 { t } else { s };
                    }
                    next.push(v);
                }
            }
        }
        for v in next {
            if seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    false
}

/// Kernels of all surjections from `F_m` onto cyclic groups `Z/k`,
/// `2 ≤ k ≤ n`, identified by which reduced words of length at most `2n`
/// they contain. Every group of order at most 3 is cyclic, so for `n ≤ 3`
/// these are all normal subgroups of index between 2 and `n`.
pub fn cyclic_kernel_signatures(m: usize, n: usize) -> BTreeSet<Vec<bool>> {
    let mut words: Vec<Vec<u8>> = Vec::new();
    for_each_reduced_word(m, 2 * n, &[], &mut |w| words.push(w.to_vec()));
    let mut out = BTreeSet::new();
    for k in 2..=n {
        for code in 0..k.pow(m as u32) {
            let images: Vec<usize> = (0..m).map(|i| code / k.pow(i as u32) % k).collect();
            let onto = images.iter().fold(k, |g, &x| gcd(g, x)) == 1;
            if !onto {
                continue;
            }
            let sig = words
                .iter()
                .map(|w| {
                    let s: i64 = w
                        .iter()
                        .map(|&c| {
                            let v = images[(c >> 1) as usize] as i64;
                            if c & 1 == 1 { -v } else { v }
                        })
                        .sum();
                    s.rem_euclid(k as i64) == 0
                })
                .collect();
            out.insert(sig);
        }
    }
    out
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Words of length at most `max_len` in signature order, for comparing kernel
/// certificates with [`cyclic_kernel_signatures`].
pub fn signature_words(m: usize, max_len: usize) -> Vec<Word> {
    let mut words = Vec::new();
    for_each_reduced_word(m, max_len, &[], &mut |w| words.push(from_codes(w)));
    words
}
