//! End-to-end acceptance suite. Runs every criterion, prints one PASS/FAIL
//! line each (with wall time against its limit) and exits non-zero if any
//! criterion fails.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use grouptk::abels::{self, Membership, ZInvP};
use grouptk::chabauty::{self, in_open_set, MarkedGroup, Separation, Verdict};
use grouptk::coxeter::{self, CoxVerdict, CoxWord, CoxeterMatrix, Order, DEFAULT_NODE_BUDGET};
use grouptk::exec::Exec;
use grouptk::graphprod::{self, CommutationGraph, Syllable};
use grouptk::indfam::{injectivity_bruteforce, is_independent, FamilyHandle};
use grouptk::io::parse_presentation;
use grouptk::smallcancel::{self, C16Verdict, DehnEngine, Independence, RelatorFamily};
use grouptk::thompson::{self as th, DyadicPL};
use grouptk::words::{occurrences, Alphabet, Generator, Scan, Word};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn surface_family() -> RelatorFamily {
    let p = parse_presentation("a1 b1 a2 b2\na1 b1 A1 B1 a2 b2 A2 B2\n").expect("static presentation");
    p.into_family().expect("surface relator")
}

fn criterion_1() -> Outcome {
    let family = surface_family();
    ensure!(smallcancel::check_c16(&family).is_ok(), "genus-2 relator rejected by the C'(1/6) check");
    let engine = DehnEngine::new(&family).map_err(|e| e.to_string())?;
    let oracle = common::conjugate_product_trivial_words(family.relators(), 4, 4, 8);

    // Partition the sweep by the first two letters.
    let mut prefixes: Vec<Vec<u8>> = vec![vec![]];
    for a in 0..8u8 {
        prefixes.push(vec![a]);
        for b in (0..8u8).filter(|&b| b != a ^ 1) {
            prefixes.push(vec![a, b]);
        }
    }
    let stats = Exec::default().map(&prefixes, |prefix| {
        let mut out = [0u64; 4]; // words, trivial, mismatches, trace violations
        let mut letters = Vec::with_capacity(8);
        let mut visit = |w: &[u8]| {
            letters.clear();
            letters.extend(w.iter().map(|&c| Generator::from_code(c as usize)));
            let (len, steps) = engine.reduce_count(&letters);
            out[0] += 1;
            out[1] += (len == 0) as u64;
            out[2] += ((len == 0) != oracle.contains(w)) as u64;
            out[3] += (steps > w.len()) as u64;
        };
        if prefix.len() < 2 {
            visit(prefix);
        } else {
            common::for_each_reduced_word(4, 8, prefix, &mut visit);
        }
        out
    });
    let total = stats.iter().fold([0u64; 4], |acc, s| std::array::from_fn(|i| acc[i] + s[i]));
    ensure!(total[2] == 0, "{} disagreements with the conjugate-product oracle", total[2]);
    ensure!(total[3] == 0, "{} traces longer than the input", total[3]);
    ensure!(total[1] == oracle.len() as u64, "trivial count {} vs oracle {}", total[1], oracle.len());

    // Full traces on a sample: each step shortens the word.
    for w in common::signature_words(4, 4).iter().step_by(97) {
        let probe = w.concat(&family.relators()[0].conjugate(w));
        let (_, trace) = engine.reduce(&probe);
        ensure!(trace.steps.len() <= probe.len(), "trace too long for {probe:?}");
        ensure!(trace.steps.iter().all(|s| s.output.len() < s.input.len()), "non-shortening step");
    }
    Ok(format!("{} words, {} trivial", total[0], total[1]))
}

/// Vectors of `[−2, 2]^d` up to sign (a vector and its negative generate
/// the same subgroup), including zero.
fn signed_grid(d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let count = 5usize.pow(d as u32);
    for code in 0..count {
        let v: Vec<i64> = (0..d).map(|i| (code / 5usize.pow(i as u32) % 5) as i64 - 2).collect();
        let first = v.iter().find(|&&x| x != 0).copied().unwrap_or(0);
        if first >= 0 {
            out.push(v);
        }
    }
    out
}

fn multisets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, size: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in from..n {
            cur.push(i);
            rec(n, size, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, size, 0, &mut Vec::new(), &mut out);
    out
}

fn criterion_2() -> Outcome {
    for n in 2..=10 {
        let alphabet = Alphabet::numbered("x", 2);
        let family = smallcancel::make_c16_family(&alphabet, n).map_err(|e| e.to_string())?;
        let verdict = smallcancel::independence_check(&family, Exec::default()).map_err(|e| e.to_string())?;
        ensure!(verdict == Independence::Ok, "make_c16_family({n}) reported {verdict:?}");
    }
    let mut checked = 0usize;
    let mut dependent = 0usize;
    for d in 1..=3 {
        let grid = signed_grid(d);
        for size in 1..=4 {
            let choices = multisets(grid.len(), size);
            let results = Exec::default().map(&choices, |idx| {
                let gens: Vec<Vec<i64>> = idx.iter().map(|&i| grid[i].clone()).collect();
                let family = FamilyHandle::cyclic(d, &gens).expect("valid family");
                let fast = is_independent(&family, Exec::Sequential).is_ok();
                let slow = injectivity_bruteforce(&family, Exec::Sequential).expect("within limit");
                (fast == slow, !fast)
            });
            if let Some(pos) = results.iter().position(|r| !r.0) {
                let gens: Vec<&Vec<i64>> = choices[pos].iter().map(|&i| &grid[i]).collect();
                return Err(format!("criterion and brute force disagree on {gens:?}"));
            }
            checked += results.len();
            dependent += results.iter().filter(|r| r.1).count();
        }
    }
    Ok(format!("{checked} families, {dependent} dependent"))
}

fn criterion_3() -> Outcome {
    let mut subsets = 0;
    for s in 1..=6u64 {
        let others: Vec<u64> = (1..=6).filter(|&d| d != s).collect();
        for mask in 0..(1u32 << others.len()) {
            let j: BTreeSet<u64> = (0..others.len()).filter(|b| mask >> b & 1 == 1).map(|b| others[b]).collect();
            let ok = graphprod::wreath_independence(s, &j, 6).map_err(|e| e.to_string())?;
            ensure!(ok, "wreath_independence({s}, {j:?}) = false");
            subsets += 1;
        }
    }
    for mask in 0..(1u32 << 6) {
        let j: BTreeSet<u64> = (1..=6).filter(|d| mask >> (d - 1) & 1 == 1).collect();
        let graph = CommutationGraph::with_distances(j.iter().copied());
        for s in 1..=6u64 {
            let c = graphprod::gp_normalize(&graphprod::vertex_commutator(0, s as i64), &graph);
            ensure!(graphprod::gp_is_trivial(&c) == j.contains(&s), "[x0, x{s}] wrong over J = {j:?}");
        }
    }

    let graphs = [
        CommutationGraph::empty(),
        CommutationGraph::with_distances([1]),
        CommutationGraph::with_distances([2]),
        CommutationGraph::with_distances([1, 3]),
        CommutationGraph::with_distances([1, 2]),
        CommutationGraph::complete(),
    ];
    let mut sequences: Vec<Vec<Syllable>> = vec![vec![]];
    let mut frontier = sequences.clone();
    for _ in 0..6 {
        let mut next = Vec::new();
        for seq in &frontier {
            for v in 0..5 {
                for e in [-1, 1] {
                    let mut s = seq.clone();
                    s.push(Syllable::new(v, e));
                    next.push(s);
                }
            }
        }
        sequences.extend(next.iter().cloned());
        frontier = next;
    }
    let chunks: Vec<&[Vec<Syllable>]> = sequences.chunks(4096).collect();
    for graph in &graphs {
        let bad = Exec::default().map(&chunks, |chunk| {
            let mut oracle = common::GpOracle::new(graph);
            chunk
                .iter()
                .find(|seq| graphprod::gp_normalize(seq, graph).syllables() != oracle.normal_form(seq).as_slice())
                .cloned()
        });
        if let Some(seq) = bad.into_iter().flatten().next() {
            return Err(format!("normal form differs from the swap oracle on {seq:?} over {graph:?}"));
        }
    }
    Ok(format!("{subsets} (s, J) pairs, {} sequences x {} graphs", sequences.len(), graphs.len()))
}

fn criterion_4() -> Outcome {
    let b = DEFAULT_NODE_BUDGET;
    for m in 2..=5u32 {
        let matrix = CoxeterMatrix::uniform(Order::Infinite)
            .and_then(|x| x.with_pair(0, 1, Order::Finite(m)))
            .map_err(|e| e.to_string())?;
        let order = coxeter::rank2_order(0, 1, &matrix, b).map_err(|e| e.to_string())?;
        ensure!(order == Order::Finite(m), "order {order} for mu = {m}");
        // The same pair inside a larger uniform system.
        let big = CoxeterMatrix::uniform(Order::Finite(3))
            .and_then(|x| x.with_pair(2, 5, Order::Finite(m)))
            .map_err(|e| e.to_string())?;
        let order = coxeter::rank2_order(2, 5, &big, b).map_err(|e| e.to_string())?;
        ensure!(order == Order::Finite(m), "order {order} for mu = {m} in a larger system");
    }
    let mu = CoxeterMatrix::uniform(Order::Finite(3)).map_err(|e| e.to_string())?;
    let window: BTreeSet<u64> = [1, 2, 3].into();
    for p in 1..=3 {
        let ok = coxeter::coxeter_relator_independence(p, &mu, &window, b).map_err(|e| e.to_string())?;
        ensure!(ok, "relator r_{p} reported dependent");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let systems = [
        mu.clone(),
        CoxeterMatrix::wreathed(Order::Infinite, [(1, Order::Finite(2)), (2, Order::Finite(3))]).unwrap(),
        CoxeterMatrix::uniform(Order::Finite(2)).unwrap(),
    ];
    let mut trivial = 0;
    for i in 0..1000 {
        let matrix = &systems[i % systems.len()];
        let len = rng.gen_range(0..=14);
        let raw: Vec<i64> = (0..len).map(|_| rng.gen_range(0..4)).collect();
        // Build some trivial words too: w · w⁻¹ shuffled by a relator.
        let w = if i % 4 == 0 {
            let u = CoxWord::new(raw.iter().copied());
            u.concat(&CoxWord::dihedral(0, 1, 2).concat(&CoxWord::dihedral(1, 0, 2))).concat(&u.inverse())
        } else {
            CoxWord::new(raw.iter().copied())
        };
        match coxeter::tits_is_trivial(&w, matrix, b) {
            CoxVerdict::Trivial => {
                trivial += 1;
                ensure!(w.len() % 2 == 0, "odd-length word {:?} reported trivial", w.letters());
            }
            CoxVerdict::Nontrivial => {}
            CoxVerdict::Undetermined { explored } => return Err(format!("budget hit ({explored}) on {w:?}")),
        }
    }
    Ok(format!("1000 random words, {trivial} trivial"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in [3u64, 5, 7] {
        let poly = abels::m0_polynomial(p);
        for root0 in [1i64, -1] {
            let top = abels::hensel_lift(&poly, &BigInt::from(root0), p, 32).map_err(|e| e.to_string())?;
            for k in 1..=32u32 {
                let r = abels::hensel_lift(&poly, &BigInt::from(root0), p, k).map_err(|e| e.to_string())?;
                let modulus = BigInt::from(p).pow(k);
                ensure!(
                    abels::poly_eval(&poly, r.residue()) % &modulus == BigInt::zero(),
                    "p = {p}: root not a root mod p^{k}"
                );
                ensure!(
                    (top.residue() - r.residue()) % &modulus == BigInt::zero(),
                    "p = {p}: tower not compatible at level {k}"
                );
            }
        }
        let disc = BigInt::from(p).pow(6) + 4;
        ensure!(!abels::is_perfect_square(&disc), "p^6 + 4 is a square for p = {p}");
        let data = abels::m0_data(p, 32).map_err(|e| e.to_string())?;
        ensure!(data.discriminant_nonsquare, "eigen data for p = {p} lacks the discriminant certificate");

        let random = |rng: &mut ChaCha8Rng| ZInvP::new(rng.gen_range(-10_000i64..=10_000), rng.gen_range(0..6), p);
        for _ in 0..100 {
            let (a, b) = (random(&mut rng), random(&mut rng));
            let lhs = abels::commutator(
                &abels::elementary(1, 3, &a, 4).map_err(|e| e.to_string())?,
                &abels::elementary(3, 4, &b, 4).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            let rhs = abels::elementary(1, 4, &(&a * &b), 4).map_err(|e| e.to_string())?;
            ensure!(lhs == rhs, "commutator identity fails for p = {p}, a = {a}, b = {b}");
        }

        // Monotonicity: a decided verdict never changes when precision grows.
        let towers: Vec<_> = (1..=12).map(|k| abels::m0_data(p, k)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        for _ in 0..1000 {
            let i = rng.gen_range(1..=2u8);
            let m = rng.gen_range(0..10);
            let (a, b) = if rng.gen_bool(0.5) {
                abels::sample_shifted_member(&mut rng, i, 0, m, &data).map_err(|e| e.to_string())?
            } else {
                (random(&mut rng), random(&mut rng))
            };
            let mut decided: Option<Membership> = None;
            for t in &towers {
                let v = abels::eigenline_membership(&a, &b, i, t).map_err(|e| e.to_string())?;
                match (decided, v) {
                    (_, Membership::Undetermined) => {
                        ensure!(decided.is_none(), "verdict lost at precision {} for ({a}, {b})", t.precision())
                    }
                    (None, v) => decided = Some(v),
                    (Some(d), v) => ensure!(d == v, "verdict changed at precision {} for ({a}, {b})", t.precision()),
                }
            }
        }

        // E₁ closed under addition and the M₀ action.
        for _ in 0..1000 {
            let (m1, m2) = (rng.gen_range(0..20), rng.gen_range(0..20));
            let x = abels::sample_shifted_member(&mut rng, 1, 0, m1, &data).map_err(|e| e.to_string())?;
            let y = abels::sample_shifted_member(&mut rng, 1, 0, m2, &data).map_err(|e| e.to_string())?;
            let sum = (&x.0 + &y.0, &x.1 + &y.1);
            let image = abels::m0_apply(&x.0, &x.1);
            for (a, b) in [&x, &sum, &image] {
                let v = abels::eigenline_membership(a, b, 1, &data).map_err(|e| e.to_string())?;
                ensure!(v == Membership::Member, "E1 closure fails at ({a}, {b}): {v:?}");
            }
        }
        ensure!(abels::eigenline_invariance_check(&data, 200, p), "invariance check fails for p = {p}");
    }
    Ok("p = 3, 5, 7".into())
}

fn random_thompson(rng: &mut ChaCha8Rng, gens: &[DyadicPL]) -> DyadicPL {
    let mut f = DyadicPL::identity();
    for _ in 0..rng.gen_range(0..=6) {
        let g = &gens[rng.gen_range(0..gens.len())];
        let g = if rng.gen_bool(0.5) { g.clone() } else { th::inverse(g) };
        f = th::compose(&f, &g);
    }
    f
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let gens = [th::standard_a(), th::standard_b()];
    let sigma = th::standard_sigma();
    let id = DyadicPL::identity();
    let half = th::Dyadic::half();
    for _ in 0..300 {
        let (f, g, h) = (random_thompson(&mut rng, &gens), random_thompson(&mut rng, &gens), random_thompson(&mut rng, &gens));
        ensure!(th::compose(&f, &th::compose(&g, &h)) == th::compose(&th::compose(&f, &g), &h), "associativity");
        ensure!(th::compose(&f, &id) == f && th::compose(&id, &f) == f, "identity");
        ensure!(th::compose(&f, &th::inverse(&f)).is_identity(), "inverse");
        ensure!(th::characters(&th::compose(&f, &g)) == th::characters(&f) + th::characters(&g), "character additivity");
    }
    for (p, q) in [(1i64, 1i64), (2, 3), (1, -1), (3, -2)] {
        for _ in 0..1000 {
            let n = npq_element(p, q, &mut rng, &gens);
            ensure!(th::in_Npq(&n, p, q).map_err(|e| e.to_string())?, "sampled element not in N_{{{p},{q}}}");
            let g = random_thompson(&mut rng, &gens);
            let conj = th::compose(&th::compose(&g, &n), &th::inverse(&g));
            ensure!(th::in_Npq(&conj, p, q).map_err(|e| e.to_string())?, "N_{{{p},{q}}} not normal");
        }
        let mut built = [0usize; 2];
        for _ in 0..200 {
            let f = random_thompson(&mut rng, &gens);
            for (slot, j) in [th::build_j0(&f, p, q, &sigma), th::build_j1(&f, p, q, &sigma)].into_iter().enumerate() {
                match j {
                    Ok(j) => {
                        ensure!(j.fixes(&half), "j does not fix 1/2 for (p, q) = ({p}, {q})");
                        ensure!(th::in_Npq(&j, p, q).map_err(|e| e.to_string())?, "j not in N_{{{p},{q}}}");
                        built[slot] += 1;
                    }
                    // f outside the domain of the construction
                    Err(th::ThompsonError::NotDivisible { .. }) => {}
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
        ensure!(built.iter().all(|&b| b >= 20), "too few admissible inputs for ({p}, {q}): {built:?}");
    }
    Ok("4 parameter pairs".into())
}

/// A random element of `N_{p,q} = ker(pχ₀ − qχ₁)`: a commutator times
/// `A^a σ^s` with `χ = (s − a, s + a)` proportional to `(q, p)`.
fn npq_element(p: i64, q: i64, rng: &mut ChaCha8Rng, gens: &[DyadicPL]) -> DyadicPL {
    let k = rng.gen_range(-2..=2) * if (p + q) % 2 == 0 { 1 } else { 2 };
    let (s, a) = ((p + q) * k / 2, (p - q) * k / 2);
    let tail = th::compose(&th::power(&th::standard_a(), a), &th::power(&th::standard_sigma(), s));
    let c = th::commutator(&random_thompson(rng, gens), &random_thompson(rng, gens));
    th::compose(&c, &tail)
}

fn criterion_7() -> Outcome {
    let two = chabauty::enumerate_normal_lowindex(2, 2, Exec::default()).map_err(|e| e.to_string())?;
    ensure!(two.len() == 3, "{} kernels of index ≤ 2", two.len());
    for n in [2usize, 3] {
        let certs = chabauty::enumerate_normal_lowindex(2, n, Exec::default()).map_err(|e| e.to_string())?;
        let words = common::signature_words(2, 2 * n);
        let found: BTreeSet<Vec<bool>> = certs.iter().map(|c| words.iter().map(|w| c.contains(w)).collect()).collect();
        ensure!(found.len() == certs.len(), "duplicate kernels for n = {n}");
        let oracle = common::cyclic_kernel_signatures(2, n);
        ensure!(found == oracle, "n = {n}: {} kernels vs {} from the oracle", found.len(), oracle.len());
    }
    let alphabet = Alphabet::numbered("x", 2);
    let sample = chabauty::enumerate_normal_lowindex(2, 3, Exec::default()).map_err(|e| e.to_string())?;
    ensure!(sample.len() == 7, "{} kernels of index ≤ 3", sample.len());
    let mut separated = 0;
    for t in 0..sample.len() {
        match chabauty::isolated_in_sample(&alphabet, t, &sample, 6).map_err(|e| e.to_string())? {
            Separation::Separated(o) => {
                for (i, c) in sample.iter().enumerate() {
                    let g = MarkedGroup::quotient(alphabet.clone(), c.clone()).map_err(|e| e.to_string())?;
                    let v = in_open_set(&g, &o).map_err(|e| e.to_string())?;
                    ensure!(v == Verdict::from_bool(i == t), "open set for {t} misjudges {i}");
                }
                separated += 1;
            }
            Separation::NotSeparated { other } => return Err(format!("kernels {t} and {other} not separated")),
        }
    }
    Ok(format!("{separated} separated kernels"))
}

fn criterion_8() -> Outcome {
    for n in 1..=8u64 {
        let t = "t ".repeat(n as usize);
        let tinv = "T ".repeat(n as usize);
        let text = format!("t x\n{t}x {tinv}x {t}X {tinv}X\n");
        let parsed = parse_presentation(&text).map_err(|e| e.to_string())?;
        let tn = Word::letter(Generator::pos(0)).pow(n as i64);
        let x = Word::letter(Generator::pos(1));
        let explicit = Word::commutator(&x.conjugate(&tn), &x);
        let built = graphprod::wreath_relator(n);
        ensure!(parsed.relators == vec![built.clone()], "parsed u_{n} differs from wreath_relator");
        ensure!(built == explicit, "wreath_relator({n}) differs from the commutator");
        let syl = graphprod::wreath_syllables(&parsed.relators[0]).map_err(|e| e.to_string())?;
        ensure!(syl == graphprod::vertex_commutator(n as i64, 0), "syllables of u_{n}: {syl:?}");
    }
    let family = RelatorFamily::new(graphprod::wreath_alphabet(), vec![graphprod::wreath_relator(1), graphprod::wreath_relator(2)])
        .map_err(|e| e.to_string())?;
    let report = match smallcancel::check_c16(&family) {
        C16Verdict::Violation(r) => r,
        C16Verdict::Ok => return Err("{u1, u2} accepted as C'(1/6)".into()),
    };
    ensure!(!report.witness.is_empty(), "empty piece");
    let mut seen = HashSet::new();
    for loc in [report.first_occurrence(), report.second_occurrence] {
        let host = &family.relators()[loc.relator];
        let host = if loc.inverse { host.inverse() } else { host.clone() };
        let hits = occurrences(&report.witness, &host, Scan::Cyclic);
        ensure!(hits.contains(&loc.start), "piece not at reported position {loc:?}");
        seen.insert(loc);
    }
    ensure!(seen.len() == 2, "the two reported occurrences coincide");
    ensure!(6 * report.ratio.0 >= report.ratio.1, "reported piece is short: {:?}", report.ratio);
    Ok(format!("piece of length {}/{}", report.ratio.0, report.ratio.1))
}

/// Name, time limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("surface-group Dehn suite", 60, criterion_1),
        ("independence suite", 120, criterion_2),
        ("wreath/graph-product suite", 60, criterion_3),
        ("Coxeter suite", 60, criterion_4),
        ("Abels suite", 30, criterion_5),
        ("Thompson suite", 30, criterion_6),
        ("Chabauty suite", 60, criterion_7),
        ("cross-module coherence", 10, criterion_8),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(limit);
        let (status, detail) = match (&result, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the time limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {}: {status} {name} ({:.1} s / {limit} s) {detail}", i + 1, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
