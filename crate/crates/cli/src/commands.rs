use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use num_bigint::BigInt;
use serde_json::{json, Value};

use grouptk::abels::{eigenline_membership, m0_data, m0_polynomial, residual, Membership, ZInvP};
use grouptk::chabauty::{enumerate_normal_lowindex, in_open_set, ChabautyError, MarkedGroup, Verdict as CVerdict};
use grouptk::coxeter::{tits_is_trivial, tits_normal_word, CoxVerdict, CoxWord, CoxeterMatrix, Order};
use grouptk::exec::Exec;
use grouptk::graphprod::{wreath_alphabet, wreath_independence, wreath_relator};
use grouptk::io::{parse_open_set, parse_presentation, parse_word, print_presentation, Presentation};
use grouptk::smallcancel::{
    self, independence_check, C16Verdict, DehnEngine, Independence, PieceReport, RelatorFamily, SmallCancelError,
};
use grouptk::thompson::{characters, in_Npq};
use grouptk::words::{Alphabet, Word};

use crate::expr::{parse_query, Query};
use crate::report::{Report, Verdict};
use crate::Global;

#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Budget(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<Report, Failure>;

fn read_presentation(file: &Path) -> anyhow::Result<Presentation> {
    let text = fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?;
    parse_presentation(&text).with_context(|| file.display().to_string())
}

fn read_family(file: &Path) -> anyhow::Result<RelatorFamily> {
    read_presentation(file)?.into_family().with_context(|| file.display().to_string())
}

fn rendered(alphabet: &Alphabet, words: &[Word]) -> Value {
    words.iter().map(|w| alphabet.render(w)).collect()
}

fn piece_json(alphabet: &Alphabet, r: &PieceReport) -> Value {
    json!({
        "witness": alphabet.render(&r.witness),
        "relator_index": r.relator_index,
        "position": r.position,
        "inverse": r.inverse,
        "second_occurrence": {
            "relator": r.second_occurrence.relator,
            "inverse": r.second_occurrence.inverse,
            "start": r.second_occurrence.start,
        },
        "ratio": format!("{}/{}", r.ratio.0, r.ratio.1),
    })
}

fn check_length(g: &Global, len: usize) -> Result<(), Failure> {
    if len > g.max_word_length {
        return Err(Failure::Budget(format!("word has {len} letters, limit is {}", g.max_word_length)));
    }
    Ok(())
}

pub fn check_c16(file: &Path) -> Outcome {
    let family = read_family(file)?;
    let a = family.alphabet();
    let base = |v| Report::new("check-c16", v).with("relators", rendered(a, family.relators()));
    Ok(match smallcancel::check_c16(&family) {
        C16Verdict::Ok => base(Verdict::Ok),
        C16Verdict::Violation(r) => base(Verdict::Violation).with("piece", piece_json(a, &r)),
    })
}

pub fn dehn(g: &Global, file: &Path, word: &str) -> Outcome {
    let family = read_family(file)?;
    let a = family.alphabet();
    let w = parse_word(a, word).context("word")?;
    check_length(g, w.len())?;
    let engine = DehnEngine::new(&family).map_err(|e| match e {
        SmallCancelError::NotC16(r) => anyhow!("presentation is not C'(1/6): piece {}", a.render(&r.witness)),
        e => anyhow!(e),
    })?;
    let (out, trace) = engine.reduce(&w);
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|s| {
            json!({
                "input": a.render(&s.input),
                "piece": a.render(&s.piece),
                "relator": s.relator,
                "output": a.render(&s.output),
            })
        })
        .collect();
    let verdict = if out.is_empty() { Verdict::Trivial } else { Verdict::Nontrivial };
    Ok(Report::new("dehn", verdict)
        .with("word", a.render(&w))
        .with("reduced", a.render(&out))
        .with("step_count", steps.len())
        .with("steps", steps))
}

pub fn independent(g: &Global, file: &Path) -> Outcome {
    let family = read_family(file)?;
    let a = family.alphabet();
    let base = |v| Report::new("independent", v).with("relators", rendered(a, family.relators()));
    Ok(match independence_check(&family, g.exec.into()) {
        Ok(Independence::Ok) => base(Verdict::Ok),
        Ok(Independence::Dependent(i)) => base(Verdict::Dependent).with("dependent_index", i),
        Err(SmallCancelError::NotC16(r)) => base(Verdict::Violation).with("piece", piece_json(a, &r)),
        Err(e) => return Err(anyhow!(e).into()),
    })
}

pub fn wreath(g: &Global, n: u64, drop: Option<u64>) -> Outcome {
    if n == 0 {
        return Err(anyhow!("--n must be positive").into());
    }
    if let Some(s) = drop.filter(|s| !(1..=n).contains(s)) {
        return Err(anyhow!("--drop {s} is outside 1..={n}").into());
    }
    let window = g.window.unwrap_or(n);
    let kept: Vec<u64> = (1..=n).filter(|&k| Some(k) != drop).collect();
    let presentation = Presentation {
        alphabet: wreath_alphabet(),
        relators: kept.iter().map(|&k| wreath_relator(k)).collect(),
        lines: (2..2 + kept.len()).collect(),
    };
    let targets: Vec<u64> = drop.map_or_else(|| kept.clone(), |s| vec![s]);
    let mut certified = Vec::new();
    let mut lost = Vec::new();
    for &s in &targets {
        let others: BTreeSet<u64> = kept.iter().copied().filter(|&k| k != s).collect();
        match wreath_independence(s, &others, window).map_err(|e| anyhow!(e))? {
            true => certified.push(s),
            false => lost.push(s),
        }
    }
    let verdict = if lost.is_empty() { Verdict::Ok } else { Verdict::Undetermined };
    let mut report = Report::new("wreath", verdict)
        .with("n", n)
        .with("presentation", print_presentation(&presentation))
        .with("certified", certified)
        .with("uncertified", lost.clone())
        .with("window", window);
    if let Some(s) = drop {
        report = report.with("dropped", s);
    }
    if lost.iter().any(|&s| s > window) {
        report = report.exhausted("window", window);
    }
    Ok(report)
}

fn parse_order(s: &str) -> anyhow::Result<Order> {
    match s.trim() {
        "inf" | "∞" => Ok(Order::Infinite),
        t => Ok(Order::Finite(t.parse().with_context(|| format!("bad order {t:?}"))?)),
    }
}

/// `default[,d=m][,s:t=m]...`
pub fn parse_coxeter_spec(spec: &str) -> anyhow::Result<CoxeterMatrix> {
    let mut items = spec.split(',');
    let default = parse_order(items.next().unwrap_or(""))?;
    let mut distances = Vec::new();
    let mut pairs = Vec::new();
    for item in items {
        let (lhs, rhs) = item.split_once('=').ok_or_else(|| anyhow!("expected `d=m` or `s:t=m`, got {item:?}"))?;
        let order = parse_order(rhs)?;
        match lhs.split_once(':') {
            Some((s, t)) => pairs.push((s.trim().parse::<i64>()?, t.trim().parse::<i64>()?, order)),
            None => distances.push((lhs.trim().parse::<u64>().with_context(|| format!("bad distance {lhs:?}"))?, order)),
        }
    }
    let mut m = CoxeterMatrix::wreathed(default, distances)?;
    for (s, t, o) in pairs {
        m = m.with_pair(s, t, o)?;
    }
    Ok(m)
}

pub fn coxeter(g: &Global, mu: &str, word: &str) -> Outcome {
    let matrix = parse_coxeter_spec(mu).context("--mu")?;
    let letters = word
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().with_context(|| format!("bad generator index {t:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    check_length(g, letters.len())?;
    let w = CoxWord::new(letters);
    let report = Report::new("coxeter", Verdict::Undetermined).with("word", w.letters().to_vec());
    Ok(match tits_is_trivial(&w, &matrix, g.node_budget) {
        CoxVerdict::Trivial => Report { verdict: Verdict::Trivial, ..report },
        CoxVerdict::Nontrivial => {
            let reduced = tits_normal_word(&w, &matrix, g.node_budget).map(|r| r.letters().to_vec()).ok();
            Report { verdict: Verdict::Nontrivial, ..report }.with("reduced_word", reduced)
        }
        CoxVerdict::Undetermined { explored } => {
            report.with("explored", explored).exhausted("node_budget", g.node_budget as u64)
        }
    })
}

/// `n`, `n/p^e` or `n/D` with `D` a power of `p`.
pub fn parse_zinvp(text: &str, p: u64) -> anyhow::Result<ZInvP> {
    let bad = || anyhow!("bad Z[1/{p}] literal {text:?}");
    let (num, den) = text.split_once('/').unwrap_or((text, "1"));
    let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
    let exp = match den.split_once('^') {
        Some((base, e)) => {
            if base.trim().parse::<u64>().ok() != Some(p) {
                return Err(bad());
            }
            e.trim().parse::<u64>().map_err(|_| bad())?
        }
        None => {
            let mut d = den.trim().parse::<u64>().map_err(|_| bad())?;
            let mut e = 0;
            while d > 1 && d % p == 0 {
                d /= p;
                e += 1;
            }
            if d != 1 {
                return Err(bad());
            }
            e
        }
    };
    Ok(ZInvP::new(num, exp, p))
}

pub fn abels(g: &Global, p: u64, precision: u32, check: Option<&[String]>) -> Outcome {
    if precision > g.max_precision {
        return Err(Failure::Budget(format!("precision {precision} exceeds the limit {}", g.max_precision)));
    }
    let data = m0_data(p, precision).map_err(|e| anyhow!(e))?;
    let poly = m0_polynomial(p);
    let roots: Vec<Value> = [&data.lambda1, &data.lambda2]
        .iter()
        .map(|r| {
            json!({
                "residue": r.residue().to_string(),
                "residual": residual(&poly, r).to_string(),
            })
        })
        .collect();
    let all_zero = [&data.lambda1, &data.lambda2].iter().all(|r| residual(&poly, r) == BigInt::from(0));
    let report = Report::new("abels", if all_zero { Verdict::Ok } else { Verdict::Undetermined })
        .with("p", p)
        .with("precision", precision)
        .with("modulus", format!("{p}^{precision}"))
        .with("polynomial", poly.iter().map(|c| c.to_string()).collect::<Vec<_>>())
        .with("roots", roots)
        .with("discriminant_nonsquare", data.discriminant_nonsquare);
    let Some(args) = check else { return Ok(report) };
    let a = parse_zinvp(&args[0], p)?;
    let b = parse_zinvp(&args[1], p)?;
    let i: u8 = args[2].parse().map_err(|_| anyhow!("eigenline index must be 1 or 2"))?;
    let verdict = match eigenline_membership(&a, &b, i, &data).map_err(|e| anyhow!(e))? {
        Membership::Member => Verdict::Member,
        Membership::NonMember => Verdict::Nonmember,
        Membership::Undetermined => Verdict::Undetermined,
    };
    Ok(Report { verdict, ..report }.with(
        "eigenline_check",
        json!({ "vector": [a.to_string(), b.to_string()], "eigenline": i }),
    ))
}

pub fn thompson(text: &str) -> Outcome {
    let query = parse_query(text)?;
    let describe = |f: &grouptk::thompson::DyadicPL| {
        let c = characters(f);
        json!({
            "breakpoints": f.to_string(),
            "characters": [c.chi0, c.chi1],
        })
    };
    Ok(match query {
        Query::Element(f) => {
            let v = if f.is_identity() { Verdict::Trivial } else { Verdict::Nontrivial };
            Report::new("thompson", v).with("element", describe(&f))
        }
        Query::Characters(f) => {
            let c = characters(&f);
            Report::new("thompson", Verdict::Ok).with("element", describe(&f)).with("characters", vec![c.chi0, c.chi1])
        }
        Query::InNpq(f, p, q) => {
            let member = in_Npq(&f, p, q).map_err(|e| anyhow!(e))?;
            Report::new("thompson", if member { Verdict::Member } else { Verdict::Nonmember })
                .with("element", describe(&f))
                .with("p", p)
                .with("q", q)
        }
        Query::Eval(f, x) => Report::new("thompson", Verdict::Ok)
            .with("element", describe(&f))
            .with("point", x.to_string())
            .with("value", f.evaluate(&x).to_string()),
    })
}

pub fn chabauty_scan(g: &Global, rank: usize, index: usize, open_set: Option<&Path>) -> Outcome {
    if rank == 0 || index == 0 {
        return Err(anyhow!("--rank and --index must be positive").into());
    }
    let exec: Exec = g.exec.into();
    let certs = match enumerate_normal_lowindex(rank, index, exec) {
        Ok(c) => c,
        Err(e @ ChabautyError::ScaleLimit { .. }) => return Err(Failure::Budget(e.to_string())),
        Err(e) => return Err(anyhow!(e).into()),
    };
    let open = match open_set {
        None => None,
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let o = parse_open_set(&text).with_context(|| path.display().to_string())?;
            if o.alphabet().size() != rank {
                return Err(anyhow!("open set has {} generators, expected {rank}", o.alphabet().size()).into());
            }
            Some(o)
        }
    };
    let mut rows = Vec::new();
    let mut inside = 0;
    for (i, cert) in certs.iter().enumerate() {
        let mut row = json!({
            "kernel": i,
            "index": cert.degree,
            "quotient": cert.target,
            "images": cert.images,
        });
        if let Some(o) = &open {
            let group = MarkedGroup::quotient(o.alphabet().clone(), cert.clone()).map_err(|e| anyhow!(e))?;
            let v = in_open_set(&group, o).map_err(|e| anyhow!(e))?;
            inside += (v == CVerdict::Yes) as usize;
            row["in_open_set"] = json!(v.to_string());
        }
        rows.push(row);
    }
    let mut report = Report::new("chabauty-scan", Verdict::Ok)
        .with("rank", rank)
        .with("max_index", index)
        .with("count", certs.len())
        .with("kernels", rows);
    if open.is_some() {
        report = report.with("count_in_open_set", inside);
    }
    Ok(report)
}
