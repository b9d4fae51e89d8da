use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use qmf::arith::integer::is_prime;
use qmf::brandt::{default_operators, eigen_blocks, operator_matrices};
use qmf::classes::{class_set_for, default_split, mass_formula, mass_numerator, ClassSet};
use qmf::congruence::{
    certificate, congruence_primes, construct_congruent_cuspform, converse_uniqueness_check,
    eigen_congruence_search,
};
use qmf::orders::Level;
use qmf::periods::lvalues;
use qmf::{Error, Result};

use crate::{Cli, Command, LevelArgs};

/// Command result: JSON to emit and whether every check inside it passed.
struct Report {
    body: Body,
    ok: bool,
}

enum Body {
    Pretty(Value),
    Lines(Vec<Value>),
}

pub fn run(cli: &Cli) -> ExitCode {
    let result = dispatch(cli);
    let (text, code) = match result {
        Ok(Report { body, ok }) => {
            let text = match body {
                Body::Pretty(v) => serde_json::to_string_pretty(&v).unwrap() + "\n",
                Body::Lines(vs) => vs.iter().map(|v| v.to_string() + "\n").collect(),
            };
            (text, if ok { 0 } else { 1 })
        }
        Err(e) => {
            let diag = json!({"error": e.kind(), "message": e.to_string()});
            let code = if e.is_usage() { 2 } else { 1 };
            (serde_json::to_string_pretty(&diag).unwrap() + "\n", code)
        }
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}

fn s<T: ToString>(x: T) -> String {
    x.to_string()
}

fn resolve_level(args: &LevelArgs) -> Result<Level> {
    match args.split {
        Some((n1, n2)) => {
            if n1.checked_mul(n2) != Some(args.level) {
                return Err(Error::InvalidLevel(format!(
                    "split {n1},{n2} does not multiply to {}",
                    args.level
                )));
            }
            Level::new(n1, n2)
        }
        None => default_split(args.level),
    }
}

fn load(cli: &Cli, level: Level) -> Result<ClassSet> {
    class_set_for(level, cli.cache_dir.as_deref())
}

fn level_json(level: Level) -> Value {
    json!({"N": s(level.n()), "N1": s(level.n1), "N2": s(level.n2)})
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Some(x), Value::Object(y)) = (a.as_object_mut(), b) {
        x.extend(y);
    }
    a
}

fn dispatch(cli: &Cli) -> Result<Report> {
    let pretty = |v: Value| Ok(Report { body: Body::Pretty(v), ok: true });
    match &cli.command {
        Command::Mass(args) => {
            let level = resolve_level(args)?;
            pretty(merge(
                level_json(level),
                json!({"mass": s(mass_formula(level)), "numerator": s(mass_numerator(level))}),
            ))
        }
        Command::Classes(args) => {
            let level = resolve_level(args)?;
            pretty(classes_json(&load(cli, level)?))
        }
        Command::Brandt { level, ell, ell_max, eigen } => {
            let level = resolve_level(level)?;
            brandt(&load(cli, level)?, ell, *ell_max, *eigen).map(|v| Report { body: Body::Pretty(v), ok: true })
        }
        Command::Congruence { level, p, r, ell_max, n_max } => {
            let level = resolve_level(level)?;
            let cs = load(cli, level)?;
            match p {
                Some(p) => {
                    let cert = certificate(&cs, *p, *r, *ell_max, *n_max)?;
                    let ok = cert.verified;
                    Ok(Report { body: Body::Pretty(serde_json::to_value(cert).unwrap()), ok })
                }
                None => {
                    let mut certs = Vec::new();
                    let mut ok = true;
                    for q in congruence_primes(level) {
                        let cert = certificate(&cs, q, *r, *ell_max, *n_max)?;
                        ok &= cert.verified;
                        certs.push(serde_json::to_value(cert).unwrap());
                    }
                    let v = merge(
                        level_json(level),
                        json!({"numerator": s(mass_numerator(level)), "certificates": certs}),
                    );
                    Ok(Report { body: Body::Pretty(v), ok })
                }
            }
        }
        Command::Lvalue { level, disc, character, phi, p, r, ell_max } => {
            let level = resolve_level(level)?;
            let cs = load(cli, level)?;
            let phi = match phi {
                Some(v) => {
                    if v.len() != cs.h() {
                        return Err(Error::InvalidArgument(format!(
                            "--phi has {} values but there are {} classes",
                            v.len(),
                            cs.h()
                        )));
                    }
                    v.iter().map(|x| x.parse::<BigInt>().unwrap()).collect()
                }
                None => default_form(&cs, *p, *ell_max)?,
            };
            let check = p.map(|p| (p, *r));
            if let Some(p) = p {
                if !is_prime(*p) {
                    return Err(Error::InvalidArgument(format!("{p} is not prime")));
                }
            }
            let records = lvalues(&cs, &phi, *disc, check)?;
            let ok = records.iter().all(|r| r.verdict != Some(false));
            let body = match character {
                Some(k) => {
                    let rec = records.get(*k).ok_or_else(|| {
                        Error::InvalidArgument(format!("character index {k} out of range (h_K = {})", records.len()))
                    })?;
                    Body::Pretty(serde_json::to_value(rec).unwrap())
                }
                None => Body::Pretty(serde_json::to_value(&records).unwrap()),
            };
            Ok(Report { body, ok })
        }
        Command::Scan { from, to, ell_max } => {
            if from > to {
                return Err(Error::InvalidArgument(format!("empty range {from}..{to}")));
            }
            let levels: Vec<Level> = (*from.max(&2)..=*to).flat_map(Level::splits).collect();
            let records: Vec<(Value, bool)> =
                levels.par_iter().map(|&lv| scan_record(cli, lv, *ell_max)).collect();
            let ok = records.iter().all(|(_, ok)| *ok);
            Ok(Report { body: Body::Lines(records.into_iter().map(|(v, _)| v).collect()), ok })
        }
        Command::VerifyPaper { only } => {
            let reports = crate::suite::run(only, cli.cache_dir.as_deref());
            let passed = reports.iter().filter(|r| r.pass).count();
            let ok = passed == reports.len();
            for r in &reports {
                eprintln!("{} criterion {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.id, r.detail);
            }
            let v = json!({
                "criteria": reports,
                "passed": s(passed),
                "total": s(reports.len()),
            });
            Ok(Report { body: Body::Pretty(v), ok })
        }
    }
}

fn classes_json(cs: &ClassSet) -> Value {
    let alg = cs.algebra();
    let lattice = |l: &qmf::quat::Lattice| {
        json!({
            "den": s(l.den()),
            "basis": l.rows().iter().map(|r| r.iter().map(s).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    };
    let classes: Vec<Value> = cs
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            merge(
                json!({"index": s(i), "weight": s(c.weight), "norm": s(&c.norm)}),
                lattice(&c.ideal),
            )
        })
        .collect();
    merge(
        level_json(cs.level()),
        json!({
            "algebra": {"a": s(alg.a()), "b": s(alg.b()), "ramified": alg.ramified_primes().iter().map(s).collect::<Vec<_>>()},
            "order": lattice(&cs.order.lattice),
            "h": s(cs.h()),
            "mass": s(&cs.mass),
            "weights": cs.weights().iter().map(s).collect::<Vec<_>>(),
            "classes": classes,
        }),
    )
}

fn matrix_json(m: &[Vec<BigInt>]) -> Value {
    json!(m.iter().map(|r| r.iter().map(s).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn brandt(cs: &ClassSet, ell: &[u64], ell_max: u64, eigen: bool) -> Result<Value> {
    for &l in ell {
        if !is_prime(l) {
            return Err(Error::InvalidArgument(format!("{l} is not prime")));
        }
        if cs.level().n() % l == 0 && !cs.level().ramified_primes().contains(&l) {
            return Err(Error::PrimeDividesLevel { ell: l, level: cs.level().n() });
        }
    }
    let bound = ell.iter().copied().max().unwrap_or(ell_max);
    let mut ops = default_operators(cs, bound);
    if !ell.is_empty() {
        ops.retain(|op| ell.contains(&op.prime()));
        for &l in ell {
            if !ops.iter().any(|op| op.prime() == l) {
                return Err(Error::Unsupported(format!(
                    "no operator at {l} for level {}: p² divides N1",
                    cs.level()
                )));
            }
        }
    }
    let mats = operator_matrices(cs, &ops)?;
    let operators: Vec<Value> = mats
        .iter()
        .map(|(op, m)| json!({"op": s(op), "matrix": matrix_json(m)}))
        .collect();
    let mut out = merge(
        level_json(cs.level()),
        json!({"h": s(cs.h()), "weights": cs.weights().iter().map(s).collect::<Vec<_>>(), "operators": operators}),
    );
    if eigen {
        let blocks = eigen_blocks(cs, &mats)?;
        let bj: Vec<Value> = blocks
            .iter()
            .map(|b| {
                let ev: BTreeMap<String, Value> = b
                    .operators
                    .iter()
                    .map(|o| {
                        let v = match o.scalar() {
                            Some(x) => json!(s(x)),
                            None => json!({
                                "charpoly": s(&o.charpoly),
                                "factors": o.factors.iter().map(|(f, e)| json!([s(f), s(e)])).collect::<Vec<_>>(),
                            }),
                        };
                        (s(o.op), v)
                    })
                    .collect();
                json!({
                    "dim": s(b.dim()),
                    "rational": b.is_rational(),
                    "basis": matrix_json(&b.basis),
                    "eigenvalues": ev,
                })
            })
            .collect();
        out = merge(out, json!({"blocks": bj}));
    }
    Ok(out)
}

/// The form used for periods when none is given: the Eisenstein-congruent line mod p,
/// or the only rational cuspidal eigen-line.
fn default_form(cs: &ClassSet, p: Option<u64>, ell_max: u64) -> Result<Vec<BigInt>> {
    if let Some(p) = p {
        let search = eigen_congruence_search(cs, p, ell_max)?;
        if let Some((phi, _)) = converse_uniqueness_check(&search) {
            return Ok(phi);
        }
    }
    let ops = default_operators(cs, ell_max);
    let mats = operator_matrices(cs, &ops)?;
    let lines: Vec<Vec<BigInt>> = eigen_blocks(cs, &mats)?
        .iter()
        .filter(|b| b.dim() == 1 && b.is_rational())
        .filter_map(|b| b.eigenvector())
        .collect();
    match &lines[..] {
        [only] => Ok(only.clone()),
        _ => Err(Error::Precondition(format!(
            "{} rational cuspidal eigen-lines at level {}; pass --phi",
            lines.len(),
            cs.level()
        ))),
    }
}

fn scan_record(cli: &Cli, level: Level, ell_max: u64) -> (Value, bool) {
    let head = merge(
        level_json(level),
        json!({"mass": s(mass_formula(level)), "numerator": s(mass_numerator(level))}),
    );
    let cs = match load(cli, level) {
        Ok(cs) => cs,
        Err(e) => return (merge(head, json!({"error": e.kind(), "message": s(&e)})), false),
    };
    let mut ok = true;
    let primes: Vec<Value> = congruence_primes(level)
        .into_iter()
        .map(|p| {
            let solver = match construct_congruent_cuspform(&cs, p, 1) {
                Ok(_) => "ok".to_string(),
                Err(e) => {
                    ok = false;
                    e.kind().to_string()
                }
            };
            match eigen_congruence_search(&cs, p, ell_max) {
                Ok(search) => {
                    ok &= !search.congruent.is_empty();
                    json!({
                        "p": s(p),
                        "solver": solver,
                        "congruent_blocks": s(search.congruent.len()),
                        "congruent_dims": search.congruent.iter().map(|b| s(b.dim)).collect::<Vec<_>>(),
                        "converse_scalar": converse_uniqueness_check(&search).map(|(_, c)| s(c)),
                    })
                }
                Err(e) => {
                    ok = false;
                    json!({"p": s(p), "solver": solver, "error": e.kind()})
                }
            }
        })
        .collect();
    let v = merge(
        head,
        json!({
            "h": s(cs.h()),
            "weights": cs.weights().iter().map(s).collect::<Vec<_>>(),
            "primes": primes,
        }),
    );
    (v, ok)
}
