use mapgenus::asymptotics::{estimate_k, lemma1_check, uniform_grid};
use mapgenus::cubic::{build_h_table, genus_distribution, genus_polynomials_recursive, j_polynomial, HTable};
use mapgenus::exact::{rational, DensePolynomial, Rational};
use mapgenus::rotation::{cubic_maps_exact, regular_maps_exact, rotation_census, total_maps_exact, RegularFamily};
use serde_json::json;

use crate::{CmdResult, Failure, Format, Output, VerifyArgs};

struct Check {
    name: String,
    passed: bool,
    detail: String,
}

fn check(name: String, outcome: mapgenus::Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// `sum c_i y^i / den` from `(i, c_i)` pairs.
fn poly(den: i64, terms: &[(usize, i64)]) -> DensePolynomial {
    let degree = terms.iter().map(|t| t.0).max().unwrap_or(0);
    let mut coeffs = vec![rational(0, 1); degree + 1];
    for &(i, c) in terms {
        coeffs[i] = rational(c, den);
    }
    DensePolynomial::new(coeffs)
}

/// Published closed forms of `J_1, ..., J_6`.
fn golden() -> Vec<DensePolynomial> {
    let j5 = |c: i64| c * 17;
    vec![
        poly(6, &[(1, 5), (3, 20)]),
        poly(9, &[(2, 28), (4, 32)]),
        poly(1296, &[(1, 11 * 105), (3, 11 * 664), (5, 11 * 336)]),
        DensePolynomial::new(vec![
            rational(0, 1),
            rational(0, 1),
            rational(1183, 324),
            rational(0, 1),
            rational(1631, 243),
            rational(0, 1),
            rational(448, 243),
        ]),
        poly(
            466_560,
            &[(1, j5(25025)), (3, j5(198_396)), (5, j5(163_248)), (7, j5(27456))],
        ),
        poly(6561, &[(2, 26261), (4, 61185), (6, 27532), (8, 3072)]),
    ]
}

fn golden_check(table: &HTable) -> mapgenus::Result<(bool, String)> {
    for (i, expected) in golden().iter().enumerate() {
        if &j_polynomial(table, i + 1)? != expected {
            return Ok((false, format!("J_{} differs", i + 1)));
        }
    }
    Ok((true, "J_1..J_6 exact".into()))
}

fn dual_pipeline(table: &HTable, max_n: usize) -> mapgenus::Result<(bool, String)> {
    let recursive = genus_polynomials_recursive(max_n);
    for (n, p) in recursive.iter().enumerate() {
        if &mapgenus::cubic::genus_polynomial(table, n)? != p {
            return Ok((false, format!("H_{n}(x) differs")));
        }
    }
    Ok((true, String::new()))
}

fn aggregate(table: &HTable, max_n: usize) -> mapgenus::Result<(bool, String)> {
    for n in 1..=max_n {
        let sum = genus_distribution(table, n)?.total();
        let exact = cubic_maps_exact(n)?;
        if sum != exact {
            return Ok((false, format!("n = {n}: table {sum} vs rotation count {exact}")));
        }
    }
    Ok((true, String::new()))
}

fn integrality(table: &HTable, max_n: usize) -> mapgenus::Result<(bool, String)> {
    let entries: usize = (1..=max_n)
        .map(|n| genus_distribution(table, n).map(|d| d.len()))
        .sum::<mapgenus::Result<usize>>()?;
    let negative_half = table.entry(-1, 0) == Rational::new(1.into(), 2.into());
    Ok((negative_half, format!("{entries} entries divisible by 3n+2")))
}

fn oracle() -> mapgenus::Result<(bool, String)> {
    for n in 1..=4 {
        let census = rotation_census(n, None)?;
        let exact = total_maps_exact(n)?;
        if census.rooted_maps != exact {
            return Ok((false, format!("{n} edges: census {} vs {exact}", census.rooted_maps)));
        }
    }
    let cubic = rotation_census(3, Some(3))?.rooted_maps;
    if cubic != cubic_maps_exact(1)? {
        return Ok((false, format!("cubic census {cubic}")));
    }
    let quartic = rotation_census(4, Some(4))?.rooted_maps;
    if quartic != regular_maps_exact(RegularFamily::new(4)?, 2)? {
        return Ok((false, format!("quartic census {quartic}")));
    }
    Ok((true, String::new()))
}

pub fn run(args: &VerifyArgs, out: &mut Output) -> CmdResult {
    if args.max_n < 6 {
        return Err(Failure::Usage("--max-n must be at least 6".into()));
    }
    if args.n < 2 {
        return Err(Failure::Usage("--n must be at least 2".into()));
    }
    let table = build_h_table(args.max_n, None)?;
    let m = args.max_n;
    let mut checks = vec![
        check("golden polynomials J1..J6".into(), golden_check(&table)),
        check(format!("integrality n≤{m}"), integrality(&table, m)),
        check(format!("dual pipeline n≤{m}"), dual_pipeline(&table, m)),
        check(format!("cubic aggregate n≤{m}"), aggregate(&table, m)),
        check("brute-force oracle n_edges≤4".into(), oracle()),
    ];
    checks.push(check(
        format!("Lemma1 bounds n≤{}", args.n),
        lemma1_check(args.n, &uniform_grid(0.05)).map(|r| {
            (
                r.passed(),
                format!("max h = {:.6} at (n, y) = ({}, {})", r.max_h, r.argmax.0, r.argmax.1),
            )
        }),
    ));
    checks.push(check(
        format!("K(1) N={}", args.seq_len),
        estimate_k(1.0, args.seq_len).map(|e| {
            let target = 9.0 / std::f64::consts::PI;
            (
                (e.value - target).abs() < 1e-3,
                format!("K(1) ≈ {:.10}, 9/pi = {target:.10}", e.value),
            )
        }),
    ));

    match out.format {
        Format::Csv => {
            let w = out.writer();
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                if c.detail.is_empty() {
                    writeln!(w, "{}: {status}", c.name)?;
                } else {
                    writeln!(w, "{}: {status} ({})", c.name, c.detail)?;
                }
            }
        }
        Format::Json => {
            let values: Vec<_> = checks
                .iter()
                .map(|c| json!({ "check": c.name, "passed": c.passed, "detail": c.detail }))
                .collect();
            out.json(&serde_json::Value::Array(values))?;
        }
    }
    match checks.iter().find(|c| !c.passed) {
        Some(c) => Err(Failure::Verification(c.name.clone())),
        None => Ok(()),
    }
}
