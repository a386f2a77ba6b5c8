use std::time::Duration;

use mapgenus::asymptotics::{estimate_k_grid, high_genus_ratios, write_k_csv, SequenceK};
use mapgenus::cubic::{build_h_table_with, genus_distribution, genus_json, write_genus_csv, BuildOptions, HTable};
use mapgenus::numeric::format_from_ln;
use mapgenus::rotation::{count_json, count_table, write_count_csv, RegularFamily};
use mapgenus::stats::{moment_jets, normality_report, stats_row, write_stats_csv};
use serde_json::json;

use crate::{CmdResult, CountArgs, Failure, Format, KArgs, Output, StatsArgs, StatsKind, TableArgs, TableOpts};

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

/// Builds or resumes the table, reporting progress on stderr.
pub fn build_table(opts: &TableOpts) -> Result<HTable, Failure> {
    let options = BuildOptions {
        checkpoint: opts.checkpoint.clone(),
        stride: opts.stride as usize,
        ..BuildOptions::default()
    };
    let table = build_h_table_with(opts.max_n as usize, &options, |p| {
        if p.checkpointed || p.n % 10 == 0 || p.n == p.max_n {
            let eta = p.eta.map(secs).unwrap_or_else(|| "?".into());
            let mark = if p.checkpointed { " (checkpoint)" } else { "" };
            eprintln!(
                "row {}/{} elapsed {} eta {}{}",
                p.n,
                p.max_n,
                secs(p.elapsed),
                eta,
                mark
            );
        }
    })?;
    Ok(table)
}

pub fn table(args: &TableArgs, out: &mut Output) -> CmdResult {
    let table = build_table(&args.table)?;
    match out.format {
        Format::Csv => write_genus_csv(&table, out.writer())?,
        Format::Json => out.json(&genus_json(&table)?)?,
    }
    Ok(())
}

pub fn kestimate(args: &KArgs, out: &mut Output) -> CmdResult {
    let estimates = estimate_k_grid(&args.y, args.seq_len, args.threshold)?;
    for e in estimates.iter().filter(|e| !e.converged) {
        eprintln!(
            "warning: K({}) not converged at N = {}: error indicator {:e}",
            e.y, e.len, e.error_indicator
        );
    }
    match out.format {
        Format::Csv => write_k_csv(&estimates, out.writer())?,
        Format::Json => out.json(&serde_json::to_value(&estimates)?)?,
    }
    Ok(())
}

fn requested_ns(args: &StatsArgs) -> Result<Vec<usize>, Failure> {
    let max_n = args.table.max_n as usize;
    if args.n.is_empty() {
        return Ok((1..=max_n).collect());
    }
    if let Some(&bad) = args.n.iter().find(|&&n| n < 1 || n > max_n) {
        return Err(Failure::Usage(format!("--n {bad} is outside 1..={max_n}")));
    }
    Ok(args.n.clone())
}

pub fn stats(args: &StatsArgs, out: &mut Output) -> CmdResult {
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        return Err(Failure::Usage(format!("--epsilon {} must lie in (0, 1)", args.epsilon)));
    }
    if args.kind == StatsKind::Jets {
        return jets(args, out);
    }
    let table = build_table(&args.table)?;
    let ns = requested_ns(args)?;
    let dists = ns
        .iter()
        .map(|&n| genus_distribution(&table, n))
        .collect::<Result<Vec<_>, _>>()?;

    match args.kind {
        StatsKind::Moments => {
            let rows = dists.iter().map(stats_row).collect::<Result<Vec<_>, _>>()?;
            match out.format {
                Format::Csv => write_stats_csv(&rows, out.writer())?,
                Format::Json => out.json(&serde_json::to_value(&rows)?)?,
            }
        }
        StatsKind::Normality => {
            let grid = if args.t_grid.is_empty() {
                (-6..=6).map(|i| i as f64 / 2.0).collect()
            } else {
                args.t_grid.clone()
            };
            let reports = dists
                .iter()
                .filter(|d| d.n >= 2)
                .map(|d| normality_report(d, &grid))
                .collect::<Result<Vec<_>, _>>()?;
            match out.format {
                Format::Csv => {
                    let w = out.writer();
                    writeln!(w, "n,centred_sup,exact_sup,ks")?;
                    for r in &reports {
                        writeln!(w, "{},{},{},{}", r.n, r.centred_sup, r.exact_sup, r.ks)?;
                    }
                }
                Format::Json => out.json(&serde_json::to_value(&reports)?)?,
            }
        }
        StatsKind::Ratios => {
            let k = SequenceK::new(args.seq_len);
            let (lo, hi) = (args.epsilon, 2.0 - args.epsilon);
            let mut rows = Vec::new();
            for d in &dists {
                if d.n >= 2 {
                    rows.extend(high_genus_ratios(&d.counts, d.n, lo, hi, &k, args.epsilon)?);
                }
            }
            match out.format {
                Format::Csv => {
                    let w = out.writer();
                    writeln!(w, "n,g,u,exact,asym,ratio")?;
                    for r in &rows {
                        writeln!(
                            w,
                            "{},{},{},{},{},{}",
                            r.n,
                            r.g,
                            r.u,
                            r.exact,
                            format_from_ln(r.ln_asym),
                            r.ratio
                        )?;
                    }
                }
                Format::Json => {
                    let values: Vec<_> = rows
                        .iter()
                        .map(|r| {
                            json!({
                                "n": r.n, "g": r.g, "u": r.u,
                                "exact": r.exact.to_string(),
                                "asym": format_from_ln(r.ln_asym),
                                "ratio": r.ratio,
                            })
                        })
                        .collect();
                    out.json(&serde_json::Value::Array(values))?;
                }
            }
        }
        StatsKind::Jets => unreachable!(),
    }
    Ok(())
}

fn jets(args: &StatsArgs, out: &mut Output) -> CmdResult {
    let jets = moment_jets(args.seq_len);
    let ns: Vec<usize> = if args.n.is_empty() {
        (1..=jets.len()).collect()
    } else {
        args.n.clone()
    };
    if let Some(&bad) = ns.iter().find(|&&n| n < 1 || n > jets.len()) {
        return Err(Failure::Usage(format!("--n {bad} is outside 1..={}", jets.len())));
    }
    match out.format {
        Format::Csv => {
            let w = out.writer();
            writeln!(w, "n,J,dJ,d2J,face_mean,face_variance")?;
            for &n in &ns {
                let j = jets[n - 1];
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    n,
                    j.value,
                    j.d1,
                    j.d2,
                    j.face_mean(),
                    j.face_variance()
                )?;
            }
        }
        Format::Json => {
            let values: Vec<_> = ns
                .iter()
                .map(|&n| {
                    let j = jets[n - 1];
                    json!({
                        "n": n, "J": j.value, "dJ": j.d1, "d2J": j.d2,
                        "face_mean": j.face_mean(), "face_variance": j.face_variance(),
                    })
                })
                .collect();
            out.json(&serde_json::Value::Array(values))?;
        }
    }
    Ok(())
}

fn parse_family(text: &str) -> Result<Option<RegularFamily>, Failure> {
    match text {
        "all" => Ok(None),
        "cubic" => Ok(Some(RegularFamily::cubic())),
        other => {
            let degree = other
                .strip_prefix("regular-")
                .unwrap_or(other)
                .parse::<u32>()
                .map_err(|_| Failure::Usage(format!("unknown family {other:?}; use all, cubic or a degree")))?;
            Ok(Some(RegularFamily::new(degree)?))
        }
    }
}

pub fn count(args: &CountArgs, out: &mut Output) -> CmdResult {
    let family = parse_family(&args.family)?;
    let rows = count_table(family, args.max_n as usize)?;
    match out.format {
        Format::Csv => write_count_csv(&rows, out.writer())?,
        Format::Json => out.json(&count_json(&rows))?,
    }
    Ok(())
}
