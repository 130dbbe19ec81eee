use dowling_core::dowling::{dobinski_eval, dowling_poly_r, whitney_triangle};
use dowling_core::identities::{run_inversion_battery, run_suite, Checker, IdentityReport, SuiteBounds};
use dowling_core::montecarlo::estimate_sum_degen_moment;
use dowling_core::ratcore::{format_rational, frac, int, to_f64};
use dowling_core::{ModelKind, MomentModel, Params, Rational};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::{load_models, Args, Failure, Format, Report};

const MC_SIGMAS: f64 = 5.0;
const INVERSION_SEQUENCES: usize = 20;
const INVERSION_LEN: usize = 10;

fn single_model(args: &Args) -> Result<MomentModel, Failure> {
    let kind = load_models(args.model.as_deref(), false)?
        .unwrap_or(ModelKind::PointMass { value: int(1) });
    Ok(MomentModel::new(kind)?)
}

fn single_params(args: &Args) -> Result<Params, Failure> {
    Ok(Params::new(args.m.unwrap_or(1), args.lambda.clone().unwrap_or_else(|| int(0)), args.r)?)
}

fn n_range(args: &Args, default_max: usize) -> Vec<usize> {
    match args.n {
        Some(n) => vec![n],
        None => (0..=args.max_n.unwrap_or(default_max)).collect(),
    }
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn to_csv<R: AsRef<[u8]>>(header: &[&str], rows: impl IntoIterator<Item = Vec<R>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn rat(x: &Rational) -> String {
    format_rational(x)
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn table(args: &Args) -> Result<Report, Failure> {
    let y = single_model(args)?;
    let params = single_params(args)?;
    let max_n = args.max_n.unwrap_or(6);
    let t = whitney_triangle(&y, &params, max_n, args.route.into())?;
    let max_k = args.max_k.unwrap_or(max_n);
    let rows: Vec<Vec<String>> = t
        .rows()
        .iter()
        .map(|row| row.iter().take(max_k + 1).map(rat).collect())
        .collect();
    let body = match args.format {
        Format::Json => to_json(&json!({ "model": y.kind(), "params": params, "rows": rows })),
        Format::Csv => to_csv(
            &["n", "k", "value"],
            rows.iter().enumerate().flat_map(|(n, row)| {
                row.iter().enumerate().map(move |(k, v)| vec![n.to_string(), k.to_string(), v.clone()])
            }),
        ),
    };
    Ok(Report { body, pass: true })
}

pub fn eval(args: &Args) -> Result<Report, Failure> {
    let y = single_model(args)?;
    let params = single_params(args)?;
    let x = args.x.clone().ok_or_else(|| Failure::config("eval needs --x"))?;
    let values = n_range(args, 6)
        .into_iter()
        .map(|n| Ok((n, dowling_poly_r(&y, &params, n)?.eval(&x))))
        .collect::<Result<Vec<_>, Failure>>()?;
    let body = match args.format {
        Format::Json => {
            let list: Vec<_> = values.iter().map(|(n, v)| json!({ "n": n, "value": rat(v) })).collect();
            to_json(&json!({ "model": y.kind(), "params": params, "x": rat(&x), "values": list }))
        }
        Format::Csv => to_csv(
            &["n", "x", "value"],
            values.iter().map(|(n, v)| vec![n.to_string(), rat(&x), rat(v)]),
        ),
    };
    Ok(Report { body, pass: true })
}

fn check_grid(args: &Args) -> Result<Vec<(ModelKind, Params)>, Failure> {
    let models = match load_models(args.model.as_deref(), true)? {
        Some(kind) => vec![kind],
        None => ModelKind::builtins(),
    };
    let ms = args.m.map_or_else(|| vec![1, 2, 3], |m| vec![m]);
    let lambdas = args
        .lambda
        .clone()
        .map_or_else(|| vec![int(0), int(1), frac(1, 2), frac(-1, 3)], |l| vec![l]);
    let mut grid = Vec::new();
    for kind in &models {
        for &m in &ms {
            for l in &lambdas {
                grid.push((kind.clone(), Params::new(m, l.clone(), 1)?));
            }
        }
    }
    Ok(grid)
}

pub fn check(args: &Args) -> Result<Report, Failure> {
    let max_n = args.max_n.unwrap_or(8);
    let bounds = SuiteBounds {
        max_n,
        max_big_n: args.big_n,
        convolution_max_n: max_n.min(6),
        ..SuiteBounds::default()
    };
    let grid = check_grid(args)?;
    let batches = grid
        .par_iter()
        .map(|(kind, params)| {
            let y = MomentModel::new(kind.clone())?;
            let mut checker = Checker::new(&y, params);
            if let Some((n, k)) = args.inject_fault {
                checker.inject_fault(1, n, k, int(1));
            }
            run_suite(&checker, &bounds)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut reports: Vec<IdentityReport> = batches.into_iter().flatten().collect();
    reports.extend(run_inversion_battery(INVERSION_SEQUENCES, INVERSION_LEN, args.seed));
    let failed: Vec<&IdentityReport> = reports.iter().filter(|r| !r.pass).collect();
    for f in &failed {
        eprintln!("FAIL {}", serde_json::to_string(f).expect("serializable"));
    }
    let pass = failed.is_empty();
    let body = match args.format {
        Format::Json => to_json(&json!({
            "pass": pass,
            "checked": reports.len(),
            "failed": failed.len(),
            "reports": reports,
        })),
        Format::Csv => to_csv(
            &["theorem", "model", "m", "lambda", "n", "k", "N", "x", "pass"],
            reports.iter().map(|r| {
                let theorem = serde_json::to_value(r.theorem).expect("serializable");
                let (m, l) = r
                    .params
                    .as_ref()
                    .map_or((String::new(), String::new()), |p| (p.m.to_string(), rat(&p.lambda)));
                vec![
                    theorem.as_str().unwrap_or_default().to_string(),
                    r.model.clone(),
                    m,
                    l,
                    opt(&r.indices.n),
                    opt(&r.indices.k),
                    opt(&r.indices.big_n),
                    opt(&r.indices.x),
                    r.pass.to_string(),
                ]
            }),
        ),
    };
    Ok(Report { body, pass })
}

#[derive(Serialize)]
struct DobinskiRow {
    n: usize,
    exact: String,
    exact_f64: f64,
    series: f64,
    abs_gap: f64,
    rel_gap: f64,
    pass: bool,
}

pub fn dobinski(args: &Args) -> Result<Report, Failure> {
    let y = single_model(args)?;
    let params = single_params(args)?;
    let x = args.x.clone().unwrap_or_else(|| int(1));
    let mut rows = Vec::new();
    for n in n_range(args, 6) {
        let exact = dowling_poly_r(&y, &params, n)?.eval(&x);
        let series = dobinski_eval(&y, &params, n, &x, args.tol)?;
        let exact_f64 = to_f64(&exact);
        let abs_gap = (series - exact_f64).abs();
        let rel_gap = if exact_f64 == 0.0 { abs_gap } else { abs_gap / exact_f64.abs() };
        rows.push(DobinskiRow { n, exact: rat(&exact), exact_f64, series, abs_gap, rel_gap, pass: rel_gap <= args.tol });
    }
    let pass = rows.iter().all(|r| r.pass);
    let body = match args.format {
        Format::Json => to_json(&json!({
            "model": y.kind(),
            "params": params,
            "x": rat(&x),
            "tol": args.tol,
            "pass": pass,
            "rows": rows,
        })),
        Format::Csv => to_csv(
            &["n", "x", "exact", "exact_f64", "series", "abs_gap", "rel_gap", "pass"],
            rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    rat(&x),
                    r.exact.clone(),
                    r.exact_f64.to_string(),
                    r.series.to_string(),
                    r.abs_gap.to_string(),
                    r.rel_gap.to_string(),
                    r.pass.to_string(),
                ]
            }),
        ),
    };
    Ok(Report { body, pass })
}

pub fn mc(args: &Args) -> Result<Report, Failure> {
    let y = single_model(args)?;
    let params = single_params(args)?;
    let n = args.n.unwrap_or(1);
    let est =
        estimate_sum_degen_moment(&y, args.k, params.m, params.r, n, &params.lambda, args.samples, args.seed)?;
    let z = est.z_score();
    let pass = est.within(MC_SIGMAS);
    let exact_f64 = to_f64(&est.target);
    let body = match args.format {
        Format::Json => to_json(&json!({
            "model": y.kind(),
            "params": params,
            "k": args.k,
            "n": n,
            "samples": est.samples,
            "seed": args.seed,
            "exact": rat(&est.target),
            "exact_f64": exact_f64,
            "estimate": est.mean,
            "std_error": est.std_error,
            "abs_gap": (est.mean - exact_f64).abs(),
            "z": if z.is_finite() { json!(z) } else { json!("inf") },
            "sigmas": MC_SIGMAS,
            "pass": pass,
        })),
        Format::Csv => to_csv(
            &["k", "n", "samples", "seed", "exact", "estimate", "std_error", "z", "pass"],
            [vec![
                args.k.to_string(),
                n.to_string(),
                est.samples.to_string(),
                args.seed.to_string(),
                rat(&est.target),
                est.mean.to_string(),
                est.std_error.to_string(),
                z.to_string(),
                pass.to_string(),
            ]],
        ),
    };
    Ok(Report { body, pass })
}
