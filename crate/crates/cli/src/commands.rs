use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use anticonc_core::bounds::{
    main_theorem_bound, optimize_indices, pawlowski_check, repetition_corollary_bound,
    sigma_corollary_bound, soze_bound, soze_decay_profile, subset_lemma_bound,
};
use anticonc_core::engines::perm_sum_distribution;
use anticonc_core::experiments::sweep::CSV_SCHEMA_VERSION;
use anticonc_core::experiments::{extremal_search, run_sweep, Objective, SearchConfig, SweepConfig};
use anticonc_core::numerics::{format_rational, parse_rational, rational_to_f64};
use anticonc_core::poset::{dilworth_width_oracle, stanley_width, width_certificate};
use anticonc_core::sampling::{estimate_interval_mass, estimate_perm_concentration};
use anticonc_core::{BoundReport, Error, Interval, McConfig, RationalVector, Statement, SumMode};

use crate::render::{csv_table, pairs, preamble};
use crate::{
    BoundsArgs, Cli, Command, ExactArgs, Failure, Format, InstanceArgs, McArgs, ObjectiveKind, Query,
    SearchArgs, SweepArgs, WidthArgs,
};

type Out = Result<String, Failure>;

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

/// A vector given inline (`1,-1/2,3`) or as `@path` with one value per line.
fn parse_vector(spec: &str) -> Result<RationalVector, Error> {
    match spec.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{path}: {e}")))?;
            let values = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(parse_rational)
                .collect::<Result<Vec<_>, _>>()?;
            RationalVector::new(values)
        }
        None => spec.parse(),
    }
}

fn instance(args: &InstanceArgs) -> Result<(RationalVector, RationalVector), Error> {
    let w = parse_vector(&args.w)?;
    let v = parse_vector(&args.v)?;
    if w.len() != v.len() {
        return Err(Error::LengthMismatch { w: w.len(), v: v.len() });
    }
    Ok((w, v))
}

fn required<'a>(value: &'a Option<String>, flag: &str) -> Result<&'a str, Error> {
    value.as_deref().ok_or_else(|| Error::Config(format!("--{flag} is required for this statement")))
}

pub fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Exact(a) => exact(cli, a),
        Command::Mc(a) => mc(cli, a),
        Command::Bounds(a) => bounds(cli, a),
        Command::Width(a) => width(cli, a),
        Command::Sweep(a) => sweep(cli, a),
        Command::Search(a) => search(cli, a),
    }
}

fn exact(cli: &Cli, a: &ExactArgs) -> Out {
    let (w, v) = instance(&a.instance)?;
    let dist = perm_sum_distribution(&w, &v, a.cap)?;
    let mut out = preamble(cli, None);
    let Query { interval, point, q, full } = &a.query;
    if *full {
        let rows: Vec<Vec<String>> = dist
            .iter_values()
            .map(|(x, p)| vec![format_rational(&x), format_rational(&p), rational_to_f64(&p).to_string()])
            .collect();
        match cli.format {
            Format::Csv => out.push_str(&csv_table(&["value", "probability", "probability_f64"], &rows)),
            Format::Structured => {
                out.push_str(&format!("n={}\nsupport_size={}\ntotal={}\n", w.len(), dist.len(), dist.total()));
                for r in rows {
                    out.push_str(&format!("mass[{}]={}\n", r[0], r[1]));
                }
            }
        }
        return Ok(out);
    }
    let fields = if let Some(x) = point {
        let x = parse_rational(x)?;
        let p = dist.point_mass(&x);
        vec![kv("query", "point"), kv("x", format_rational(&x)), kv("value", format_rational(&p)), kv("value_f64", rational_to_f64(&p))]
    } else if let Some(iv) = interval {
        let iv: Interval = iv.parse()?;
        let p = dist.prob_mass(&iv);
        vec![kv("query", "interval"), kv("interval", &iv), kv("value", format_rational(&p)), kv("value_f64", rational_to_f64(&p))]
    } else {
        let t = parse_rational(q.as_deref().expect("query group is required"))?;
        let (count, lo) = dist.concentration_window(&t)?;
        let p = BigRational::new(BigInt::from(count), BigInt::from(dist.total().clone()));
        let lo = dist.grid().value(lo);
        vec![
            kv("query", "concentration"),
            kv("t", format_rational(&t)),
            kv("value", format_rational(&p)),
            kv("value_f64", rational_to_f64(&p)),
            kv("window", format!("{}:{}", format_rational(&lo), format_rational(&(&lo + &t)))),
        ]
    };
    out.push_str(&pairs(cli.format, &fields));
    Ok(out)
}

fn mc(cli: &Cli, a: &McArgs) -> Out {
    let (w, v) = instance(&a.instance)?;
    let mut cfg = McConfig::new(a.samples, a.seed);
    cfg.threads = a.threads.threads;
    let Query { interval, point, q, full } = &a.query;
    if *full {
        return Err(Error::Config("--full is only available for `exact`".into()).into());
    }
    let mut fields = Vec::new();
    if let Some(t) = q {
        let t = parse_rational(t)?;
        let e = estimate_perm_concentration(&w, &v, &t, &cfg)?;
        fields.extend([
            kv("query", "concentration"),
            kv("t", format_rational(&t)),
            kv("estimate", e.estimate),
            kv("stderr", e.stderr),
            kv("samples", e.samples),
            kv("seed", e.seed),
            kv("bootstrap_resamples", e.resamples),
            kv("note", anticonc_core::ConcentrationEstimate::BIAS_NOTE),
        ]);
    } else {
        let (query, iv) = match (point, interval) {
            (Some(x), _) => ("point", Interval::point(parse_rational(x)?)),
            (_, Some(iv)) => ("interval", iv.parse()?),
            _ => unreachable!("query group is required"),
        };
        let e = estimate_interval_mass(&w, &v, &iv, &cfg)?;
        fields.extend([
            kv("query", query),
            kv("interval", &iv),
            kv("estimate", e.estimate),
            kv("stderr", e.stderr),
            kv("hits", e.hits),
            kv("samples", e.samples),
            kv("seed", e.seed),
        ]);
    }
    let mut out = preamble(cli, Some(a.seed));
    out.push_str(&pairs(cli.format, &fields));
    Ok(out)
}

fn report_output(cli: &Cli, seed: Option<u64>, mut fields: Vec<(String, String)>, report: &BoundReport) -> Out {
    fields.extend(report.key_values());
    let out = preamble(cli, seed) + &pairs(cli.format, &fields);
    if report.preconditions_ok() {
        Ok(out)
    } else {
        Err(Failure::Violations { output: out, list: report.violations.clone() })
    }
}

fn bounds(cli: &Cli, a: &BoundsArgs) -> Out {
    let statement: Statement = a.statement.parse()?;
    let perm_instance = || -> Result<(RationalVector, RationalVector), Error> {
        instance(&InstanceArgs {
            w: required(&a.w, "w")?.to_string(),
            v: required(&a.v, "v")?.to_string(),
        })
    };
    let len_i = parse_rational(&a.len_i)?;
    match statement {
        Statement::Main => {
            let (w, v) = perm_instance()?;
            if a.optimize {
                let choice = optimize_indices(&w, &v, &len_i)?;
                let fields = vec![kv("optimized", "true"), kv("i1", choice.i1), kv("i2", choice.i2)];
                report_output(cli, None, fields, &choice.report)
            } else {
                let (i1, i2) = match (a.i1, a.i2) {
                    (Some(i1), Some(i2)) => (i1, i2),
                    _ => return Err(Error::Config("--i1 and --i2 are required unless --optimize".into()).into()),
                };
                report_output(cli, None, Vec::new(), &main_theorem_bound(&w, &v, &len_i, i1, i2)?)
            }
        }
        Statement::Sigma => {
            let (w, v) = perm_instance()?;
            report_output(cli, None, Vec::new(), &sigma_corollary_bound(&w, &v, &len_i)?)
        }
        Statement::Repetition => {
            let (w, v) = perm_instance()?;
            let eps = parse_rational(required(&a.eps, "eps")?)?;
            report_output(cli, None, Vec::new(), &repetition_corollary_bound(&w, &v, &eps)?)
        }
        Statement::Pawlowski => {
            let (w, v) = perm_instance()?;
            let c = pawlowski_check(&w, &v, a.cap)?;
            let mut fields = vec![
                kv("statement", "pawlowski"),
                kv("constant_mode", "sharp"),
                kv("n", c.n),
                kv("bound", format_rational(&c.bound)),
                kv("max_mass", format_rational(&c.max_mass)),
                kv("witness", format_rational(&c.witness)),
                kv("satisfied", c.satisfied),
            ];
            fields.extend(c.notes.iter().map(|n| kv("note", n)));
            Ok(preamble(cli, None) + &pairs(cli.format, &fields))
        }
        Statement::LemmaWith | Statement::LemmaWithout => {
            let n = a.n.ok_or_else(|| Error::Config("--n is required".into()))?;
            let k = a.k.ok_or_else(|| Error::Config("--k is required".into()))?;
            let mode = if statement == Statement::LemmaWith { SumMode::WithReplacement } else { SumMode::WithoutReplacement };
            report_output(cli, None, Vec::new(), &subset_lemma_bound(n, k, mode)?)
        }
        Statement::Soze => soze(cli, a),
        Statement::Width => Err(Error::Config("use the `width` subcommand".into()).into()),
    }
}

fn soze(cli: &Cli, a: &BoundsArgs) -> Out {
    let w = parse_vector(required(&a.w, "w")?)?;
    let levels = a
        .levels
        .split(',')
        .map(|s| parse_rational(s.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cfg = McConfig::new(a.samples, a.seed);
    cfg.threads = a.threads.threads;
    let profile = soze_decay_profile(&w, &levels, &cfg)?;
    let n = w.len();
    let rows: Vec<Vec<String>> = profile
        .rows
        .iter()
        .map(|r| {
            let envelope = soze_bound(n, &r.l);
            vec![
                format_rational(&r.l),
                r.estimate.estimate.to_string(),
                r.estimate.stderr.to_string(),
                r.estimate.hits.to_string(),
                envelope.value.to_string(),
                (r.estimate.estimate * n as f64).to_string(),
            ]
        })
        .collect();
    let mut out = preamble(cli, Some(a.seed));
    match cli.format {
        Format::Csv => out.push_str(&csv_table(&["L", "estimate", "stderr", "hits", "envelope", "n_times_estimate"], &rows)),
        Format::Structured => {
            let mut fields = vec![
                kv("statement", "soze"),
                kv("constant_mode", "up to absolute constant"),
                kv("n", n),
                kv("normalization", profile.normalization.describe()),
                kv("samples", a.samples),
                kv("seed", a.seed),
            ];
            for r in &rows {
                fields.push(kv(&format!("estimate[L={}]", r[0]), &r[1]));
                fields.push(kv(&format!("stderr[L={}]", r[0]), &r[2]));
                fields.push(kv(&format!("n_times_estimate[L={}]", r[0]), &r[5]));
            }
            fields.push(kv("envelope", format!("1/{n}")));
            fields.push(kv("note", "decay constant c unspecified; envelope omits e^(-c|L|)"));
            out.push_str(&crate::render::key_values(&fields));
        }
    }
    Ok(out)
}

fn width(cli: &Cli, a: &WidthArgs) -> Out {
    let mut fields = vec![kv("n", a.n), kv("k", a.k)];
    if a.oracle {
        // Call the oracle directly so an over-cap poset surfaces as a resource error.
        let dilworth = dilworth_width_oracle(a.n, a.k, a.oracle_cap)?;
        let cert = width_certificate(a.n, a.k, a.oracle_cap)?;
        fields.push(kv("stanley_width", &cert.stanley_width));
        fields.push(kv("dilworth_width", dilworth));
        fields.push(kv("agree", cert.agree.unwrap_or(false)));
    } else {
        fields.push(kv("stanley_width", stanley_width(a.n, a.k)?));
    }
    Ok(preamble(cli, None) + &pairs(cli.format, &fields))
}

fn write_file(path: &Path, body: &str) -> Result<(), Error> {
    std::fs::write(path, body).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn sweep(cli: &Cli, a: &SweepArgs) -> Out {
    let mut cfg = SweepConfig::from_path(&a.config)?;
    if a.threads.threads.is_some() {
        cfg.threads = a.threads.threads;
    }
    let outcome = run_sweep(&cfg)?;
    let head = preamble(cli, Some(cfg.seed))
        + &format!("# config: {}\n# csv-schema: sweep/{}\n", a.config.display(), CSV_SCHEMA_VERSION);
    let csv = outcome.to_csv();
    let summary = outcome.summary.to_text();
    if let Some(p) = a.csv.as_ref().or(cfg.output.csv.as_ref()) {
        write_file(p, &(head.clone() + &csv))?;
    }
    if let Some(p) = a.summary.as_ref().or(cfg.output.summary.as_ref()) {
        write_file(p, &(head.clone() + &summary))?;
    }
    Ok(head
        + match cli.format {
            Format::Csv => &csv,
            Format::Structured => &summary,
        })
}

fn search(cli: &Cli, a: &SearchArgs) -> Out {
    let mut cfg = SearchConfig::new(a.n, a.coord_bound);
    cfg.seed = a.seed;
    cfg.restarts = a.restarts;
    cfg.cap = a.cap;
    cfg.objective = match a.objective {
        ObjectiveKind::PointMass => Objective::PointMass,
        ObjectiveKind::Concentration => Objective::Concentration(parse_rational(&a.t)?),
    };
    let r = extremal_search(&cfg)?;
    let join = |xs: &[i64]| xs.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
    let mut fields = vec![
        kv("objective", &cfg.objective),
        kv("n", a.n),
        kv("coord_bound", a.coord_bound),
        kv("mode", if r.exhaustive { "exhaustive" } else { "hill-climb" }),
        kv("value", format_rational(&r.value)),
        kv("value_f64", rational_to_f64(&r.value)),
        kv("witness", format_rational(&r.witness)),
        kv("w", join(&r.w)),
        kv("v", join(&r.v)),
        kv("evaluated", r.evaluated),
    ];
    if !r.exhaustive {
        fields.push(kv("restarts", a.restarts));
    }
    if r.value.is_zero() {
        fields.push(kv("note", "no instance found"));
    }
    Ok(preamble(cli, (!r.exhaustive).then_some(a.seed)) + &pairs(cli.format, &fields))
}
