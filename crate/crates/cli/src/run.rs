//! Command dispatch.

use std::io::Write;

use fbmimo_core::bounds::{ceiling_fixed_bits, feedback_bits, rate_gap_bound, ScalingMode};
use fbmimo_core::numerics::db_to_linear;
use fbmimo_core::quantizer::{
    error_upper_bound, expected_error, expected_neg_log2_error, expected_optimal_error, generate_codebook,
    neg_log2_error_bounds,
};
use fbmimo_core::simulate::{
    miso_feedback_throughput, mu_paired, mu_throughput, random_bf_throughput, tdma_throughput,
};
use fbmimo_core::numerics::{mean_and_std_err, sample_complex_gaussian};
use fbmimo_core::stats::ks_one_sample;
use fbmimo_core::{Csit, RngStream, ScalingPolicy, SimConfig};

use crate::config::{Command, Engine, ExperimentSpec, GridName, SweepSpec, TableSpec, ValidateKind, ValidateSpec};
use crate::error::CliError;
use crate::output::{curves_csv, emit, table_csv, NamedCurve};
use crate::presets;

/// Runs `spec`, writing CSV (or the validation report) to `--out` or `stdout`.
/// Returns `false` if a validation check failed.
pub fn run(spec: &ExperimentSpec, stdout: &mut dyn Write) -> Result<bool, CliError> {
    match &spec.command {
        Command::Sweep(s) => {
            let curves = sweep(spec, s)?;
            emit(&curves_csv("sweep", &curves)?, spec.out.as_deref(), stdout)?;
            Ok(true)
        }
        Command::Figure(id) => {
            let curves = presets::figure(*id, spec)?;
            emit(&curves_csv(id.name(), &curves)?, spec.out.as_deref(), stdout)?;
            Ok(true)
        }
        Command::Table(t) => {
            emit(&quantizer_table(t)?, spec.out.as_deref(), stdout)?;
            Ok(true)
        }
        Command::Validate(v) => {
            let lines = match v.kind {
                ValidateKind::Bounds => validate_bounds(spec, v)?,
                ValidateKind::Quantizer => validate_quantizer(spec)?,
            };
            let all = lines.iter().all(|(ok, _)| *ok);
            let mut text = String::new();
            for (ok, line) in &lines {
                text.push_str(if *ok { "PASS " } else { "FAIL " });
                text.push_str(line);
                text.push('\n');
            }
            emit(text.as_bytes(), spec.out.as_deref(), stdout)?;
            Ok(all)
        }
    }
}

fn sweep(spec: &ExperimentSpec, s: &SweepSpec) -> Result<Vec<NamedCurve>, CliError> {
    let cfg = SimConfig {
        antennas: s.antennas,
        users: s.users,
        snr_grid_db: spec.grid_or_default(),
        policy: s.policy,
        precoder: s.precoder,
        csit: s.csit,
        path: spec.path,
        trials: spec.trials,
        seed: spec.seed,
    };
    let l = s.precoder.label();
    Ok(match s.engine {
        Engine::Mu => {
            let csit = if s.csit == Csit::Perfect { "perfect" } else { "quantized" };
            vec![NamedCurve::new(format!("{l}_{csit}"), l, mu_throughput(&cfg)?)]
        }
        Engine::RateGap => {
            let p = mu_paired(&cfg.with_csit(Csit::Quantized))?;
            vec![
                NamedCurve::new(format!("{l}_perfect"), l, p.perfect),
                NamedCurve::new(format!("{l}_quantized"), l, p.quantized),
                NamedCurve::new("rate_gap_per_user", l, p.gap),
            ]
        }
        Engine::Miso => vec![NamedCurve::new("miso_feedback", "beamforming", miso_feedback_throughput(&cfg)?)],
        Engine::Tdma => vec![NamedCurve::new("tdma", "tdma", tdma_throughput(&cfg)?)],
        Engine::RandomBf => vec![NamedCurve::new("random_bf", "random_bf", random_bf_throughput(&cfg)?)],
    })
}

fn quantizer_table(t: &TableSpec) -> Result<Vec<u8>, CliError> {
    let m = t.antennas;
    let rows = t
        .bits
        .iter()
        .map(|&b| {
            let b = b as f64;
            Ok(vec![
                b.to_string(),
                expected_error(m, b)?.to_string(),
                error_upper_bound(m, b)?.to_string(),
                expected_optimal_error(m, b)?.to_string(),
                expected_neg_log2_error(m, b)?.to_string(),
            ])
        })
        .collect::<Result<Vec<_>, fbmimo_core::Error>>()?;
    table_csv(&["B", "expected_error", "upper_bound", "optimal_lower_mean", "neg_log2_mean"], &rows)
}

type Report = Vec<(bool, String)>;

fn validate_bounds(spec: &ExperimentSpec, v: &ValidateSpec) -> Result<Report, CliError> {
    let (ms, bs, default_grid): (&[usize], &[u32], &str) = match v.grid {
        GridName::Default => (&[3, 4, 5, 6], &[4, 8, 12], "0:5:30"),
        GridName::Quick => (&[3, 4], &[4, 8], "0:10:30"),
    };
    let grid = spec.grid_or(default_grid);
    let top = *grid.last().expect("non-empty grid");
    let mut report = Vec::new();

    // error-moment bounds, closed form
    let mut ok = true;
    for &m in ms {
        for &b in bs {
            let b = b as f64;
            let e = expected_error(m, b)?;
            ok &= expected_optimal_error(m, b)? <= e && e < error_upper_bound(m, b)?;
            let (lo, hi) = neg_log2_error_bounds(m, b)?;
            let v = expected_neg_log2_error(m, b)?;
            ok &= lo <= v && v <= hi;
        }
    }
    report.push((ok, format!("quantization error bounds: {} (M, B) pairs", ms.len() * bs.len())));

    // rate-gap bound and fixed-B ceiling, Monte Carlo
    let mut violations = Vec::new();
    let mut ceiling_violations = Vec::new();
    let mut cells = 0;
    for &m in ms {
        for &b in bs {
            let cfg = SimConfig::multiuser(m, ScalingPolicy::fixed(b), grid.clone())
                .with_trials(spec.trials)
                .with_seed(spec.seed)
                .with_path(spec.path);
            let pair = mu_paired(&cfg)?;
            for p in &pair.gap.points {
                cells += 1;
                if p.mean > rate_gap_bound(db_to_linear(p.snr_db), m, b as f64)? + 3.0 * p.std_err {
                    violations.push(format!("M={m} B={b} {} dB", p.snr_db));
                }
            }
            let last = pair.quantized.points.last().expect("non-empty");
            if last.mean > ceiling_fixed_bits(m, b as f64)?.exact_form + 3.0 * last.std_err {
                ceiling_violations.push(format!("M={m} B={b}"));
            }
        }
    }
    report.push((violations.is_empty(), format!("rate-gap bound: {cells} cells, violations {violations:?}")));
    report.push((
        ceiling_violations.is_empty(),
        format!("fixed-B throughput ceiling at {top} dB: violations {ceiling_violations:?}"),
    ));

    // scaled feedback keeps the per-user gap under log2(b) = 1
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for &m in ms {
        feedback_bits(top, m, 2.0, ScalingMode::Exact)?;
        let cfg = SimConfig::multiuser(m, ScalingPolicy::exact_scaled(2.0), grid.clone())
            .with_trials(spec.trials)
            .with_seed(spec.seed)
            .with_path(spec.path);
        for p in &mu_paired(&cfg)?.gap.points {
            worst = worst.max(p.mean);
            ok &= p.mean <= 1.0 + 3.0 * p.std_err;
        }
    }
    report.push((ok, format!("feedback scaling with b = 2: largest per-user gap {worst:.4} (limit 1)")));
    Ok(report)
}

fn validate_quantizer(spec: &ExperimentSpec) -> Result<Report, CliError> {
    let mut report = Vec::new();
    for (m, b) in [(2usize, 2u32), (3, 4), (4, 6)] {
        let n = spec.trials;
        let z = (0..n)
            .map(|t| {
                let mut rng = RngStream::new(spec.seed, t);
                let cb = generate_codebook(m, b, &mut rng)?;
                Ok(cb.quantize(&sample_complex_gaussian(m, &mut rng))?.error)
            })
            .collect::<Result<Vec<f64>, fbmimo_core::Error>>()?;
        let (mean, se) = mean_and_std_err(&z);
        let want = expected_error(m, b as f64)?;
        let ks = ks_one_sample(&z, |x| 1.0 - (1.0 - x.powi(m as i32 - 1)).powf((b as f64).exp2()));
        let ok = (mean - want).abs() <= 3.0 * se && ks.passes(0.01);
        report.push((
            ok,
            format!("M={m} B={b}: mean {mean:.5} vs {want:.5}, KS D={:.4} p={:.3}", ks.statistic, ks.p_value),
        ));
    }
    Ok(report)
}
