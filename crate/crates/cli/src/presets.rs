//! Curve sets for each figure id.

use fbmimo_core::bounds::{miso_reference, zf_dpc_power_offset_db, zf_perfect_throughput, CurveMeta};
use fbmimo_core::numerics::db_to_linear;
use fbmimo_core::simulate::{miso_feedback_throughput, mu_throughput, random_bf_throughput, tdma_throughput};
use fbmimo_core::{Csit, PrecoderKind, ScalingPolicy, SimConfig, ThroughputCurve};

use crate::config::{ExperimentSpec, FigureId};
use crate::error::CliError;
use crate::output::NamedCurve;

type Curves = Result<Vec<NamedCurve>, CliError>;

fn base(spec: &ExperimentSpec, m: usize, policy: ScalingPolicy, grid: &[f64]) -> SimConfig {
    SimConfig::multiuser(m, policy, grid.to_vec())
        .with_trials(spec.trials)
        .with_seed(spec.seed)
        .with_path(spec.path)
}

fn mu(cfg: &SimConfig, name: &str) -> Result<NamedCurve, CliError> {
    Ok(NamedCurve::new(name, cfg.precoder.label(), mu_throughput(cfg)?))
}

fn perfect(spec: &ExperimentSpec, m: usize, grid: &[f64], precoder: PrecoderKind, name: &str) -> Result<NamedCurve, CliError> {
    let cfg = base(spec, m, ScalingPolicy::fixed(0), grid).with_csit(Csit::Perfect).with_precoder(precoder);
    mu(&cfg, name)
}

fn analytic<F: Fn(f64) -> f64>(
    spec: &ExperimentSpec,
    m: usize,
    k: usize,
    grid: &[f64],
    policy: Option<ScalingPolicy>,
    notes: &str,
    f: F,
) -> Result<ThroughputCurve, CliError> {
    let meta = CurveMeta { antennas: m, users: k, policy, precoder: None, seed: spec.seed, notes: notes.into() };
    Ok(ThroughputCurve::analytic(grid, meta, f)?)
}

fn tdma_and_rbf(spec: &ExperimentSpec, m: usize, grid: &[f64]) -> Curves {
    let cfg = base(spec, m, ScalingPolicy::fixed(0), grid).with_csit(Csit::Perfect);
    Ok(vec![
        NamedCurve::new("tdma", "tdma", tdma_throughput(&cfg)?),
        NamedCurve::new("random_bf", "random_bf", random_bf_throughput(&cfg)?),
    ])
}

/// Runs every curve of figure `id`.
pub fn figure(id: FigureId, spec: &ExperimentSpec) -> Curves {
    let scaled = ScalingPolicy::approx_3db_scaled(2.0);
    match id {
        FigureId::Miso4x1 => {
            let (m, bits) = (4, 3);
            let grid = spec.grid_or("0:5:30");
            let fb = miso_feedback_throughput(&base(spec, m, ScalingPolicy::fixed(bits), &grid).with_users(1))?;
            let refs = |pick: fn(&fbmimo_core::bounds::MisoReference) -> f64| {
                move |x: f64| pick(&miso_reference(db_to_linear(x), m, bits as f64).expect("valid"))
            };
            Ok(vec![
                NamedCurve::new("csit", "analytic", analytic(spec, m, 1, &grid, None, "csit", refs(|r| r.csit))?),
                NamedCurve::new("no_csit", "analytic", analytic(spec, m, 1, &grid, None, "no_csit", refs(|r| r.no_csit))?),
                NamedCurve::new(format!("feedback_B{bits}"), "beamforming", fb),
                NamedCurve::new(
                    "feedback_approximation",
                    "analytic",
                    analytic(spec, m, 1, &grid, Some(ScalingPolicy::fixed(bits)), "approximation", refs(|r| r.feedback_approx))?,
                ),
            ])
        }
        FigureId::Fixed5x5 => {
            let grid = spec.grid_or("0:5:40");
            let mut out = vec![perfect(spec, 5, &grid, PrecoderKind::Zf, "zf_perfect")?];
            for b in [10, 15, 20] {
                out.push(mu(&base(spec, 5, ScalingPolicy::fixed(b), &grid), &format!("zf_quantized_B{b}"))?);
            }
            Ok(out)
        }
        FigureId::Scaled5x5 => {
            let m = 5;
            let grid = spec.grid_or("0:5:25");
            let offset = zf_dpc_power_offset_db(m);
            let reference = analytic(spec, m, m, &grid, None, "perfect zf shifted by the dpc offset", |x| {
                zf_perfect_throughput(db_to_linear(x + offset), m)
            })?;
            Ok(vec![
                perfect(spec, m, &grid, PrecoderKind::Zf, "zf_perfect")?,
                mu(&base(spec, m, scaled, &grid), "zf_quantized_scaled")?,
                NamedCurve::new("sum_capacity_offset_reference", "analytic", reference),
            ])
        }
        FigureId::Scaled6x6 => {
            let grid = spec.grid_or("0:5:30");
            Ok(vec![
                perfect(spec, 6, &grid, PrecoderKind::Zf, "zf_perfect")?,
                mu(&base(spec, 6, ScalingPolicy::approx_3db_scaled(2.0), &grid), "zf_quantized_b2")?,
                mu(&base(spec, 6, ScalingPolicy::approx_3db_scaled(4.0), &grid), "zf_quantized_b4")?,
            ])
        }
        FigureId::Mux4x4 => {
            let m = 4;
            let grid = spec.grid_or("0:5:40");
            let mut out = vec![perfect(spec, m, &grid, PrecoderKind::Zf, "zf_perfect")?];
            for (name, factor) in [("zf_alpha_0.5", 0.5), ("zf_alpha_1.3", 1.3)] {
                let policy = ScalingPolicy::log_scaled(factor * (m as f64 - 1.0));
                out.push(mu(&base(spec, m, policy, &grid), name)?);
            }
            Ok(out)
        }
        FigureId::Reg5x5 => {
            let grid = spec.grid_or("0:5:30");
            let mut out = Vec::new();
            for kind in [PrecoderKind::Zf, PrecoderKind::Rzf] {
                let l = kind.label();
                out.push(perfect(spec, 5, &grid, kind, &format!("{l}_perfect"))?);
                out.push(mu(&base(spec, 5, scaled, &grid).with_precoder(kind), &format!("{l}_quantized_scaled"))?);
            }
            Ok(out)
        }
        FigureId::Compare44 => {
            let grid = spec.grid_or("0:5:30");
            let mut out = vec![mu(&base(spec, 4, scaled, &grid).with_precoder(PrecoderKind::Rzf), "rzf_quantized_scaled")?];
            out.extend(tdma_and_rbf(spec, 4, &grid)?);
            Ok(out)
        }
        FigureId::Compare44b => {
            let grid = spec.grid_or("0:5:30");
            let mut out = Vec::new();
            for b in [5, 10, 15, 20] {
                let cfg = base(spec, 4, ScalingPolicy::fixed(b), &grid).with_precoder(PrecoderKind::Rzf);
                out.push(mu(&cfg, &format!("rzf_quantized_B{b}"))?);
            }
            out.extend(tdma_and_rbf(spec, 4, &grid)?);
            Ok(out)
        }
        FigureId::Compare88 => {
            let grid = spec.grid_or("0:5:30");
            let mut out = vec![
                mu(&base(spec, 8, scaled, &grid).with_precoder(PrecoderKind::Rzf), "rzf_quantized_scaled")?,
                mu(&base(spec, 8, ScalingPolicy::fixed(20), &grid).with_precoder(PrecoderKind::Rzf), "rzf_quantized_B20")?,
            ];
            out.extend(tdma_and_rbf(spec, 8, &grid)?);
            Ok(out)
        }
    }
}
