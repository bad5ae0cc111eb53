use std::io::Write;
use std::path::Path;

use coalesce_core::detcore::{
    brownian_m0, halfline_m0, wall_particle_probability, warren_cdf, DetOutcome, Threshold, WallParticlePattern,
};
use coalesce_core::gaps::{
    joint_gap_mesh, rayleigh_gap_density, rayleigh_mean, rayleigh_pdf, rayleigh_total, rayleigh_variance,
    DiscreteGapLaw,
};
use coalesce_core::kernels::DiscreteKernel;
use coalesce_core::quad::QuadratureSpec;
use coalesce_core::sim::{
    compare_wall_and_survivor_gaps, empirical_gap_histogram, empirical_joint_gap_corr, empirical_wall_gaps,
    empirical_warren_cdf, run_replicates, survivor_density, FiniteModel, GapHistogram, SimulationConfig,
};
use coalesce_core::validation::{run_suite, Suite};
use coalesce_core::Error;
use serde::Serialize;
use serde_json::json;

use crate::args::{Command, IntensityModel, LatticeModel, SuiteArg};
use crate::output::{csv, sci, OutputDir, Sci};
use crate::CliError;

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn lattice_kernel(model: LatticeModel, horizon: f64) -> Result<DiscreteKernel, CliError> {
    match model {
        LatticeModel::CtSimpleWalk => Ok(DiscreteKernel::ct_simple_walk(horizon)?),
        LatticeModel::ParityWalk => {
            if !(horizon >= 0.0 && horizon.fract() == 0.0) {
                return Err(CliError::Usage(format!("parity walk needs a whole number of steps, got {horizon}")));
            }
            Ok(DiscreteKernel::parity_walk(horizon as u64, 0)?)
        }
    }
}

fn model_name(model: LatticeModel) -> &'static str {
    match model {
        LatticeModel::CtSimpleWalk => "CT_SIMPLE_WALK",
        LatticeModel::ParityWalk => "PARITY_WALK",
    }
}

pub fn run(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::GapPmf { model, horizon, gmax, out: dir } => gap_pmf(model, horizon, gmax, dir.as_deref(), out),
        Command::Rayleigh { gmax, step, out: dir } => rayleigh(gmax, step, dir.as_deref(), out),
        Command::JointGap { grid_rows, gmax, tol, out: dir } => joint_gap(grid_rows, gmax, tol, dir.as_deref(), out),
        Command::Warren { model, horizon, starts, thresholds, mc, seed } => {
            warren(model, horizon, &starts, &thresholds, mc, seed, out)
        }
        Command::Intensity { model, walls, survivors, horizon, halfline } => {
            intensity(model, walls, survivors, horizon, halfline, out)
        }
        Command::Simulate { config, out: dir, bin_width } => simulate(&config, &dir, bin_width, out),
        Command::Verify { suite } => verify(suite, out),
    }
}

fn gap_pmf(model: LatticeModel, horizon: f64, gmax: i64, dir: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    if gmax < 1 {
        return Err(CliError::Usage(format!("gmax must be at least 1, got {gmax}")));
    }
    let kernel = lattice_kernel(model, horizon)?;
    let law = DiscreteGapLaw::new(&kernel);
    let step = law.lattice_step();
    let mut cumulative = 0.0;
    let mut rows = Vec::new();
    for g in 1..=gmax {
        if g % step != 0 {
            continue;
        }
        let mu = law.intensity(g)?;
        let pmf = mu / law.total_intensity();
        cumulative += pmf;
        rows.push(vec![g.to_string(), sci(mu), sci(pmf), sci(cumulative)]);
    }
    let table = csv(&["g", "mu", "pmf", "cumulative"], &rows);
    let doubled = kernel.doubled();
    let sidecar = json!({
        "model": model_name(model),
        "T": Sci(horizon),
        "lattice_step": step,
        "total_intensity": Sci(law.total_intensity()),
        "telescoped_closed_form": Sci(doubled.displacement_prob(0) + doubled.displacement_prob(step)),
        "survivor_density_per_site": Sci(law.survivor_density_per_site()),
    });
    match dir {
        None => emit(out, &table),
        Some(dir) => {
            let mut files = OutputDir::create(dir)?;
            files.write("gap_pmf.csv", &table)?;
            files.write_json("gap_pmf.json", &sidecar)?;
            let config = json!({ "model": model_name(model), "T": horizon, "gmax": gmax });
            files.finish("gap-pmf", config, None)?;
            emit(out, &format!("total intensity {}\n", sci(law.total_intensity())))
        }
    }
}

fn rayleigh(gmax: f64, step: f64, dir: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    if !(gmax > 0.0 && step > 0.0 && gmax / step <= 1e6) {
        return Err(CliError::Usage(format!("need gmax > 0 and a step giving at most 1e6 rows, got {gmax}, {step}")));
    }
    let n = (gmax / step).round() as usize;
    let rows: Vec<Vec<String>> = (0..=n)
        .map(|i| {
            let g = i as f64 * step;
            Ok(vec![sci(g), sci(rayleigh_gap_density(g)?), sci(rayleigh_pdf(g)?)])
        })
        .collect::<Result<_, Error>>()?;
    let table = csv(&["G", "mu", "pdf"], &rows);
    let constants = json!({
        "inv_sqrt_pi": Sci(rayleigh_total()),
        "sqrt_pi": Sci(rayleigh_mean()),
        "four_minus_pi": Sci(rayleigh_variance()),
    });
    let summary = format!(
        "total {}\nmean {}\nvariance {}\n",
        sci(rayleigh_total()),
        sci(rayleigh_mean()),
        sci(rayleigh_variance())
    );
    match dir {
        None => emit(out, &table),
        Some(dir) => {
            let mut files = OutputDir::create(dir)?;
            files.write("rayleigh.csv", &table)?;
            files.write_json("rayleigh.json", &constants)?;
            files.finish("rayleigh", json!({ "gmax": gmax, "step": step }), None)?;
            emit(out, &summary)
        }
    }
}

fn joint_gap(rows: usize, gmax: f64, tol: f64, dir: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = QuadratureSpec::default().with_relative_tolerance(tol);
    spec.validate()?;
    let result = joint_gap_mesh(rows, gmax, &spec)?;
    let n = result.grid.len();
    let mut mesh = String::new();
    for i in 0..n {
        for j in 0..n {
            let h = result.h_values[i * n + j].value;
            mesh.push_str(&format!("{} {} {}\n", sci(result.grid[i]), sci(result.grid[j]), sci(h)));
        }
        mesh.push('\n');
    }
    let c = &result.correlation;
    let sidecar = json!({
        "rho": Sci(c.rho),
        "rho_error": Sci(c.rho_error),
        "covariance": Sci(c.covariance),
        "means": [Sci(c.means[0]), Sci(c.means[1])],
        "variances": [Sci(c.variances[0]), Sci(c.variances[1])],
        "total": Sci(result.total.value),
        "total_error": Sci(result.total.error),
        "marginal_check": Sci(result.marginal_check),
    });
    let summary = format!("rho {} +- {}\n", sci(c.rho), sci(c.rho_error));
    match dir {
        None => emit(out, &mesh)?,
        Some(dir) => {
            let mut files = OutputDir::create(dir)?;
            files.write("joint_gap.dat", &mesh)?;
            files.write_json("joint_gap.json", &sidecar)?;
            files.finish("joint-gap", json!({ "grid_rows": rows, "gmax": gmax, "tol": tol }), None)?;
        }
    }
    emit(out, &summary)
}

fn parse_thresholds(raw: &[String]) -> Result<Vec<Threshold<i64>>, CliError> {
    raw.iter()
        .map(|s| match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(Threshold::Infinite),
            t => t.parse().map(Threshold::Finite).map_err(|_| CliError::Usage(format!("bad threshold {s:?}"))),
        })
        .collect()
}

fn warren(
    model: LatticeModel,
    horizon: f64,
    starts: &[i64],
    thresholds: &[String],
    mc: Option<u64>,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let kernel = lattice_kernel(model, horizon)?;
    let thresholds = parse_thresholds(thresholds)?;
    let det = warren_cdf(&kernel, starts, &thresholds)?;
    let mut text = format!("det {}\n", sci(det.value));
    if let Some(replicates) = mc {
        let seed = seed.ok_or_else(|| CliError::Usage("--mc needs an explicit --seed".into()))?;
        let finite = match model {
            LatticeModel::CtSimpleWalk => FiniteModel::CtSimpleWalk { horizon },
            LatticeModel::ParityWalk => FiniteModel::ParityWalk { steps: horizon as u64 },
        };
        let est = empirical_warren_cdf(finite, starts, &thresholds, replicates, seed)?;
        let z = if est.stderr > 0.0 { est.z_score(det.value) } else { 0.0 };
        text.push_str(&format!("mc {} stderr {} z {}\n", sci(est.value), sci(est.stderr), sci(z)));
    }
    emit(out, &text)
}

fn intensity(
    model: IntensityModel,
    walls: Vec<f64>,
    survivors: Vec<f64>,
    horizon: f64,
    halfline: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let outcome = match model {
        IntensityModel::Brownian => {
            let pattern = WallParticlePattern::new(walls, survivors)?;
            let m = if halfline { halfline_m0(&pattern, horizon)? } else { brownian_m0(&pattern, horizon)? };
            DetOutcome::nonnegative(m.determinant()?)?
        }
        lattice => {
            if halfline {
                return Err(CliError::Usage("--halfline applies to the Brownian model only".into()));
            }
            let ys = survivors
                .iter()
                .map(|&y| {
                    if y.fract() == 0.0 && y.abs() < 1e15 {
                        Ok(y as i64)
                    } else {
                        Err(CliError::Usage(format!("lattice survivors must be integers, got {y}")))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            let lm = if lattice == IntensityModel::ParityWalk { LatticeModel::ParityWalk } else { LatticeModel::CtSimpleWalk };
            let kernel = lattice_kernel(lm, horizon)?;
            wall_particle_probability(&kernel, &WallParticlePattern::new(walls, ys)?)?
        }
    };
    emit(out, &format!("det {}\n", sci(outcome.value)))
}

fn histogram_csv(h: &GapHistogram, spacing: f64) -> String {
    let rows: Vec<Vec<String>> = h
        .bins
        .iter()
        .map(|b| {
            vec![
                sci(b.lo as f64 * spacing),
                sci(b.hi as f64 * spacing),
                b.count.to_string(),
                sci(b.probability),
                sci(b.stderr),
            ]
        })
        .collect();
    csv(&["lo", "hi", "count", "probability", "stderr"], &rows)
}

#[derive(Serialize)]
struct EstimateJson {
    value: Sci,
    stderr: Sci,
}

fn simulate(config_path: &Path, dir: &Path, bin_width: i64, out: &mut dyn Write) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config_path).map_err(|e| CliError::io(config_path, e))?;
    let config: SimulationConfig = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
    config.validate()?;
    let summaries = run_replicates(&config)?;
    let spacing = config.spacing();
    let gaps = empirical_gap_histogram(&summaries, bin_width)?;
    let walls = empirical_wall_gaps(&summaries, bin_width)?;
    let density = survivor_density(&summaries, spacing)?;
    let est = |e: coalesce_core::sim::McEstimate| EstimateJson { value: Sci(e.value), stderr: Sci(e.stderr) };
    let lag1 = empirical_joint_gap_corr(&summaries, 1).ok().map(est);
    let lag2 = empirical_joint_gap_corr(&summaries, 2).ok().map(est);
    let comparison = compare_wall_and_survivor_gaps(&summaries, bin_width)?;
    let summary = json!({
        "replicates": config.replicates,
        "gaps_recorded": gaps.total,
        "survivor_density_per_unit_length": est(density),
        "adjacent_gap_correlation": lag1,
        "lag2_gap_correlation": lag2,
        "wall_vs_survivor_max_abs_z": Sci(comparison.max_abs_z),
    });
    let mut files = OutputDir::create(dir)?;
    files.write("gap_histogram.csv", &histogram_csv(&gaps, spacing))?;
    files.write("wall_gap_histogram.csv", &histogram_csv(&walls, spacing))?;
    files.write_json("summary.json", &summary)?;
    let seed = config.seed;
    files.finish("simulate", serde_json::to_value(&config)?, Some(seed))?;
    emit(out, &format!("survivor density {} +- {}\n", sci(density.value), sci(density.stderr)))
}

fn verify(suite: SuiteArg, out: &mut dyn Write) -> Result<(), CliError> {
    let suite = match suite {
        SuiteArg::Oracle => Suite::Oracle,
        SuiteArg::Montecarlo => Suite::Montecarlo,
        SuiteArg::Quadrature => Suite::Quadrature,
        SuiteArg::All => Suite::All,
    };
    let reports = run_suite(suite)?;
    let mut failed = 0;
    for r in &reports {
        emit(out, &format!("{}\n", r.line()))?;
        failed += (!r.passed) as usize;
    }
    if failed > 0 {
        return Err(CliError::Acceptance { failed });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use coalesce_core::sim::Model;

    #[test]
    fn thresholds_parse() {
        let t = parse_thresholds(&["-2".into(), "inf".into()]).unwrap();
        assert_eq!(t, vec![Threshold::Finite(-2), Threshold::Infinite]);
        assert!(parse_thresholds(&["x".into()]).is_err());
    }

    #[test]
    fn fine_lattice_model_is_recognized() {
        let c: SimulationConfig = serde_json::from_str(
            r#"{"model":"BROWNIAN_FINE_LATTICE","horizon":1,"window_halfwidth":20,"lattice_spacing":0.1,"replicates":2,"seed":1}"#,
        )
        .unwrap();
        assert_eq!(c.model, Model::BrownianFineLattice);
    }
}
