use anyhow::Context;
use moran_core::auxiliary::{build_aux, monte_carlo_local_dims, strong_law_sequence, TargetMeasure};
use moran_core::estimators::{
    deviation_table, ld_spectrum_estimate, local_dim_trajectory, tau_liminf_limsup, tau_table, LevelSampler,
    PeriodicAddress,
};
use moran_core::model::Level;
use moran_core::spectra::{joint_grid, joint_table, level_set_curve, Bound};
use moran_core::table::{fmt_f64, Table};
use moran_core::Spectra;

use crate::config::{Command, RunConfig};
use crate::output::Artifacts;

/// What a run leaves on stdout besides the artifacts.
pub struct Outcome {
    pub summary: String,
    pub ok: bool,
}

fn sampled_levels(c: &RunConfig) -> anyhow::Result<Vec<Level>> {
    Ok(LevelSampler::new(c.model.schedule(), c.depth_index)?.levels())
}

fn breakpoints(c: &RunConfig) -> Vec<Level> {
    c.model.schedule().all_breakpoints()[..c.depth_index].to_vec()
}

pub fn run(c: &RunConfig, out: &mut Artifacts) -> anyhow::Result<Outcome> {
    let m = &c.model;
    match c.command {
        Command::Validate => {
            let report = m.validation_report();
            let text = report.to_string();
            out.text("validate.txt", &text)?;
            Ok(Outcome { summary: text, ok: report.first_hard_failure().is_none() })
        }
        Command::Spectra => {
            let sp = Spectra::new(m);
            out.csv("spectra_lower.csv", &level_set_curve(&sp, false, c.grid).to_table())?;
            out.csv("spectra_upper.csv", &level_set_curve(&sp, true, c.grid).to_table())?;
            out.csv("spectra_joint.csv", &joint_table(&joint_grid(&sp, c.joint_grid)))?;
            let summary = format!(
                "dim_H X = {}, dim_P X = {}; {} α rows per curve, {}² joint points",
                fmt_f64(sp.dim_h_x()),
                fmt_f64(sp.dim_p_x()),
                c.grid,
                c.joint_grid
            );
            Ok(Outcome { summary, ok: true })
        }
        Command::LocalDim => {
            let address = PeriodicAddress::new(c.address.clone());
            let traj = local_dim_trajectory(m, &address, &sampled_levels(c)?, &breakpoints(c))?;
            out.csv("localdim.csv", &traj.to_table())?;
            let lo = traj.values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = traj.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(Outcome { summary: format!("d ranges over [{}, {}]", fmt_f64(lo), fmt_f64(hi)), ok: true })
        }
        Command::Lq => {
            out.csv("lq.csv", &tau_table(m, &c.s_values, &sampled_levels(c)?)?)?;
            let sp = Spectra::new(m);
            let mut t = Table::new(&["s", "tau_lower", "tau_upper", "closed_lower", "closed_upper"]);
            let mut worst = 0.0f64;
            for &s in &c.s_values {
                let e = tau_liminf_limsup(m, s, c.depth_index)?;
                let (lo, hi) = (sp.tau_closed(s, Bound::Lower), sp.tau_closed(s, Bound::Upper));
                worst = worst.max((e.lower - lo).abs()).max((e.upper - hi).abs());
                t.push(vec![fmt_f64(s), fmt_f64(e.lower), fmt_f64(e.upper), fmt_f64(lo), fmt_f64(hi)]);
            }
            out.csv("lq_extremes.csv", &t)?;
            Ok(Outcome { summary: format!("max |estimate - closed form| = {}", fmt_f64(worst)), ok: true })
        }
        Command::Ld => {
            let alpha = c.alpha.context("run.alpha is required for ld")?;
            let beta = c.beta.context("run.beta is required for ld")?;
            let est = ld_spectrum_estimate(m, alpha, beta, c.epsilon, c.depth_index, 1)?;
            out.csv("ld.csv", &deviation_table(&est.counts))?;
            let mut t = Table::new(&["eps", "lower", "lower_level", "upper", "upper_level", "boundary"]);
            let e = est.extremes;
            t.push(vec![
                fmt_f64(est.eps),
                fmt_f64(e.lower),
                e.lower_level.to_string(),
                fmt_f64(e.upper),
                e.upper_level.to_string(),
                est.boundary.to_string(),
            ]);
            out.csv("ld_summary.csv", &t)?;
            Ok(Outcome { summary: format!("rate between {} and {}", fmt_f64(e.lower), fmt_f64(e.upper)), ok: true })
        }
        Command::Aux => {
            let aux = build_aux(m, c.aux_target()?)?;
            out.csv("aux_segments.csv", &aux.to_table())?;
            let top = *breakpoints(c).last().expect("depth_index ≥ 1");
            let levels = LevelSampler::new(m.schedule(), c.depth_index)?
                .with_extra(aux.boundaries().into_iter().filter(|&n| n <= top))
                .levels();
            let mut t = Table::new(&["n", "target", "ratio", "term_min", "term_max"]);
            let mut lines = Vec::new();
            for target in [TargetMeasure::Mu, TargetMeasure::MuPrime] {
                let seq = strong_law_sequence(m, &aux, target, &levels)?;
                t.rows.extend(seq.to_table().rows);
                let e = seq.extremes().expect("non-empty levels");
                lines.push(format!("{target}: R in [{}, {}]", fmt_f64(e.lower), fmt_f64(e.upper)));
            }
            out.csv("aux_strong_law.csv", &t)?;
            Ok(Outcome { summary: format!("{}\n{}", aux.provenance_tag(), lines.join("\n")), ok: true })
        }
        Command::Sample => {
            let aux = build_aux(m, c.aux_target()?)?;
            let levels = sampled_levels(c)?;
            let depth = *levels.last().expect("non-empty levels");
            let mc = monte_carlo_local_dims(m, &aux, depth, &levels, c.n_samples, c.seed)?;
            out.csv("sample.csv", &mc.to_table())?;
            let agree = mc.rows.iter().filter(|r| r.agrees(3.0)).count();
            Ok(Outcome {
                summary: format!("{agree}/{} checkpoints within 3 standard errors of R", mc.rows.len()),
                ok: true,
            })
        }
    }
}
