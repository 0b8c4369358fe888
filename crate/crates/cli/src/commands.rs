use std::io::Write;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use mismatch_core::linalg::{haar_unitary, ComplexMatrix, RngSeed, UnitaryNetwork};
use mismatch_core::montecarlo::{birthday_bunching, empirical_tail, estimate_difference_moments, MonteCarloReport};
use mismatch_core::probability::{output_probability, probability, ModeAssignment};
use mismatch_core::sources::{SourceModel, SourceSpec};
use mismatch_core::variance::{fig2_curve, fmt17, mismatch_budget, write_curve_csv, VarianceReport, PARTITION_WARN_N};

use crate::args::*;
use crate::output::{csv_config_line, open, to_json, Envelope};

/// What a finished command reports back to `main`.
pub struct Outcome {
    /// False when a statistical check failed.
    pub passed: bool,
}

const PASSED: Outcome = Outcome { passed: true };

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Gk(a) => gk(a),
        Command::Prob(a) => prob(a),
        Command::Variance(a) => variance(a),
        Command::Curve(a) => curve(a),
        Command::Budget(a) => budget(a),
        Command::Verify(a) => verify(a),
        Command::Birthday(a) => birthday(a),
    }
}

impl SourceArgs {
    fn model(&self) -> Result<Model> {
        let gaussian = self.g2.is_some() || self.eta.is_some() || self.gamma.is_some();
        let implied: Vec<Model> = [
            (gaussian, Model::Gaussian),
            (self.rho_file.is_some(), Model::Density),
            (self.g.is_some(), Model::Gvector),
        ]
        .into_iter()
        .filter_map(|(given, m)| given.then_some(m))
        .collect();
        match (self.model, implied.as_slice()) {
            (None, []) => Ok(Model::Ideal),
            (None, [m]) => Ok(*m),
            (Some(m), []) | (Some(m), [_]) if implied.iter().all(|&i| i == m) => Ok(m),
            _ => bail!(
                "source parameters do not match a single model: {:?} with {:?}",
                self.model,
                implied
            ),
        }
    }

    /// Copy with the model made explicit, for the echoed config.
    fn resolved(&self) -> Result<SourceArgs> {
        Ok(SourceArgs {
            model: Some(self.model()?),
            ..self.clone()
        })
    }

    fn build(&self) -> Result<SourceModel> {
        let spec = match self.model()? {
            Model::Gaussian => SourceSpec::Gaussian {
                g2: self.g2,
                eta: self.eta,
                gamma: self.gamma,
            },
            Model::Density => SourceSpec::Density {
                rho_file: self.rho_file.clone().context("--model density needs --rho-file")?,
            },
            Model::Gvector => SourceSpec::Gvector {
                g: self.g.clone().context("--model gvector needs --g")?,
            },
            Model::Ideal => SourceSpec::Ideal,
            Model::Classical => SourceSpec::Classical,
        };
        Ok(spec.build(None)?)
    }
}

fn format_or(out: &OutputArgs, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = out.format.unwrap_or(default);
    if !allowed.contains(&f) {
        bail!("this command does not write {f:?} output");
    }
    Ok(f)
}

fn write_json<C: Serialize, R: Serialize>(out: &OutputArgs, config: &C, result: &R) -> Result<()> {
    let mut w = open(out.output.as_deref())?;
    w.write_all(to_json(&Envelope { config, result })?.as_bytes())?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct GkRow {
    k: usize,
    g_k: f64,
}

fn gk(a: &GkArgs) -> Result<Outcome> {
    let g = a.source.build()?.gvector(a.n)?;
    let a = &GkArgs {
        source: a.source.resolved()?,
        ..a.clone()
    };
    let rows: Vec<GkRow> = (1..=a.n).map(|k| GkRow { k, g_k: g.get(k) }).collect();
    match format_or(&a.out, Format::Csv, &[Format::Csv, Format::Json])? {
        Format::Json => write_json(&a.out, a, &rows)?,
        Format::Csv => {
            let mut w = open(a.out.output.as_deref())?;
            csv_config_line(&mut w, a)?;
            writeln!(w, "k,g_k")?;
            for r in &rows {
                writeln!(w, "{},{}", r.k, fmt17(r.g_k))?;
            }
            w.flush()?;
        }
    }
    Ok(PASSED)
}

fn network(a: &ProbArgs) -> Result<UnitaryNetwork> {
    if let Some(path) = &a.network {
        let m = ComplexMatrix::from_json_file(path).with_context(|| format!("reading network {}", path.display()))?;
        Ok(UnitaryNetwork::new(m)?)
    } else if let Some(m) = a.haar {
        Ok(haar_unitary(m, RngSeed(a.seed))?)
    } else if a.beam_splitter {
        Ok(UnitaryNetwork::balanced_beam_splitter())
    } else {
        bail!("choose a network with --network, --haar or --beam-splitter")
    }
}

fn prob(a: &ProbArgs) -> Result<Outcome> {
    format_or(&a.out, Format::Json, &[Format::Json])?;
    let u = network(a)?;
    let assignment = match (&a.occupations, &a.outputs) {
        (Some(occ), None) => ModeAssignment::new(u.modes(), &a.inputs, occ)?,
        (None, Some(outs)) => ModeAssignment::collision_free(u.modes(), &a.inputs, outs)?,
        _ => bail!("give the output configuration with --occupations or --outputs"),
    };
    let g = a.source.build()?.gvector(assignment.n())?;
    let a = &ProbArgs {
        source: a.source.resolved()?,
        ..a.clone()
    };
    let result = match a.path {
        PathChoice::Auto => probability(&u, &assignment, &g)?,
        PathChoice::General => output_probability(&u, &assignment, &g)?,
    };
    write_json(&a.out, a, &result)?;
    Ok(PASSED)
}

fn warn_if_slow(n: usize) {
    if n > PARTITION_WARN_N {
        eprintln!("warning: the partition sum for N = {n} visits over 10^6 cycle types and may take a while");
    }
}

fn variance(a: &VarianceArgs) -> Result<Outcome> {
    format_or(&a.out, Format::Json, &[Format::Json])?;
    warn_if_slow(a.n);
    let report = VarianceReport::new(&a.source.build()?, a.n, a.epsilon, a.delta)?;
    let a = &VarianceArgs {
        source: a.source.resolved()?,
        ..a.clone()
    };
    write_json(&a.out, a, &report)?;
    Ok(PASSED)
}

fn curve(a: &CurveArgs) -> Result<Outcome> {
    let format = format_or(&a.out, Format::Csv, &[Format::Csv, Format::Json])?;
    warn_if_slow(a.n_max);
    let rows = fig2_curve(&a.g2_list, a.n_min, a.n_max)?;
    match format {
        Format::Json => write_json(&a.out, a, &rows)?,
        Format::Csv => {
            let mut w = open(a.out.output.as_deref())?;
            csv_config_line(&mut w, a)?;
            write_curve_csv(&mut w, &rows, a.approx)?;
            w.flush()?;
        }
    }
    Ok(PASSED)
}

fn budget(a: &BudgetArgs) -> Result<Outcome> {
    format_or(&a.out, Format::Json, &[Format::Json])?;
    warn_if_slow(a.n);
    let b = mismatch_budget(a.n, a.epsilon, a.delta)?;
    write_json(&a.out, a, &b)?;
    Ok(PASSED)
}

#[derive(Serialize)]
struct VerifyResult {
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
    /// One report, or two when the first failed and was rerun with the next seed.
    attempts: Vec<MonteCarloReport>,
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    format_or(&a.out, Format::Json, &[Format::Json])?;
    let g = a.source.build()?.gvector(a.n)?;
    let a = &VerifyArgs {
        source: a.source.resolved()?,
        ..a.clone()
    };
    let run = |seed: u64| match a.epsilon {
        Some(eps) => empirical_tail(a.n, a.m, &g, eps, a.samples, RngSeed(seed)),
        None => estimate_difference_moments(a.n, a.m, &g, a.samples, RngSeed(seed)),
    };
    let mut attempts = vec![run(a.seed)?];
    if !attempts[0].passed {
        attempts.push(run(a.seed.wrapping_add(1))?);
    }
    let last = attempts.last().expect("at least one attempt");
    let result = VerifyResult {
        passed: last.passed,
        note: last
            .short_circuit
            .then_some("ideal source: P_0 - P_eta vanishes identically, no sampling performed"),
        attempts,
    };
    write_json(&a.out, a, &result)?;
    Ok(Outcome { passed: result.passed })
}

fn birthday(a: &BirthdayArgs) -> Result<Outcome> {
    let format = format_or(&a.out, Format::Csv, &[Format::Csv, Format::Json])?;
    let g = a.source.build()?.gvector(a.n)?;
    let a = &BirthdayArgs {
        source: a.source.resolved()?,
        ..a.clone()
    };
    let table = birthday_bunching(a.n, &a.m_list, a.haar_samples, &g, RngSeed(a.seed))?;
    match format {
        Format::Json => write_json(&a.out, a, &table)?,
        Format::Csv => {
            let mut w = open(a.out.output.as_deref())?;
            csv_config_line(&mut w, a)?;
            table.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(Outcome { passed: table.passed })
}
