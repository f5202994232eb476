use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use rayon::prelude::*;

use tripartite_core::convexroof::{default_members, minimize_tangle_with, SearchOptions, Support};
use tripartite_core::fidelity::{
    bob_conditional_average_closed, bob_fidelities, charlie_average, charlie_average_closed,
};
use tripartite_core::tangles::{
    pi_tangle, pi_tangle_closed, three_tangle_closed, three_tangle_upper_bound, upper_bound_decomposition,
};
use tripartite_core::{channel_state, BlochAngles, ChannelParams, NoiseKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    CharlieFidelity,
    BobFidelity,
    PiTangle,
    ThreeTangle,
    ThreeTangleUb,
    ConvexRoof,
}

/// How `ν` is chosen for the fidelity quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NuGrid {
    Fixed(f64),
    /// `count` evenly spaced values on `[0, π/2]`.
    Span(usize),
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub quantity: Quantity,
    pub kind: NoiseKind,
    pub kt_start: f64,
    pub kt_stop: f64,
    pub kt_count: usize,
    pub nu: Option<NuGrid>,
    pub outcome: Option<usize>,
    pub members: Option<usize>,
    pub restarts: usize,
    pub warm_start: bool,
    pub out: PathBuf,
    pub seed: u64,
}

/// A configuration the sweep refuses to run; reported as a usage error.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

fn kind_list(kinds: &[NoiseKind]) -> String {
    kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kt_count < 2 {
            return usage(format!("--kt-count must be at least 2, got {}", self.kt_count));
        }
        if !(self.kt_start.is_finite() && self.kt_stop.is_finite()) || self.kt_start < 0.0 {
            return usage("κt values must be finite and nonnegative");
        }
        if self.kt_start > self.kt_stop {
            return usage(format!("--kt-start {} exceeds --kt-stop {}", self.kt_start, self.kt_stop));
        }
        let allowed: &[NoiseKind] = match self.quantity {
            Quantity::ThreeTangle => &[NoiseKind::None, NoiseKind::X, NoiseKind::Z],
            Quantity::ThreeTangleUb => &[NoiseKind::Y, NoiseKind::Isotropic],
            _ => &NoiseKind::ALL,
        };
        if !allowed.contains(&self.kind) {
            return usage(format!(
                "{} is not available for {} noise; valid kinds are {}",
                self.quantity.to_possible_value().expect("no skipped variants").get_name(),
                self.kind,
                kind_list(allowed)
            ));
        }
        let uses_nu = matches!(self.quantity, Quantity::CharlieFidelity | Quantity::BobFidelity);
        match self.nu {
            Some(_) if !uses_nu => return usage("--nu/--nu-count only apply to fidelity sweeps"),
            Some(NuGrid::Span(n)) if n < 2 => return usage("--nu-count must be at least 2"),
            Some(NuGrid::Fixed(v)) if !v.is_finite() => return usage("--nu must be finite"),
            _ => {}
        }
        if let Some(m) = self.outcome {
            if self.quantity != Quantity::BobFidelity {
                return usage("--outcome only applies to bob_fidelity");
            }
            if !(1..=4).contains(&m) {
                return usage(format!("--outcome must be in 1..=4, got {m}"));
            }
        }
        if self.restarts == 0 {
            return usage("--restarts must be at least 1");
        }
        Ok(())
    }

    pub fn kt_grid(&self) -> Vec<f64> {
        let n = self.kt_count;
        let span = self.kt_stop - self.kt_start;
        (0..n)
            .map(|i| if i + 1 == n { self.kt_stop } else { self.kt_start + span * i as f64 / (n - 1) as f64 })
            .collect()
    }

    fn nu_grid(&self) -> Vec<f64> {
        match self.nu.unwrap_or(NuGrid::Fixed(FRAC_PI_4)) {
            NuGrid::Fixed(v) => vec![v],
            NuGrid::Span(n) => {
                (0..n).map(|i| if i + 1 == n { FRAC_PI_2 } else { FRAC_PI_2 * i as f64 / (n - 1) as f64 }).collect()
            }
        }
    }
}

/// One CSV row before formatting.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub kappa_t: f64,
    pub nu: Option<f64>,
    pub value: f64,
    pub closed: Option<f64>,
}

fn method(quantity: Quantity) -> &'static str {
    match quantity {
        Quantity::CharlieFidelity | Quantity::BobFidelity | Quantity::PiTangle => "numeric",
        Quantity::ThreeTangle | Quantity::ThreeTangleUb => "closed",
        Quantity::ConvexRoof => "optimizer",
    }
}

/// Header of the comparison column, if the quantity has one.
fn closed_header(config: &SweepConfig) -> Option<&'static str> {
    match config.quantity {
        Quantity::CharlieFidelity | Quantity::BobFidelity | Quantity::PiTangle => Some("closed"),
        Quantity::ThreeTangle | Quantity::ThreeTangleUb => None,
        Quantity::ConvexRoof => match config.kind {
            NoiseKind::Y | NoiseKind::Isotropic => Some("closed_upper_bound"),
            _ => Some("closed"),
        },
    }
}

fn evaluate(config: &SweepConfig, kappa_t: f64, nu: Option<f64>) -> Result<Row> {
    let channel = ChannelParams::new(config.kind, kappa_t)?;
    let (value, closed) = match config.quantity {
        Quantity::CharlieFidelity => {
            let nu = nu.expect("fidelity rows carry ν");
            (charlie_average(channel, nu), Some(charlie_average_closed(channel, nu)))
        }
        Quantity::BobFidelity => {
            let nu = nu.expect("fidelity rows carry ν");
            // the sphere average does not depend on the reference input
            let input = BlochAngles::new(0.0, 0.0)?;
            let report = bob_fidelities(input, channel, nu, config.outcome)?;
            let closed = match config.outcome {
                Some(m) => bob_conditional_average_closed(channel, nu, m)?,
                None => 0.5,
            };
            (report.average, Some(closed))
        }
        Quantity::PiTangle => (pi_tangle(&channel_state(channel))?.pi_tangle, Some(pi_tangle_closed(channel))),
        Quantity::ThreeTangle => (three_tangle_closed(config.kind, kappa_t)?, None),
        Quantity::ThreeTangleUb => (three_tangle_upper_bound(config.kind, kappa_t)?, None),
        Quantity::ConvexRoof => {
            let rho = channel_state(channel);
            let members = match config.members {
                Some(m) => m,
                None => default_members(Support::of(&rho)?.rank()),
            };
            let opts = SearchOptions::new(members, config.restarts, config.seed);
            let (start, closed) = match config.kind {
                NoiseKind::Y | NoiseKind::Isotropic => (
                    config.warm_start.then(|| upper_bound_decomposition(config.kind, kappa_t)).transpose()?,
                    three_tangle_upper_bound(config.kind, kappa_t)?,
                ),
                _ => (None, three_tangle_closed(config.kind, kappa_t)?),
            };
            (minimize_tangle_with(&rho, &opts, start.as_ref())?.value, Some(closed))
        }
    };
    Ok(Row { kappa_t, nu, value, closed })
}

/// Evaluates every grid point, κt-major, in parallel but returned in grid order.
pub fn rows(config: &SweepConfig) -> Result<Vec<Row>> {
    config.validate()?;
    let uses_nu = matches!(config.quantity, Quantity::CharlieFidelity | Quantity::BobFidelity);
    let nus: Vec<Option<f64>> = if uses_nu { config.nu_grid().into_iter().map(Some).collect() } else { vec![None] };
    let points: Vec<(f64, Option<f64>)> =
        config.kt_grid().into_iter().flat_map(|kt| nus.iter().map(move |&nu| (kt, nu))).collect();
    points.par_iter().map(|&(kt, nu)| evaluate(config, kt, nu)).collect()
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        let fixed = format!("{v:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        let mantissa = if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

pub fn write_csv(config: &SweepConfig, rows: &[Row]) -> Result<()> {
    let mut writer = csv::Writer::from_path(&config.out)
        .with_context(|| format!("cannot open {} for writing", config.out.display()))?;
    let closed = closed_header(config);
    let mut header = vec!["kind", "kappa_t"];
    if rows.first().is_some_and(|r| r.nu.is_some()) {
        header.push("nu");
    }
    header.extend(["value", "method"]);
    header.extend(closed);
    writer.write_record(&header)?;
    for row in rows {
        let mut record = vec![config.kind.name().to_string(), format_number(row.kappa_t)];
        record.extend(row.nu.map(format_number));
        record.push(format_number(row.value));
        record.push(method(config.quantity).to_string());
        if closed.is_some() {
            match row.closed {
                Some(c) => record.push(format_number(c)),
                None => bail!("missing comparison value at κt = {}", row.kappa_t),
            }
        }
        writer.write_record(&record)?;
    }
    writer.flush().with_context(|| format!("cannot write {}", config.out.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(quantity: Quantity, kind: NoiseKind) -> SweepConfig {
        SweepConfig {
            quantity,
            kind,
            kt_start: 0.0,
            kt_stop: 1.0,
            kt_count: 5,
            nu: None,
            outcome: None,
            members: None,
            restarts: 20,
            warm_start: false,
            out: PathBuf::from("unused.csv"),
            seed: 0,
        }
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(format_number(123456.0), "123456");
        assert_eq!(format_number(1.5e-7), "1.5e-07");
        assert_eq!(format_number(2.0f64.sqrt() * 1e13), "1.41421356237e+13");
        assert_eq!(format_number(0.000123), "0.000123");
        assert_eq!(format_number(2.92256779184e-5), "2.92256779184e-05");
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let mut c = config(Quantity::PiTangle, NoiseKind::Y);
        c.kt_start = 0.1;
        c.kt_stop = 0.7;
        c.kt_count = 7;
        let g = c.kt_grid();
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[6], 0.7);
    }

    #[test]
    fn validation() {
        assert!(config(Quantity::PiTangle, NoiseKind::Y).validate().is_ok());
        let mut c = config(Quantity::PiTangle, NoiseKind::Y);
        c.kt_count = 1;
        assert!(c.validate().is_err());
        let mut c = config(Quantity::PiTangle, NoiseKind::Y);
        c.kt_start = 2.0;
        assert!(c.validate().is_err());
        let err = config(Quantity::ThreeTangle, NoiseKind::Y).validate().unwrap_err().to_string();
        assert!(err.contains("none, x, z"), "{err}");
        assert!(config(Quantity::ThreeTangleUb, NoiseKind::Z).validate().is_err());
        let mut c = config(Quantity::PiTangle, NoiseKind::Y);
        c.nu = Some(NuGrid::Fixed(0.3));
        assert!(c.validate().is_err());
        let mut c = config(Quantity::BobFidelity, NoiseKind::Y);
        c.outcome = Some(5);
        assert!(c.validate().is_err());
    }

    #[test]
    fn closed_rows() {
        let c = config(Quantity::ThreeTangle, NoiseKind::Z);
        let rows = rows(&c).unwrap();
        assert_eq!(rows.len(), 5);
        for r in rows {
            assert!((r.value - (-12.0 * r.kappa_t).exp()).abs() < 1e-12);
            assert!(r.nu.is_none() && r.closed.is_none());
        }
    }

    #[test]
    fn nu_span_multiplies_rows() {
        let mut c = config(Quantity::CharlieFidelity, NoiseKind::None);
        c.kt_count = 2;
        c.nu = Some(NuGrid::Span(3));
        let rows = rows(&c).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[2].nu, Some(FRAC_PI_2));
        for r in rows {
            assert!((r.value - r.closed.unwrap()).abs() < 1e-7);
        }
    }
}
