//! Batch sweeps over primes and sampled torus elements, with report writers.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::charformulas::{
    mu_hat_orbital, psi0_sign_route, CharacterEngine, Eta, OrbitalBracket, PacketSpec,
};
use crate::cyclotomic::CycNumber;
use crate::endoscopy::{
    falsify_adss152, related_elements, transfer_factor, verify_identity, Verdict,
    VerificationReport, REPORT_FIELDS,
};
use crate::error::{Error, Result};
use crate::localfield::FieldConfig;
use crate::packets::Klein4Element;
use crate::residue::CharacterLevel;
use crate::torus::{sample_regular_with, Classification, TorusElement, DEFAULT_SAMPLING_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Verify,
    Falsify,
    Properties,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketSelector {
    RegularAll,
    Regular(i64),
    NonRegular,
}

impl FromStr for PacketSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(PacketSelector::RegularAll),
            "nonregular" => Ok(PacketSelector::NonRegular),
            _ => match s.strip_prefix("regular:") {
                Some(k) => k
                    .parse()
                    .map(PacketSelector::Regular)
                    .map_err(|_| Error::InvalidConfig(format!("bad level in {s:?}"))),
                None => Err(Error::InvalidConfig(format!(
                    "packet must be regular, regular:K or nonregular, got {s:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SSelector {
    One(Klein4Element),
    All,
}

impl FromStr for SSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(SSelector::All);
        }
        s.parse()
            .map(SSelector::One)
            .map_err(|_| Error::InvalidConfig(format!("unknown s {s:?}")))
    }
}

impl SSelector {
    fn elements(self) -> Vec<Klein4Element> {
        match self {
            SSelector::One(s) => vec![s],
            SSelector::All => Klein4Element::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassSelector {
    Near,
    Far,
    Both,
}

impl FromStr for ClassSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "near" => Ok(ClassSelector::Near),
            "far" => Ok(ClassSelector::Far),
            "both" => Ok(ClassSelector::Both),
            _ => Err(Error::InvalidConfig(format!(
                "class must be near, far or both, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Jsonl,
    Csv,
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(OutputFormat::Jsonl),
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            _ => Err(Error::InvalidConfig(format!(
                "format must be jsonl, csv or table, got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub mode: Mode,
    pub primes: Vec<u64>,
    pub precision: u32,
    /// Samples drawn per class and prime.
    pub samples: usize,
    /// Inclusive range of `v(b)` for near samples; cycled through in order.
    pub near_valuations: (u32, u32),
    pub packet: PacketSelector,
    pub s: SSelector,
    pub class: ClassSelector,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Verify,
            primes: vec![3, 5, 7, 11, 13],
            precision: 8,
            samples: 20,
            near_valuations: (1, 3),
            packet: PacketSelector::NonRegular,
            s: SSelector::One(Klein4Element::S1),
            class: ClassSelector::Both,
            seed: 0,
            format: OutputFormat::Jsonl,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::InvalidConfig("no primes given".into()));
        }
        for &p in &self.primes {
            FieldConfig::new(p, self.precision)?;
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        let (lo, hi) = self.near_valuations;
        let max = self.precision.saturating_sub(3);
        if lo < 1 || lo > hi || hi > max {
            return Err(Error::InvalidConfig(format!(
                "near valuations {lo}..={hi} must lie in 1..={max}"
            )));
        }
        if let PacketSelector::Regular(k) = self.packet {
            for &p in &self.primes {
                CharacterLevel::regular(k, &FieldConfig::new(p, self.precision)?)
                    .map_err(|e| Error::InvalidConfig(format!("p = {p}: {e}")))?;
            }
        }
        Ok(())
    }

    fn classes(&self) -> Vec<Classification> {
        let classes = match self.mode {
            // The published closed form only speaks about the near range.
            Mode::Falsify => ClassSelector::Near,
            _ => self.class,
        };
        match classes {
            ClassSelector::Near => vec![Classification::Near],
            ClassSelector::Far => vec![Classification::Far],
            ClassSelector::Both => vec![Classification::Far, Classification::Near],
        }
    }

    fn packets(&self, cfg: &FieldConfig) -> Result<Vec<PacketSpec>> {
        Ok(match self.packet {
            PacketSelector::RegularAll => CharacterLevel::all_regular(cfg)
                .into_iter()
                .map(PacketSpec::Regular)
                .collect(),
            PacketSelector::Regular(k) => vec![PacketSpec::regular(k, cfg)?],
            PacketSelector::NonRegular => vec![PacketSpec::NonRegular],
        })
    }
}

/// Seed of the generator used for prime `p`: a fixed mix of the sweep seed and `p`,
/// so that adding a prime leaves the samples of the others unchanged.
pub fn prime_seed(seed: u64, p: u64) -> u64 {
    seed ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// The elements checked at one prime, far samples first.
pub fn sample_elements(config: &SweepConfig, cfg: &FieldConfig) -> Result<Vec<TorusElement>> {
    let mut rng = ChaCha8Rng::seed_from_u64(prime_seed(config.seed, cfg.p()));
    let (lo, hi) = config.near_valuations;
    let span = hi - lo + 1;
    let mut out = Vec::new();
    for class in config.classes() {
        for i in 0..config.samples {
            let v = match class {
                Classification::Far => 0,
                _ => lo + (i as u32) % span,
            };
            out.push(sample_regular_with(
                cfg,
                class,
                v,
                &mut rng,
                DEFAULT_SAMPLING_BUDGET,
            )?);
        }
    }
    Ok(out)
}

/// Reports of a sweep with the verdict tallies.
#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub reports: Vec<VerificationReport>,
    pub expected: usize,
    pub unexpected: usize,
    pub skipped: usize,
}

impl SweepOutcome {
    fn push(&mut self, report: VerificationReport, wanted: &Verdict) {
        if report.verdict.is_skipped() {
            self.skipped += 1;
        } else if &report.verdict == wanted {
            self.expected += 1;
        } else {
            self.unexpected += 1;
        }
        self.reports.push(report);
    }

    pub fn exit_code(&self) -> i32 {
        if self.unexpected == 0 {
            0
        } else {
            1
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "{} reports: {} as expected, {} unexpected, {} skipped",
            self.reports.len(),
            self.expected,
            self.unexpected,
            self.skipped
        )
    }
}

/// Runs the sweep. Reports come out ordered by prime, then level, then `s`, then element.
pub fn run(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let mut outcome = SweepOutcome::default();
    for &p in &config.primes {
        let cfg = FieldConfig::new(p, config.precision)?;
        let engine = CharacterEngine::new(cfg);
        let elements = sample_elements(config, &cfg)?;
        match config.mode {
            Mode::Verify => {
                for packet in config.packets(&cfg)? {
                    for s in config.s.elements() {
                        for gamma in &elements {
                            let report = verify_identity(&engine, packet, s, gamma);
                            outcome.push(report, &Verdict::Equal);
                        }
                    }
                }
            }
            Mode::Falsify => {
                for gamma in &elements {
                    let (first, second) = falsify_adss152(&engine, gamma)?;
                    outcome.push(first, &Verdict::Unequal);
                    outcome.push(second, &Verdict::Unequal);
                }
            }
            Mode::Properties => {
                for gamma in &elements {
                    for report in property_reports(&engine, gamma) {
                        outcome.push(report, &Verdict::Equal);
                    }
                }
            }
        }
    }
    Ok(outcome)
}

fn property(
    engine: &CharacterEngine,
    name: &str,
    gamma: &TorusElement,
    sides: Result<(CycNumber, CycNumber)>,
) -> VerificationReport {
    VerificationReport::new(engine.config(), "property", 0, name, gamma).settle(sides)
}

fn ints(lhs: Result<i64>, rhs: Result<i64>) -> Result<(CycNumber, CycNumber)> {
    Ok((CycNumber::from_integer(lhs?), CycNumber::from_integer(rhs?)))
}

/// Structural identities at `gamma`, one report each with the property name in `s`.
pub fn property_reports(engine: &CharacterEngine, gamma: &TorusElement) -> Vec<VerificationReport> {
    let cfg = engine.config();
    let f = gamma.f_direct();
    let mut out = vec![
        property(
            engine,
            "f_via_disc",
            gamma,
            ints(f.clone(), gamma.f_via_disc()),
        ),
        property(
            engine,
            "discriminant_norm",
            gamma,
            ints(
                gamma.weyl_half_norm_exponent().map(i64::from),
                gamma.valuation_b().map(i64::from),
            ),
        ),
        property(
            engine,
            "f_galois_conj",
            gamma,
            ints(gamma.galois_conj().f_direct(), f.clone()),
        ),
        property(
            engine,
            "f_g_conj",
            gamma,
            ints(gamma.g_conjugate().f_direct(), f.clone()),
        ),
    ];
    for (i, (_, delta)) in related_elements(gamma).into_iter().enumerate() {
        let name = ["transfer_factor", "transfer_factor_inverse"][i];
        out.push(property(
            engine,
            name,
            gamma,
            ints(transfer_factor(&delta, gamma), f.clone().map(|f| -f)),
        ));
    }
    match gamma.classify() {
        Ok(Classification::Far) => {
            out.push(property(
                engine,
                "f_far_is_one",
                gamma,
                ints(f.clone(), Ok(1)),
            ));
            let level_route = engine.torus_character(CharacterLevel::quadratic(cfg), gamma);
            let sides = psi0_sign_route(gamma)
                .and_then(|sign| Ok((CycNumber::from_integer(sign as i64), level_route?)));
            out.push(property(engine, "psi0_dual_route", gamma, sides));
        }
        Ok(Classification::Near) => {
            let bracket = OrbitalBracket::exceptional();
            for (eta, name, sign) in [
                (Eta::One, "mu_hat_eta_one", -1),
                (Eta::Uniformizer, "mu_hat_eta_varpi", 1),
            ] {
                let sides = gamma.cayley_inverse().and_then(|y| {
                    Ok((
                        mu_hat_orbital(&y, bracket, eta)?,
                        CycNumber::from_integer(-1 + sign * f.clone()?),
                    ))
                });
                out.push(property(engine, name, gamma, sides));
            }
            let lie = gamma.cayley_inverse().and_then(|y| {
                let v = y.weyl_dg().valuation().map_err(|_| {
                    Error::PrecisionExhausted("Lie discriminant is zero at precision".into())
                })?;
                Ok(i64::from(v))
            });
            let group =
                gamma.weyl_dg().valuation().map(i64::from).map_err(|_| {
                    Error::PrecisionExhausted("discriminant is zero at precision".into())
                });
            out.push(property(
                engine,
                "lie_group_discriminant",
                gamma,
                ints(lie, group),
            ));
        }
        _ => {}
    }
    out.push(property(
        engine,
        "kottwitz_stable",
        gamma,
        engine.kottwitz_stable(gamma),
    ));
    out
}

fn opt_text<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn row(r: &VerificationReport) -> Vec<String> {
    vec![
        r.p.to_string(),
        r.n.to_string(),
        r.eps.to_string(),
        r.packet.clone(),
        r.level.to_string(),
        r.s.clone(),
        r.a.to_string(),
        r.b.to_string(),
        opt_text(&r.valuation_b),
        opt_text(&r.classification),
        opt_text(&r.lhs),
        opt_text(&r.rhs),
        r.verdict.to_string(),
    ]
}

/// Writes the reports in the requested format.
pub fn write_reports<W: Write>(
    out: &mut W,
    reports: &[VerificationReport],
    format: OutputFormat,
) -> io::Result<()> {
    match format {
        OutputFormat::Jsonl => {
            for r in reports {
                writeln!(out, "{}", r.to_json_line())?;
            }
        }
        OutputFormat::Csv => {
            writeln!(out, "{}", REPORT_FIELDS.join(","))?;
            for r in reports {
                let fields: Vec<String> = row(r).iter().map(|f| csv_field(f)).collect();
                writeln!(out, "{}", fields.join(","))?;
            }
        }
        OutputFormat::Table => out.write_all(render_table(reports).as_bytes())?,
    }
    Ok(())
}

/// Column-aligned text rendering of the reports.
pub fn render_table(reports: &[VerificationReport]) -> String {
    let header: Vec<String> = REPORT_FIELDS.iter().map(|s| s.to_string()).collect();
    let rows: Vec<Vec<String>> = reports.iter().map(row).collect();
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let mut text = String::new();
    for r in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(text, "{}", cells.join("  ").trim_end());
    }
    text
}

/// Character values of both packets at the sampled elements of one prime.
pub fn character_value_table(config: &SweepConfig, p: u64) -> Result<String> {
    let cfg = FieldConfig::new(p, config.precision)?;
    let engine = CharacterEngine::new(cfg);
    let header = [
        "a",
        "b",
        "class",
        "v(b)",
        "f",
        "psi0",
        "Theta1+Theta2",
        "Theta3+Theta4",
        "Theta5",
        "Delta",
    ];
    let mut rows = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    for gamma in sample_elements(config, &cfg)? {
        let (s12, s34) = match gamma.classify()? {
            Classification::Far => (
                (&engine.theta_nonregular_far(1, &gamma)?
                    + &engine.theta_nonregular_far(2, &gamma)?),
                (&engine.theta_nonregular_far(3, &gamma)?
                    + &engine.theta_nonregular_far(4, &gamma)?),
            ),
            _ => engine.theta_nonregular_near_sums(&gamma)?,
        };
        rows.push(vec![
            gamma.a().centered().to_string(),
            gamma.b().centered().to_string(),
            gamma.classify()?.to_string(),
            gamma.valuation_b()?.to_string(),
            gamma.f_direct()?.to_string(),
            engine.psi0(&gamma)?.to_string(),
            s12.to_string(),
            s34.to_string(),
            engine.theta5(&gamma)?.to_string(),
            transfer_factor(&gamma, &gamma)?.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0))
        .collect();
    let mut text = format!(
        "p = {p}, N = {}, eps = {}, psi0 = level {}\n",
        cfg.precision(),
        cfg.eps(),
        CharacterLevel::quadratic(&cfg).k()
    );
    for r in &rows {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect();
        let _ = writeln!(text, "{}", cells.join("  "));
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: Mode) -> SweepConfig {
        SweepConfig {
            mode,
            primes: vec![3, 5],
            samples: 6,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn parse_selectors() {
        assert_eq!("regular".parse(), Ok(PacketSelector::RegularAll));
        assert_eq!("regular:2".parse(), Ok(PacketSelector::Regular(2)));
        assert_eq!("nonregular".parse(), Ok(PacketSelector::NonRegular));
        assert!("regular:x".parse::<PacketSelector>().is_err());
        assert_eq!("all".parse(), Ok(SSelector::All));
        assert_eq!("s2".parse(), Ok(SSelector::One(Klein4Element::S2)));
        assert!("both".parse::<ClassSelector>().is_ok());
        assert!("xml".parse::<OutputFormat>().is_err());
    }

    #[test]
    fn validation() {
        let mut c = small(Mode::Verify);
        assert!(c.validate().is_ok());
        c.primes = vec![4];
        assert!(c.validate().is_err());
        let mut c = small(Mode::Verify);
        c.near_valuations = (1, 6);
        assert!(c.validate().is_err());
        let mut c = small(Mode::Verify);
        c.samples = 0;
        assert!(c.validate().is_err());
        let mut c = small(Mode::Verify);
        c.packet = PacketSelector::Regular(2);
        // k = 2 is the quadratic level for p = 3.
        assert!(c.validate().is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_shaped() {
        let c = small(Mode::Verify);
        let cfg = FieldConfig::new(5, 8).unwrap();
        let a = sample_elements(&c, &cfg).unwrap();
        assert_eq!(a, sample_elements(&c, &cfg).unwrap());
        assert_eq!(a.len(), 12);
        let classes: Vec<_> = a.iter().map(|g| g.classify().unwrap()).collect();
        assert!(classes[..6].iter().all(|&c| c == Classification::Far));
        assert!(classes[6..].iter().all(|&c| c == Classification::Near));
        let vs: Vec<u32> = a[6..].iter().map(|g| g.valuation_b().unwrap()).collect();
        assert_eq!(vs, vec![1, 2, 3, 1, 2, 3]);
    }

    #[test]
    fn modes() {
        let out = run(&small(Mode::Verify)).unwrap();
        assert_eq!((out.unexpected, out.skipped, out.exit_code()), (0, 0, 0));
        assert_eq!(out.reports.len(), 24);
        let out = run(&small(Mode::Falsify)).unwrap();
        assert_eq!(out.expected, out.reports.len());
        assert_eq!(out.reports.len(), 24);
        let out = run(&small(Mode::Properties)).unwrap();
        assert_eq!((out.unexpected, out.skipped), (0, 0));
        let mut c = small(Mode::Verify);
        c.s = SSelector::One(Klein4Element::S2);
        c.class = ClassSelector::Near;
        let out = run(&c).unwrap();
        assert_eq!(out.skipped, out.reports.len());
        assert_eq!(out.exit_code(), 0);
    }

    #[test]
    fn writers() {
        let out = run(&small(Mode::Falsify)).unwrap();
        let mut csv = Vec::new();
        write_reports(&mut csv, &out.reports, OutputFormat::Csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("p,N,eps,packet,level,s,a,b,valuation_b"));
        assert_eq!(csv.lines().count(), out.reports.len() + 1);
        let table = render_table(&out.reports);
        assert_eq!(table.lines().count(), out.reports.len() + 1);
        let text = character_value_table(&small(Mode::Verify), 3).unwrap();
        assert!(text.starts_with("p = 3"));
    }
}
