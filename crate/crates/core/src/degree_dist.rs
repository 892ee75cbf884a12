//! Multi-edge type degree distributions.
//!
//! A distribution is the polynomial pair (ν, μ): each variable class carries a
//! node fraction ν and a vector of per-edge-type degrees, each check class a
//! fraction μ and its degree vector. Fractions are exact decimals so that the
//! rate and edge-balance identities of the built-in presets hold exactly.
//!
//! Text format, one class per line:
//!
//! ```text
//! types=3 rate=0.1 threshold=2.541
//! V 0.0775 2 20 0
//! C 0.0025 11 0 0
//! ```

use std::fmt;
use std::str::FromStr;

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::{Decimal, RoundingStrategy};

use crate::{Error, Result};

/// One node class of a degree distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeClass {
    /// Node fraction (ν_{b,d} or μ_d).
    pub coefficient: Decimal,
    /// Channel exponent b. Variable classes use the single transmit channel
    /// (b = 1); check classes carry 0.
    pub channel_degree: u8,
    /// Degree per edge type.
    pub edge_degrees: Vec<u32>,
}

impl NodeClass {
    pub fn variable(coefficient: Decimal, edge_degrees: &[u32]) -> Self {
        NodeClass {
            coefficient,
            channel_degree: 1,
            edge_degrees: edge_degrees.to_vec(),
        }
    }

    pub fn check(coefficient: Decimal, edge_degrees: &[u32]) -> Self {
        NodeClass {
            coefficient,
            channel_degree: 0,
            edge_degrees: edge_degrees.to_vec(),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.edge_degrees.iter().sum()
    }
}

/// The three code rates shipped with the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Rate0_1,
    Rate0_05,
    Rate0_02,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Rate0_1, Preset::Rate0_05, Preset::Rate0_02];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Rate0_1 => "rate_0_1",
            Preset::Rate0_05 => "rate_0_05",
            Preset::Rate0_02 => "rate_0_02",
        }
    }

    pub fn distribution(self) -> DegreeDistribution {
        preset(self)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rate_0_1" | "0.1" => Ok(Preset::Rate0_1),
            "rate_0_05" | "0.05" => Ok(Preset::Rate0_05),
            "rate_0_02" | "0.02" => Ok(Preset::Rate0_02),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

/// Balance of one edge type between the variable and check sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeTypeBalance {
    pub edge_type: usize,
    /// Σ ν · d_t over variable classes.
    pub variable_side: Decimal,
    /// Σ μ · d_t over check classes.
    pub check_side: Decimal,
    pub balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceReport {
    pub per_type: Vec<EdgeTypeBalance>,
}

impl BalanceReport {
    pub fn passes(&self) -> bool {
        self.per_type.iter().all(|b| b.balanced)
    }
}

/// A MET-LDPC degree distribution (ν, μ).
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    num_edge_types: usize,
    variable_classes: Vec<NodeClass>,
    check_classes: Vec<NodeClass>,
    design_rate: Decimal,
    threshold: Option<f64>,
}

impl DegreeDistribution {
    /// Builds a structurally valid distribution. The rate and edge-balance
    /// identities are not enforced here; see [`DegreeDistribution::validate`].
    pub fn new(
        num_edge_types: usize,
        variable_classes: Vec<NodeClass>,
        check_classes: Vec<NodeClass>,
        design_rate: Decimal,
        threshold: Option<f64>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidDistribution(msg));
        if num_edge_types == 0 {
            return invalid("at least one edge type is required".into());
        }
        if variable_classes.is_empty() || check_classes.is_empty() {
            return invalid("both variable and check classes are required".into());
        }
        for (side, classes) in [("variable", &variable_classes), ("check", &check_classes)] {
            for (i, class) in classes.iter().enumerate() {
                if class.coefficient <= Decimal::ZERO {
                    return invalid(format!("{side} class {i}: coefficient must be positive"));
                }
                if class.edge_degrees.len() != num_edge_types {
                    return invalid(format!(
                        "{side} class {i}: {} edge degrees for {num_edge_types} edge types",
                        class.edge_degrees.len()
                    ));
                }
                if class.total_degree() == 0 {
                    return invalid(format!("{side} class {i}: all edge degrees are zero"));
                }
            }
        }
        if variable_classes.iter().any(|c| c.channel_degree != 1) {
            return invalid("variable classes must use the transmit channel (b = 1)".into());
        }
        if let Some(t) = threshold {
            if !(t.is_finite() && t > 0.0) {
                return invalid(format!("threshold must be positive, got {t}"));
            }
        }
        Ok(DegreeDistribution {
            num_edge_types,
            variable_classes,
            check_classes,
            design_rate,
            threshold,
        })
    }

    pub fn num_edge_types(&self) -> usize {
        self.num_edge_types
    }

    pub fn variable_classes(&self) -> &[NodeClass] {
        &self.variable_classes
    }

    pub fn check_classes(&self) -> &[NodeClass] {
        &self.check_classes
    }

    pub fn design_rate(&self) -> Decimal {
        self.design_rate
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    /// Σν − Σμ, exactly.
    pub fn rate(&self) -> Decimal {
        let nu: Decimal = self.variable_classes.iter().map(|c| c.coefficient).sum();
        let mu: Decimal = self.check_classes.iter().map(|c| c.coefficient).sum();
        nu - mu
    }

    pub fn edge_balance(&self) -> BalanceReport {
        let side = |classes: &[NodeClass], t: usize| -> Decimal {
            classes
                .iter()
                .map(|c| c.coefficient * Decimal::from(c.edge_degrees[t]))
                .sum()
        };
        let per_type = (0..self.num_edge_types)
            .map(|t| {
                let variable_side = side(&self.variable_classes, t);
                let check_side = side(&self.check_classes, t);
                EdgeTypeBalance {
                    edge_type: t,
                    variable_side,
                    check_side,
                    balanced: variable_side == check_side,
                }
            })
            .collect();
        BalanceReport { per_type }
    }

    /// Checks the full set of invariants: Σν = 1, Σμ = 1 − R and per-type
    /// edge balance.
    pub fn validate(&self) -> Result<()> {
        let nu: Decimal = self.variable_classes.iter().map(|c| c.coefficient).sum();
        if nu != Decimal::ONE {
            return Err(Error::InvalidDistribution(format!(
                "variable fractions sum to {nu}, expected 1"
            )));
        }
        let mu: Decimal = self.check_classes.iter().map(|c| c.coefficient).sum();
        if mu != Decimal::ONE - self.design_rate {
            return Err(Error::InvalidDistribution(format!(
                "check fractions sum to {mu}, expected {}",
                Decimal::ONE - self.design_rate
            )));
        }
        if let Some(b) = self.edge_balance().per_type.iter().find(|b| !b.balanced) {
            return Err(Error::InvalidDistribution(format!(
                "edge type {} unbalanced: {} vs {}",
                b.edge_type + 1,
                b.variable_side,
                b.check_side
            )));
        }
        Ok(())
    }

    /// Minimum correctable SNR, 1/σ*².
    pub fn min_correctable_snr(&self) -> Result<f64> {
        let t = self.threshold.ok_or(Error::MissingThreshold)?;
        Ok(1.0 / (t * t))
    }

    /// Integer node counts for a code of length `n`.
    pub fn realize(&self, n: usize) -> Result<Realization> {
        Realization::new(self, n)
    }

    /// Canonical text form; used as the hash input for matrix sidecars.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

/// Σν − Σμ as a float.
pub fn compute_rate(dist: &DegreeDistribution) -> f64 {
    dist.rate().to_f64().unwrap_or(f64::NAN)
}

pub fn check_edge_balance(dist: &DegreeDistribution) -> BalanceReport {
    dist.edge_balance()
}

pub fn min_correctable_snr(dist: &DegreeDistribution) -> Result<f64> {
    dist.min_correctable_snr()
}

fn dec(s: &str) -> Decimal {
    Decimal::from_str(s).expect("preset literal")
}

pub fn preset(which: Preset) -> DegreeDistribution {
    let (nu, mu, rate, threshold): (&[(&str, [u32; 3])], &[(&str, [u32; 3])], &str, f64) =
        match which {
            Preset::Rate0_1 => (
                &[("0.0775", [2, 20, 0]), ("0.0475", [3, 22, 0]), ("0.875", [0, 0, 1])],
                &[
                    ("0.0025", [11, 0, 0]),
                    ("0.0225", [12, 0, 0]),
                    ("0.03", [0, 2, 1]),
                    ("0.845", [0, 3, 1]),
                ],
                "0.1",
                2.541,
            ),
            Preset::Rate0_05 => (
                &[("0.04", [2, 34, 0]), ("0.03", [3, 34, 0]), ("0.93", [0, 0, 1])],
                &[
                    ("0.01", [8, 0, 0]),
                    ("0.01", [9, 0, 0]),
                    ("0.41", [0, 2, 1]),
                    ("0.52", [0, 3, 1]),
                ],
                "0.05",
                3.674,
            ),
            Preset::Rate0_02 => (
                &[("0.0225", [2, 57, 0]), ("0.0175", [3, 57, 0]), ("0.96", [0, 0, 1])],
                &[
                    ("0.010625", [3, 0, 0]),
                    ("0.009375", [7, 0, 0]),
                    ("0.6", [0, 2, 1]),
                    ("0.36", [0, 3, 1]),
                ],
                "0.02",
                5.91,
            ),
        };
    DegreeDistribution::new(
        3,
        nu.iter().map(|(c, d)| NodeClass::variable(dec(c), d)).collect(),
        mu.iter().map(|(c, d)| NodeClass::check(dec(c), d)).collect(),
        dec(rate),
        Some(threshold),
    )
    .expect("presets are structurally valid")
}

/// Looks a preset up by name (`rate_0_1`, `rate_0_05`, `rate_0_02`).
pub fn preset_by_name(name: &str) -> Result<DegreeDistribution> {
    Ok(preset(name.parse()?))
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "types={} rate={}",
            self.num_edge_types,
            self.design_rate.normalize()
        )?;
        if let Some(t) = self.threshold {
            write!(f, " threshold={t}")?;
        }
        writeln!(f)?;
        for (tag, classes) in [("V", &self.variable_classes), ("C", &self.check_classes)] {
            for class in classes {
                write!(f, "{tag} {}", class.coefficient.normalize())?;
                for d in &class.edge_degrees {
                    write!(f, " {d}")?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl FromStr for DegreeDistribution {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parse_err = |msg: String| Error::Parse(msg);
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| parse_err("empty input".into()))?;

        let mut types = None;
        let mut rate = None;
        let mut threshold = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| parse_err(format!("bad header field `{field}`")))?;
            match key {
                "types" => {
                    types = Some(
                        value
                            .parse::<usize>()
                            .map_err(|e| parse_err(format!("types: {e}")))?,
                    )
                }
                "rate" => {
                    rate = Some(
                        Decimal::from_str(value).map_err(|e| parse_err(format!("rate: {e}")))?,
                    )
                }
                "threshold" => {
                    threshold = Some(
                        value
                            .parse::<f64>()
                            .map_err(|e| parse_err(format!("threshold: {e}")))?,
                    )
                }
                other => return Err(parse_err(format!("unknown header key `{other}`"))),
            }
        }
        let types = types.ok_or_else(|| parse_err("missing `types=`".into()))?;
        let rate = rate.ok_or_else(|| parse_err("missing `rate=`".into()))?;

        let mut variables = Vec::new();
        let mut checks = Vec::new();
        for line in lines {
            let mut tokens = line.split_whitespace();
            let tag = tokens.next().unwrap_or_default();
            let coefficient = tokens
                .next()
                .ok_or_else(|| parse_err(format!("missing coefficient in `{line}`")))
                .and_then(|c| {
                    Decimal::from_str(c).map_err(|e| parse_err(format!("coefficient `{c}`: {e}")))
                })?;
            let degrees = tokens
                .map(|d| {
                    d.parse::<u32>()
                        .map_err(|e| parse_err(format!("degree `{d}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            match tag {
                "V" => variables.push(NodeClass::variable(coefficient, &degrees)),
                "C" => checks.push(NodeClass::check(coefficient, &degrees)),
                other => return Err(parse_err(format!("unknown line tag `{other}`"))),
            }
        }
        DegreeDistribution::new(types, variables, checks, rate, threshold)
    }
}

/// Integer node counts and per-node degree vectors for a finite code.
///
/// Counts come from largest-remainder apportionment of ν·N and μ·N (ties to
/// the lower class index). Any per-type edge-count mismatch left by rounding
/// is repaired on the check side by moving the type degree of nodes in the
/// class with the highest degree of that type up or down by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    num_edge_types: usize,
    var_class: Vec<u16>,
    var_degrees: Vec<u32>,
    check_class: Vec<u16>,
    check_degrees: Vec<u32>,
    var_counts: Vec<usize>,
    check_counts: Vec<usize>,
}

fn apportion(coefficients: &[Decimal], n: usize) -> Vec<usize> {
    let n = Decimal::from(n);
    let exact: Vec<Decimal> = coefficients.iter().map(|c| *c * n).collect();
    let total: Decimal = exact.iter().copied().sum();
    let target = total
        .round_dp_with_strategy(0, RoundingStrategy::MidpointAwayFromZero)
        .to_usize()
        .unwrap_or(0);
    let mut counts: Vec<usize> = exact
        .iter()
        .map(|x| x.floor().to_usize().unwrap_or(0))
        .collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..exact.len()).collect();
    // Descending remainder, stable on index.
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).cmp(&(exact[a] - exact[a].floor())));
    for &i in order.iter().take(target.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

impl Realization {
    fn new(dist: &DegreeDistribution, n: usize) -> Result<Self> {
        let t_count = dist.num_edge_types;
        let coeffs = |cs: &[NodeClass]| cs.iter().map(|c| c.coefficient).collect::<Vec<_>>();
        let var_counts = apportion(&coeffs(&dist.variable_classes), n);
        let check_counts = apportion(&coeffs(&dist.check_classes), n);
        for (side, counts) in [("variable", &var_counts), ("check", &check_counts)] {
            if let Some(i) = counts.iter().position(|&c| c == 0) {
                return Err(Error::Construction(format!(
                    "n = {n} leaves {side} class {i} without nodes"
                )));
            }
        }

        let expand = |classes: &[NodeClass], counts: &[usize]| {
            let total: usize = counts.iter().sum();
            let mut class_of = Vec::with_capacity(total);
            let mut degrees = Vec::with_capacity(total * t_count);
            for (k, (class, &count)) in classes.iter().zip(counts).enumerate() {
                for _ in 0..count {
                    class_of.push(k as u16);
                    degrees.extend_from_slice(&class.edge_degrees);
                }
            }
            (class_of, degrees)
        };
        let (var_class, var_degrees) = expand(&dist.variable_classes, &var_counts);
        let (check_class, mut check_degrees) = expand(&dist.check_classes, &check_counts);

        for t in 0..t_count {
            let var_sum: i64 = var_degrees.iter().skip(t).step_by(t_count).map(|&d| d as i64).sum();
            let chk_sum: i64 = check_degrees.iter().skip(t).step_by(t_count).map(|&d| d as i64).sum();
            let mut diff = var_sum - chk_sum;
            if diff == 0 {
                continue;
            }
            let target_class = dist
                .check_classes
                .iter()
                .enumerate()
                .max_by(|(ia, a), (ib, b)| {
                    a.edge_degrees[t]
                        .cmp(&b.edge_degrees[t])
                        .then(ib.cmp(ia))
                })
                .map(|(i, _)| i as u16)
                .expect("non-empty check classes");
            if dist.check_classes[target_class as usize].edge_degrees[t] == 0 {
                return Err(Error::Construction(format!(
                    "edge type {} has variable sockets but no check class carries it",
                    t + 1
                )));
            }
            let members: Vec<usize> = (0..check_class.len())
                .rev()
                .filter(|&c| check_class[c] == target_class)
                .collect();
            'repair: loop {
                let before = diff;
                for &c in &members {
                    if diff == 0 {
                        break 'repair;
                    }
                    let row = &mut check_degrees[c * t_count..(c + 1) * t_count];
                    if diff > 0 {
                        row[t] += 1;
                        diff -= 1;
                    } else if row[t] > 0 && row.iter().sum::<u32>() > 1 {
                        row[t] -= 1;
                        diff += 1;
                    }
                }
                if diff == before {
                    return Err(Error::Construction(format!(
                        "cannot balance edge type {} at n = {n}",
                        t + 1
                    )));
                }
            }
        }

        Ok(Realization {
            num_edge_types: t_count,
            var_class,
            var_degrees,
            check_class,
            check_degrees,
            var_counts,
            check_counts,
        })
    }

    pub fn num_edge_types(&self) -> usize {
        self.num_edge_types
    }

    /// Number of variable nodes (code length).
    pub fn n(&self) -> usize {
        self.var_class.len()
    }

    /// Number of check nodes (syndrome length).
    pub fn m(&self) -> usize {
        self.check_class.len()
    }

    pub fn variable_counts(&self) -> &[usize] {
        &self.var_counts
    }

    pub fn check_counts(&self) -> &[usize] {
        &self.check_counts
    }

    pub fn variable_class(&self, v: usize) -> usize {
        self.var_class[v] as usize
    }

    pub fn check_class(&self, c: usize) -> usize {
        self.check_class[c] as usize
    }

    /// Per-type degrees of variable node `v`.
    pub fn variable_degrees(&self, v: usize) -> &[u32] {
        &self.var_degrees[v * self.num_edge_types..(v + 1) * self.num_edge_types]
    }

    /// Per-type degrees of check node `c`.
    pub fn check_degrees(&self, c: usize) -> &[u32] {
        &self.check_degrees[c * self.num_edge_types..(c + 1) * self.num_edge_types]
    }

    pub fn edges_of_type(&self, t: usize) -> u64 {
        self.var_degrees
            .iter()
            .skip(t)
            .step_by(self.num_edge_types)
            .map(|&d| d as u64)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Decimal {
        Decimal::from_str(s).unwrap()
    }

    #[test]
    fn preset_rates_are_exact() {
        for (p, r) in [
            (Preset::Rate0_1, "0.1"),
            (Preset::Rate0_05, "0.05"),
            (Preset::Rate0_02, "0.02"),
        ] {
            let dist = preset(p);
            assert_eq!(dist.rate(), d(r));
            assert_eq!(dist.rate(), dist.design_rate());
            dist.validate().unwrap();
        }
        assert_eq!(compute_rate(&preset(Preset::Rate0_1)), 0.1);
        assert_eq!(compute_rate(&preset(Preset::Rate0_02)), 0.02);
    }

    #[test]
    fn rate_zero_distribution() {
        let dist = DegreeDistribution::new(
            1,
            vec![NodeClass::variable(d("0.5"), &[1])],
            vec![NodeClass::check(d("0.5"), &[1])],
            Decimal::ZERO,
            None,
        )
        .unwrap();
        assert_eq!(compute_rate(&dist), 0.0);
    }

    #[test]
    fn balance_hand_values_for_rate_0_02() {
        let report = check_edge_balance(&preset(Preset::Rate0_02));
        assert!(report.passes());
        assert_eq!(report.per_type[0].variable_side, d("0.0975"));
        assert_eq!(report.per_type[0].check_side, d("0.0975"));
        assert_eq!(report.per_type[2].variable_side, d("0.96"));
        assert_eq!(report.per_type[2].check_side, d("0.96"));
    }

    #[test]
    fn single_class_balance() {
        let dist = DegreeDistribution::new(
            1,
            vec![NodeClass::variable(Decimal::ONE, &[1])],
            vec![NodeClass::check(Decimal::ONE, &[1])],
            Decimal::ZERO,
            None,
        )
        .unwrap();
        let report = check_edge_balance(&dist);
        assert!(report.passes());
        assert_eq!(report.per_type[0].variable_side, Decimal::ONE);
    }

    #[test]
    fn unbalanced_report_fails() {
        let dist = DegreeDistribution::new(
            1,
            vec![NodeClass::variable(Decimal::ONE, &[2])],
            vec![NodeClass::check(d("0.5"), &[3])],
            d("0.5"),
            None,
        )
        .unwrap();
        assert!(!check_edge_balance(&dist).passes());
        assert!(dist.validate().is_err());
    }

    #[test]
    fn preset_contents() {
        let p1 = preset(Preset::Rate0_1);
        let nu: Vec<_> = p1
            .variable_classes()
            .iter()
            .map(|c| (c.coefficient, c.edge_degrees.clone()))
            .collect();
        assert_eq!(
            nu,
            vec![
                (d("0.0775"), vec![2, 20, 0]),
                (d("0.0475"), vec![3, 22, 0]),
                (d("0.875"), vec![0, 0, 1])
            ]
        );
        assert_eq!(preset(Preset::Rate0_05).threshold(), Some(3.674));
        let mu: Vec<_> = preset(Preset::Rate0_02)
            .check_classes()
            .iter()
            .map(|c| (c.coefficient, c.edge_degrees.clone()))
            .collect();
        assert_eq!(
            mu,
            vec![
                (d("0.010625"), vec![3, 0, 0]),
                (d("0.009375"), vec![7, 0, 0]),
                (d("0.6"), vec![0, 2, 1]),
                (d("0.36"), vec![0, 3, 1])
            ]
        );
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(
            preset_by_name("rate_0_3"),
            Err(Error::UnknownPreset(_))
        ));
        assert_eq!(preset_by_name("rate_0_05").unwrap(), preset(Preset::Rate0_05));
    }

    #[test]
    fn min_snr_values() {
        // 1/5.91^2 and 1/2.541^2 evaluated independently: 0.0286302433...,
        // 0.1548783345...
        let snr = preset(Preset::Rate0_02).min_correctable_snr().unwrap();
        assert!((snr - 0.0286302433).abs() < 1e-9, "{snr}");
        let snr = preset(Preset::Rate0_1).min_correctable_snr().unwrap();
        assert!((snr - 0.1548783345).abs() < 1e-9, "{snr}");
        let unit = DegreeDistribution::new(
            1,
            vec![NodeClass::variable(Decimal::ONE, &[1])],
            vec![NodeClass::check(Decimal::ONE, &[1])],
            Decimal::ZERO,
            Some(1.0),
        )
        .unwrap();
        assert_eq!(unit.min_correctable_snr().unwrap(), 1.0);
    }

    #[test]
    fn missing_threshold() {
        let text = "types=1 rate=0\nV 1 1\nC 1 1\n";
        let dist: DegreeDistribution = text.parse().unwrap();
        assert!(matches!(dist.min_correctable_snr(), Err(Error::MissingThreshold)));
    }

    #[test]
    fn structural_errors() {
        let bad_size = "types=3 rate=0.5\nV 1 1 1\nC 0.5 1 1 1\n";
        assert!(matches!(
            bad_size.parse::<DegreeDistribution>(),
            Err(Error::InvalidDistribution(_))
        ));
        let zero_coeff = "types=1 rate=0\nV 0 1\nC 1 1\n";
        assert!(zero_coeff.parse::<DegreeDistribution>().is_err());
        let zero_degree = "types=1 rate=0\nV 1 0\nC 1 1\n";
        assert!(zero_degree.parse::<DegreeDistribution>().is_err());
        assert!("rate=0.1\nV 1 1\n".parse::<DegreeDistribution>().is_err());
    }

    #[test]
    fn text_round_trip_presets() {
        for p in Preset::ALL {
            let dist = preset(p);
            let text = dist.to_string();
            let back: DegreeDistribution = text.parse().unwrap();
            assert_eq!(back, dist);
            assert_eq!(back.to_string(), text);
        }
        let expected = "types=3 rate=0.1 threshold=2.541\n\
                        V 0.0775 2 20 0\nV 0.0475 3 22 0\nV 0.875 0 0 1\n\
                        C 0.0025 11 0 0\nC 0.0225 12 0 0\nC 0.03 0 2 1\nC 0.845 0 3 1\n";
        assert_eq!(preset(Preset::Rate0_1).to_string(), expected);
    }

    #[test]
    fn realization_rate_0_1_at_1000() {
        let r = preset(Preset::Rate0_1).realize(1000).unwrap();
        assert_eq!(r.n(), 1000);
        assert_eq!(r.m(), 900);
        // 77.5 and 47.5 tie on remainder; the lower class index wins.
        assert_eq!(r.variable_counts(), &[78, 47, 875]);
        assert_eq!(r.check_counts(), &[3, 22, 30, 845]);
        for t in 0..3 {
            let chk: u64 = (0..r.m()).map(|c| r.check_degrees(c)[t] as u64).sum();
            assert_eq!(chk, r.edges_of_type(t));
        }
    }

    #[test]
    fn realization_counts_at_one_million() {
        let r = preset(Preset::Rate0_02).realize(1_000_000).unwrap();
        assert_eq!(r.m(), 980_000);
        assert_eq!(r.variable_counts(), &[22_500, 17_500, 960_000]);
        assert_eq!(r.check_counts(), &[10_625, 9_375, 600_000, 360_000]);
        // Exact divisibility: no repair needed.
        for c in 0..r.m() {
            let class = r.check_class(c);
            assert_eq!(
                r.check_degrees(c),
                preset(Preset::Rate0_02).check_classes()[class].edge_degrees.as_slice()
            );
        }
    }

    #[test]
    fn realization_repairs_fractional_counts() {
        // μ·N = 1062.5 and 937.5 at N = 100000 for the type-1 check classes.
        let dist = preset(Preset::Rate0_02);
        let r = dist.realize(100_000).unwrap();
        assert_eq!(r.m(), 98_000);
        assert_eq!(r.check_counts()[..2], [1063, 937]);
        for t in 0..3 {
            let chk: u64 = (0..r.m()).map(|c| r.check_degrees(c)[t] as u64).sum();
            assert_eq!(chk, r.edges_of_type(t), "type {t}");
        }
    }

    #[test]
    fn realization_too_small() {
        assert!(matches!(
            preset(Preset::Rate0_1).realize(10),
            Err(Error::Construction(_))
        ));
    }
}
