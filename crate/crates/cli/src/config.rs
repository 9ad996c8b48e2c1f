//! Experiment configuration: a plain-text key=value file with recurrence
//! blocks.
//!
//! ```text
//! field = Q            # or an integer d for Q(sqrt(d))
//! s_primes = 2, 3
//! n_max = 300
//! eps = 1/20
//! precision = 256
//! quad_unit = (1/2 + 1/2*sqrt(5))   # candidate unit for quadratic roots
//! grid_max = 60                      # pair-sweep grid bound
//!
//! [F]
//! 1 ; 2
//! -1 ; 1
//!
//! [G]
//! 1 ; 3
//! -1 ; 1
//!
//! [form]        # subspace: one block per form, one coefficient poly per line
//! 1
//! 0
//!
//! [point]       # subspace: one recurrence per coordinate line-group, `;`-terms
//! 1 ; 1
//! --
//! 1 ; 2
//! ```
//!
//! In the `[point]` block, coordinate recurrences are separated by `--`.

use std::path::PathBuf;

use anyhow::{bail, Context};
use num_rational::BigRational;
use num_traits::Signed;

use recurgcd_core::field::Field;
use recurgcd_core::multipoly::MultiPoly;
use recurgcd_core::recurrence::Recurrence;
use recurgcd_core::FieldElement;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub field: Field,
    pub s_primes: Vec<u64>,
    pub n_max: u64,
    pub eps: BigRational,
    pub precision: u32,
    pub grid_max: Option<u64>,
    pub quad_unit: Option<FieldElement>,
    pub rec_f: Option<Recurrence>,
    pub rec_g: Option<Recurrence>,
    pub forms: Vec<Vec<MultiPoly>>,
    pub point_coords: Vec<Recurrence>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            field: Field::Rational,
            s_primes: Vec::new(),
            n_max: 100,
            eps: BigRational::new(1.into(), 20.into()),
            precision: 256,
            grid_max: None,
            quad_unit: None,
            rec_f: None,
            rec_g: None,
            forms: Vec::new(),
            point_coords: Vec::new(),
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut section: Option<String> = None;
        let mut block: Vec<String> = Vec::new();

        let flush = |cfg: &mut ExperimentConfig,
                         section: &Option<String>,
                         block: &mut Vec<String>|
         -> anyhow::Result<()> {
            let Some(name) = section else {
                block.clear();
                return Ok(());
            };
            let body = block.join("\n");
            match name.as_str() {
                "F" => cfg.rec_f = Some(Recurrence::parse(&body).context("parsing [F]")?),
                "G" => cfg.rec_g = Some(Recurrence::parse(&body).context("parsing [G]")?),
                "form" => {
                    let coeffs = block
                        .iter()
                        .map(|line| MultiPoly::parse(line, &["n"]))
                        .collect::<recurgcd_core::Result<Vec<_>>>()
                        .context("parsing [form]")?;
                    cfg.forms.push(coeffs);
                }
                "point" => {
                    for group in body.split("--") {
                        let group = group.trim();
                        if group.is_empty() {
                            continue;
                        }
                        cfg.point_coords
                            .push(Recurrence::parse(group).context("parsing [point]")?);
                    }
                }
                other => bail!("unknown section [{other}]"),
            }
            block.clear();
            Ok(())
        };

        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim_end();
            let trimmed = line.trim();
            if trimmed.is_empty() {
                if section.is_none() {
                    continue;
                }
                // blank lines inside a block are kept only for [point] groups
                if section.as_deref() == Some("point") {
                    block.push(String::new());
                }
                continue;
            }
            if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                flush(&mut cfg, &section, &mut block)?;
                section = Some(name.trim().to_string());
                continue;
            }
            if section.is_some() && !trimmed.contains('=') {
                block.push(trimmed.to_string());
                continue;
            }
            if let Some((key, value)) = trimmed.split_once('=') {
                flush(&mut cfg, &section, &mut block)?;
                section = None;
                apply_key(&mut cfg, key.trim(), value.trim())?;
            } else {
                bail!("cannot parse line {trimmed:?}");
            }
        }
        flush(&mut cfg, &section, &mut block)?;

        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if !self.eps.is_positive() {
            bail!("eps must be positive");
        }
        if self.n_max == 0 {
            bail!("n_max must be at least 1");
        }
        let mut seen = std::collections::BTreeSet::new();
        for &p in &self.s_primes {
            if !seen.insert(p) {
                bail!("duplicate prime {p} in s_primes");
            }
            if p < 2 {
                bail!("invalid prime {p}");
            }
        }
        Ok(())
    }
}

fn apply_key(cfg: &mut ExperimentConfig, key: &str, value: &str) -> anyhow::Result<()> {
    match key {
        "field" => {
            cfg.field = if value == "Q" || value == "q" {
                Field::Rational
            } else {
                let d: i64 = value.parse().with_context(|| format!("field = {value:?}"))?;
                Field::quadratic(d)?
            };
        }
        "s_primes" => {
            cfg.s_primes = value
                .split(',')
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u64>().with_context(|| format!("prime {s:?}")))
                .collect::<anyhow::Result<_>>()?;
        }
        "n_max" => cfg.n_max = value.parse().context("n_max")?,
        "grid_max" => cfg.grid_max = Some(value.parse().context("grid_max")?),
        "eps" => cfg.eps = parse_rational(value)?,
        "precision" => cfg.precision = value.parse().context("precision")?,
        "quad_unit" => cfg.quad_unit = Some(value.parse::<FieldElement>()?),
        "out" => cfg.out = Some(PathBuf::from(value)),
        other => bail!("unknown key {other:?}"),
    }
    Ok(())
}

pub fn parse_rational(s: &str) -> anyhow::Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: num_bigint::BigInt = n.trim().parse().context("rational numerator")?;
        let d: num_bigint::BigInt = d.trim().parse().context("rational denominator")?;
        if d == 0.into() {
            bail!("zero denominator in {s:?}");
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: num_bigint::BigInt = s.parse().with_context(|| format!("rational {s:?}"))?;
        Ok(BigRational::from(n))
    }
}
