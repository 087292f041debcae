//! Assembling claim checks into a single verify report.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::{
    check_bhk, check_connectivity, check_energy, check_girth, check_interval,
    check_residue_partition, check_wcu, is_ramanujan, summarize_wcu, ClaimReport, Quantity,
};
use crate::cayley::GraphSpec;
use crate::error::{Error, Result};
use crate::spectrum::{full_spectrum, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Interval,
    Wcu,
    Bhk,
    Ramanujan,
    Girth,
    Connectivity,
    Energy,
    Residue,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Interval,
        Check::Wcu,
        Check::Bhk,
        Check::Ramanujan,
        Check::Girth,
        Check::Connectivity,
        Check::Energy,
        Check::Residue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Interval => "interval",
            Check::Wcu => "wcu",
            Check::Bhk => "bhk",
            Check::Ramanujan => "ramanujan",
            Check::Girth => "girth",
            Check::Connectivity => "connectivity",
            Check::Energy => "energy",
            Check::Residue => "residue",
        }
    }

    /// Parses "all" or a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<Check>> {
        if s.trim() == "all" {
            return Ok(Check::ALL.to_vec());
        }
        let mut out: Vec<Check> = s
            .split(',')
            .map(|t| t.trim().parse())
            .collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown check '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub p: u64,
    pub e: u32,
    pub r: u32,
    pub gamma: String,
    pub n: u64,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub distinct: usize,
    pub min: Quantity,
    pub max: Quantity,
    #[serde(rename = "lambda_G")]
    pub lambda_g: Quantity,
}

impl SpectrumSummary {
    pub fn of(spectrum: &Spectrum) -> Self {
        let q = |v: f64| {
            if spectrum.exact {
                Quantity::Int(v.round() as i64)
            } else {
                Quantity::Real(v)
            }
        };
        SpectrumSummary {
            distinct: spectrum.distinct(),
            min: q(spectrum.min()),
            max: q(spectrum.max()),
            lambda_g: match spectrum.lambda_g_exact() {
                Some(l) => Quantity::Int(l),
                None => Quantity::Real(spectrum.lambda_g().0),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub graph: GraphSummary,
    pub claims: Vec<ClaimReport>,
    pub spectrum_summary: SpectrumSummary,
}

impl VerifyReport {
    /// True when no asserted claim fails.
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| !c.failed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the selected checks. Characteristic-4-only checks are skipped for
/// other rings; claims come back sorted by id.
pub fn verify(spec: &GraphSpec, checks: &[Check]) -> Result<VerifyReport> {
    let ctx = spec.ctx();
    let char4 = ctx.char_modulus() == 4;
    let spectrum = full_spectrum(spec)?;
    let mut claims = Vec::new();
    for &check in checks {
        match check {
            Check::Interval => claims.push(check_interval(spec, &spectrum)),
            Check::Wcu => claims.push(summarize_wcu(&check_wcu(ctx)?)),
            Check::Bhk if char4 => claims.push(check_bhk(ctx)?),
            Check::Residue if char4 => claims.push(check_residue_partition(ctx, spec.gamma())?),
            Check::Bhk | Check::Residue => {}
            Check::Ramanujan => {
                claims.push(is_ramanujan(&spectrum).asserted(char4 && ctx.r() >= 4))
            }
            Check::Girth => claims.push(check_girth(spec)?),
            Check::Connectivity => claims.push(check_connectivity(spec, &spectrum)?),
            Check::Energy => claims.push(check_energy(spec, &spectrum)),
        }
    }
    claims.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    Ok(VerifyReport {
        graph: GraphSummary {
            p: ctx.p(),
            e: ctx.e(),
            r: ctx.r(),
            gamma: spec.gamma().to_string(),
            n: spec.n(),
            d: spec.degree() as u64,
        },
        claims,
        spectrum_summary: SpectrumSummary::of(&spectrum),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::build_graph;
    use crate::ring::{make_ring, RingParams};
    use std::sync::Arc;

    #[test]
    fn parse_checks() {
        assert_eq!(Check::parse_list("all").unwrap().len(), 8);
        assert_eq!(
            Check::parse_list("wcu,interval,wcu").unwrap(),
            vec![Check::Interval, Check::Wcu]
        );
        assert!(Check::parse_list("bogus").is_err());
    }

    #[test]
    fn verify_gr4_16() {
        let ctx = Arc::new(make_ring(RingParams::new(2, 2, 2).unwrap(), None).unwrap());
        let spec = build_graph(ctx, None).unwrap();
        let rep = verify(&spec, &Check::ALL).unwrap();
        assert!(rep.passed(), "{}", rep.to_json());
        let ids: Vec<_> = rep.claims.iter().map(|c| c.claim_id.as_str()).collect();
        assert_eq!(
            ids,
            [
                "bhk",
                "connectivity",
                "energy",
                "girth",
                "interval",
                "ramanujan",
                "residue",
                "wcu"
            ]
        );
        assert_eq!(rep.spectrum_summary.lambda_g, Quantity::Int(2));
        assert_eq!(rep.spectrum_summary.distinct, 3);
        let json = rep.to_json();
        assert!(json.contains("\"lambda_G\": 2"));
        assert!(json.contains("\"gamma\": \"1,0\""));
    }

    #[test]
    fn odd_characteristic_skips_char4_checks() {
        let ctx = Arc::new(make_ring(RingParams::new(3, 2, 2).unwrap(), None).unwrap());
        let spec = build_graph(ctx, None).unwrap();
        let rep = verify(&spec, &Check::ALL).unwrap();
        assert!(rep
            .claims
            .iter()
            .all(|c| c.claim_id != "bhk" && c.claim_id != "residue"));
        assert!(rep.passed(), "{}", rep.to_json());
    }
}
