//! Eigenvalues of Cayley graphs over GR⁺ via additive characters.
//!
//! Every γ ∈ GR gives the character ψ_γ(x) = ω^(T(γx)) with ω a primitive
//! p^e-th root of unity, and the eigenvalue Σ_(s∈S) ψ_γ(s). The exact object
//! is the histogram [`TraceCounts`] of T(γs) over S; in characteristic 4 the
//! eigenvalue is read off it in integers, otherwise it is evaluated in f64
//! with the imaginary part checked to vanish.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::{GraphSpec, VertexId};
use crate::error::{Error, Result};
use crate::gaussian::GaussianInt;
use crate::ring::{RingContext, RingElement};

/// Relative tolerance for the vanishing imaginary part of an eigenvalue.
pub const SELF_CHECK_TOL: f64 = 1e-9;
/// Absolute tolerance for comparing against the dense oracle and for merging.
pub const ORACLE_TOL: f64 = 1e-6;
/// Largest graph the dense oracle accepts.
pub const ORACLE_MAX_N: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCounts {
    pub gamma_index: VertexId,
    /// counts[j] = #{s ∈ S : T(γs) = j}
    pub counts: Vec<u64>,
}

impl TraceCounts {
    pub fn degree(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// counts[j] = counts[q − j] for all j.
    pub fn is_symmetric(&self) -> bool {
        let q = self.counts.len();
        (1..q).all(|j| self.counts[j] == self.counts[q - j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Eigenvalue {
    Exact(i64),
    Numeric(f64),
}

impl Eigenvalue {
    pub fn as_f64(self) -> f64 {
        match self {
            Eigenvalue::Exact(v) => v as f64,
            Eigenvalue::Numeric(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub value: Eigenvalue,
    pub multiplicity: u64,
}

/// Eigenvalue multiset, sorted by descending value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    pub exact: bool,
    pub n: u64,
    pub d: u64,
}

impl Spectrum {
    pub fn from_exact(values: impl IntoIterator<Item = i64>, n: u64, d: u64) -> Self {
        let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
        for v in values {
            *counts.entry(v).or_default() += 1;
        }
        let entries = counts
            .into_iter()
            .rev()
            .map(|(v, m)| SpectrumEntry {
                value: Eigenvalue::Exact(v),
                multiplicity: m,
            })
            .collect();
        Spectrum {
            entries,
            exact: true,
            n,
            d,
        }
    }

    /// Groups values lying within `tol` of the largest member of their group;
    /// each group is represented by its mean.
    pub fn from_numeric(mut values: Vec<f64>, n: u64, d: u64, tol: f64) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let mut entries: Vec<SpectrumEntry> = Vec::new();
        let mut i = 0;
        while i < values.len() {
            let head = values[i];
            let mut j = i;
            let mut sum = 0.0;
            while j < values.len() && head - values[j] <= tol {
                sum += values[j];
                j += 1;
            }
            let m = (j - i) as u64;
            entries.push(SpectrumEntry {
                value: Eigenvalue::Numeric(sum / m as f64),
                multiplicity: m,
            });
            i = j;
        }
        entries.sort_by(|a, b| b.value.as_f64().total_cmp(&a.value.as_f64()));
        Spectrum {
            entries,
            exact: false,
            n,
            d,
        }
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn max(&self) -> f64 {
        self.entries.first().map_or(f64::NAN, |e| e.value.as_f64())
    }

    pub fn min(&self) -> f64 {
        self.entries.last().map_or(f64::NAN, |e| e.value.as_f64())
    }

    /// All eigenvalues with multiplicity, descending.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value.as_f64(), e.multiplicity as usize))
            .collect()
    }

    /// Multiplicity of a value, matched exactly on the exact path and within
    /// `ORACLE_TOL` otherwise.
    pub fn multiplicity_of(&self, value: i64) -> u64 {
        self.entries
            .iter()
            .filter(|e| match e.value {
                Eigenvalue::Exact(v) => v == value,
                Eigenvalue::Numeric(v) => (v - value as f64).abs() <= ORACLE_TOL,
            })
            .map(|e| e.multiplicity)
            .sum()
    }

    fn is_degree(&self, v: Eigenvalue, signed: bool) -> bool {
        let d = self.d as i64;
        match v {
            Eigenvalue::Exact(x) => x == d || (signed && x == -d),
            Eigenvalue::Numeric(x) => {
                (x - d as f64).abs() <= ORACLE_TOL || (signed && (x + d as f64).abs() <= ORACLE_TOL)
            }
        }
    }

    /// λ(G): the largest |λ| over eigenvalues other than ±d, with the value
    /// attaining it; 0 when there are none.
    pub fn lambda_g(&self) -> (f64, Option<Eigenvalue>) {
        self.entries
            .iter()
            .filter(|e| !self.is_degree(e.value, true))
            .map(|e| (e.value.as_f64().abs(), Some(e.value)))
            .fold((0.0, None), |acc, x| if x.0 > acc.0 { x } else { acc })
    }

    /// Like [`lambda_g`](Self::lambda_g) but exact; `None` on the numeric path.
    pub fn lambda_g_exact(&self) -> Option<i64> {
        if !self.exact {
            return None;
        }
        Some(
            self.entries
                .iter()
                .filter(|e| !self.is_degree(e.value, true))
                .map(|e| match e.value {
                    Eigenvalue::Exact(v) => v.abs(),
                    Eigenvalue::Numeric(_) => unreachable!(),
                })
                .max()
                .unwrap_or(0),
        )
    }

    /// Eigenvalues with one occurrence of the degree (the principal character) removed.
    pub fn non_principal(&self) -> Vec<(Eigenvalue, u64)> {
        let mut removed = false;
        self.entries
            .iter()
            .filter_map(|e| {
                if !removed && self.is_degree(e.value, false) {
                    removed = true;
                    (e.multiplicity > 1).then_some((e.value, e.multiplicity - 1))
                } else {
                    Some((e.value, e.multiplicity))
                }
            })
            .collect()
    }

    /// (Σ λ·mult, Σ λ²·mult) in exact integers.
    pub fn exact_moments(&self) -> Option<(i128, i128)> {
        if !self.exact {
            return None;
        }
        let mut s1 = 0i128;
        let mut s2 = 0i128;
        for e in &self.entries {
            if let Eigenvalue::Exact(v) = e.value {
                s1 += i128::from(v) * i128::from(e.multiplicity);
                s2 += i128::from(v) * i128::from(v) * i128::from(e.multiplicity);
            }
        }
        Some((s1, s2))
    }

    pub fn moments(&self) -> (f64, f64) {
        self.entries.iter().fold((0.0, 0.0), |(s1, s2), e| {
            let v = e.value.as_f64();
            let m = e.multiplicity as f64;
            (s1 + v * m, s2 + v * v * m)
        })
    }

    /// CSV with header `eigenvalue,multiplicity`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eigenvalue,multiplicity\n");
        for e in &self.entries {
            let v = match e.value {
                Eigenvalue::Exact(v) => v.to_string(),
                Eigenvalue::Numeric(v) => format_significant(v, 12),
            };
            let _ = writeln!(out, "{v},{}", e.multiplicity);
        }
        out
    }
}

/// `%.{sig}g`-style formatting.
pub fn format_significant(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        let m = trim_fraction(mantissa);
        format!("{m}e{exp}")
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn decompose(index: u64, q: u64, digits: &mut [u64]) {
    let mut rest = index;
    for d in digits.iter_mut() {
        *d = rest % q;
        rest /= q;
    }
}

fn fill_counts(spec: &GraphSpec, gamma: u64, digits: &mut [u64], counts: &mut [u64]) {
    let q = spec.ctx().char_modulus();
    decompose(gamma, q, digits);
    counts.fill(0);
    for k in 0..spec.degree() {
        let t: u64 = spec
            .trace_form(k)
            .iter()
            .zip(digits.iter())
            .map(|(&f, &g)| u64::from(f) * g)
            .sum();
        counts[(t % q) as usize] += 1;
    }
}

/// Histogram of T(γs) over the connection set, for γ given by its index.
pub fn trace_counts(spec: &GraphSpec, gamma: VertexId) -> Result<TraceCounts> {
    if gamma.0 >= spec.n() {
        return Err(Error::VertexOutOfRange {
            vertex: gamma.0,
            n: spec.n(),
        });
    }
    let ctx = spec.ctx();
    let mut digits = vec![0u64; ctx.r() as usize];
    let mut counts = vec![0u64; ctx.char_modulus() as usize];
    fill_counts(spec, gamma.0, &mut digits, &mut counts);
    Ok(TraceCounts {
        gamma_index: gamma,
        counts,
    })
}

/// Σ_s i^(T(γs)) = counts[0] − counts[2], valid once counts[1] = counts[3].
pub fn eigenvalue_exact_char4(tc: &TraceCounts) -> Result<i64> {
    exact_char4_from_counts(&tc.counts)
}

fn exact_char4_from_counts(c: &[u64]) -> Result<i64> {
    if c.len() != 4 {
        return Err(Error::Precondition(format!(
            "exact path needs characteristic 4, got {}",
            c.len()
        )));
    }
    if c[1] != c[3] {
        return Err(Error::Integrity(format!(
            "trace counts {c:?} are not symmetric; eigenvalue would be non-real"
        )));
    }
    Ok(c[0] as i64 - c[2] as i64)
}

struct RootTable {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl RootTable {
    fn new(q: u64) -> Self {
        let angles = (0..q).map(|j| TAU * j as f64 / q as f64);
        RootTable {
            cos: angles.clone().map(f64::cos).collect(),
            sin: angles.map(f64::sin).collect(),
        }
    }

    fn eval(&self, counts: &[u64]) -> (f64, f64) {
        counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .fold((0.0, 0.0), |(re, im), (j, &c)| {
                (re + c as f64 * self.cos[j], im + c as f64 * self.sin[j])
            })
    }
}

/// Σ_j counts[j]·cos(2πj/p^e); fails if the imaginary part exceeds 1e-9·d.
pub fn eigenvalue_numeric(tc: &TraceCounts, p: u64, e: u32) -> Result<f64> {
    let q = p.pow(e);
    if tc.counts.len() as u64 != q {
        return Err(Error::Precondition(format!(
            "{} trace buckets for characteristic {q}",
            tc.counts.len()
        )));
    }
    numeric_from_counts(&RootTable::new(q), &tc.counts)
}

fn numeric_from_counts(table: &RootTable, counts: &[u64]) -> Result<f64> {
    let (re, im) = table.eval(counts);
    let d: u64 = counts.iter().sum();
    if im.abs() >= SELF_CHECK_TOL * (d.max(1) as f64) {
        return Err(Error::Integrity(format!(
            "character sum has imaginary part {im:e}"
        )));
    }
    Ok(re)
}

/// One eigenvalue per γ, in vertex-index order.
pub fn character_eigenvalues(spec: &GraphSpec) -> Result<Vec<Eigenvalue>> {
    let ctx = spec.ctx();
    let q = ctx.char_modulus();
    let r = ctx.r() as usize;
    let exact = q == 4;
    let table = RootTable::new(q);
    (0..spec.n())
        .into_par_iter()
        .map_init(
            || (vec![0u64; r], vec![0u64; q as usize]),
            |(digits, counts), g| {
                fill_counts(spec, g, digits, counts);
                if exact {
                    exact_char4_from_counts(counts).map(Eigenvalue::Exact)
                } else {
                    numeric_from_counts(&table, counts).map(Eigenvalue::Numeric)
                }
            },
        )
        .collect()
}

/// The full eigenvalue multiset from character sums.
pub fn full_spectrum(spec: &GraphSpec) -> Result<Spectrum> {
    let values = character_eigenvalues(spec)?;
    let n = spec.n();
    let d = spec.degree() as u64;
    if spec.ctx().char_modulus() == 4 {
        let ints = values.into_iter().map(|v| match v {
            Eigenvalue::Exact(x) => x,
            Eigenvalue::Numeric(_) => unreachable!("characteristic 4 uses the exact path"),
        });
        Ok(Spectrum::from_exact(ints, n, d))
    } else {
        Ok(Spectrum::from_numeric(
            values.into_iter().map(Eigenvalue::as_f64).collect(),
            n,
            d,
            ORACLE_TOL,
        ))
    }
}

/// Eigenvalues of the explicit dense adjacency matrix.
pub fn oracle_spectrum(spec: &GraphSpec, tol: f64) -> Result<Spectrum> {
    let n = spec.n();
    if n > ORACLE_MAX_N {
        return Err(Error::TooLarge {
            what: "dense oracle",
            n,
            limit: ORACLE_MAX_N,
        });
    }
    let size = n as usize;
    let mut adj = DMatrix::<f64>::zeros(size, size);
    let mut buf = Vec::new();
    for u in 0..n {
        spec.neighbor_indices(u, &mut buf);
        for &v in &buf {
            adj[(u as usize, v as usize)] = 1.0;
        }
    }
    let eig = adj.symmetric_eigenvalues();
    Ok(Spectrum::from_numeric(
        eig.iter().copied().collect(),
        n,
        spec.degree() as u64,
        tol,
    ))
}

/// Multiset equality within `tol`, comparing sorted expansions.
pub fn spectra_agree(a: &Spectrum, b: &Spectrum, tol: f64) -> bool {
    if a.total_multiplicity() != b.total_multiplicity() {
        return false;
    }
    a.expanded()
        .iter()
        .zip(b.expanded())
        .all(|(x, y)| (x - y).abs() <= tol)
}

/// ζ_γ = Σ_(s∈G₁) ω^(T(γs)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Zeta {
    Exact(GaussianInt),
    Numeric { re: f64, im: f64 },
}

impl Zeta {
    pub fn abs(&self) -> f64 {
        match *self {
            Zeta::Exact(z) => z.abs(),
            Zeta::Numeric { re, im } => re.hypot(im),
        }
    }

    pub fn exact(&self) -> Option<GaussianInt> {
        match *self {
            Zeta::Exact(z) => Some(z),
            Zeta::Numeric { .. } => None,
        }
    }
}

fn zeta_from_traces(q: u64, table: &RootTable, traces: impl Iterator<Item = u64>) -> Zeta {
    if q == 4 {
        let mut z = GaussianInt::ZERO;
        for t in traces {
            z += GaussianInt::i_pow(t);
        }
        Zeta::Exact(z)
    } else {
        let (re, im) = traces.fold((0.0, 0.0), |(re, im), t| {
            (re + table.cos[t as usize], im + table.sin[t as usize])
        });
        Zeta::Numeric { re, im }
    }
}

/// ζ_γ summed directly over G₁ (not −G₁); exact in characteristic 4.
pub fn zeta(ctx: &RingContext, gamma: &RingElement) -> Result<Zeta> {
    ctx.check(gamma)?;
    let q = ctx.char_modulus();
    let table = RootTable::new(q);
    let traces: Vec<u64> = ctx
        .g1()
        .iter()
        .map(|s| ctx.trace(&ctx.mul(gamma, s)?))
        .collect::<Result<_>>()?;
    Ok(zeta_from_traces(q, &table, traces.into_iter()))
}

/// ζ is constant on each orbit γG₁ (γ ≠ 0); one entry per orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaOrbit {
    /// Smallest vertex index in the orbit.
    pub representative: u64,
    pub value: Zeta,
}

/// Largest ring for which [`zeta_orbits`] keeps a visited bitmap.
pub const ZETA_ORBIT_MAX_N: u64 = 1 << 26;

/// ζ_γ for every nonzero γ, computed once per G₁-orbit by walking γ, γξ, γξ², ...
pub fn zeta_orbits(ctx: &RingContext) -> Result<Vec<ZetaOrbit>> {
    let n = ctx.order();
    if n > ZETA_ORBIT_MAX_N {
        return Err(Error::TooLarge {
            what: "zeta orbit table",
            n,
            limit: ZETA_ORBIT_MAX_N,
        });
    }
    let q = ctx.char_modulus();
    let table = RootTable::new(q);
    let xi = ctx.xi().coeffs().to_vec();
    let orbit_len = ctx.g1().len();
    let mut visited = vec![false; n as usize];
    visited[0] = true;
    let mut out = Vec::with_capacity(n as usize / orbit_len);
    let mut traces = Vec::with_capacity(orbit_len);
    for start in 1..n {
        if visited[start as usize] {
            continue;
        }
        traces.clear();
        let mut y = ctx.digits_raw(start);
        for _ in 0..orbit_len {
            let idx = ctx.index_raw(&y) as usize;
            if visited[idx] {
                return Err(Error::Internal(format!(
                    "orbit of {start} is shorter than |G1|"
                )));
            }
            visited[idx] = true;
            traces.push(ctx.trace_linear(&y));
            y = ctx.mul_raw(&y, &xi);
        }
        if ctx.index_raw(&y) != start {
            return Err(Error::Internal(format!("orbit of {start} does not close")));
        }
        out.push(ZetaOrbit {
            representative: start,
            value: zeta_from_traces(q, &table, traces.iter().copied()),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::build_graph;
    use crate::ring::{make_ring, RingParams};
    use std::sync::Arc;

    fn graph(p: u64, e: u32, r: u32) -> GraphSpec {
        let ctx = Arc::new(make_ring(RingParams::new(p, e, r).unwrap(), None).unwrap());
        build_graph(ctx, None).unwrap()
    }

    #[test]
    fn trace_counts_gr4_16() {
        let g = graph(2, 2, 2);
        let tc = trace_counts(&g, VertexId(0)).unwrap();
        assert_eq!(tc.counts, vec![6, 0, 0, 0]);
        let one = g.vertex_of(&g.ctx().one()).unwrap();
        let tc = trace_counts(&g, one).unwrap();
        assert_eq!(tc.counts, vec![0, 2, 2, 2]);
        assert!(tc.is_symmetric());
        assert_eq!(eigenvalue_exact_char4(&tc).unwrap(), -2);
        assert_eq!(eigenvalue_numeric(&tc, 2, 2).unwrap(), -2.0);
        assert!(trace_counts(&g, VertexId(16)).is_err());
    }

    #[test]
    fn exact_path_examples() {
        let g = graph(2, 2, 2);
        let z = TraceCounts {
            gamma_index: VertexId(0),
            counts: vec![6, 0, 0, 0],
        };
        assert_eq!(eigenvalue_exact_char4(&z).unwrap(), 6);
        let gamma = g.vertex_of(&g.ctx().element(&[2, 1]).unwrap()).unwrap();
        let tc = trace_counts(&g, gamma).unwrap();
        assert_eq!(eigenvalue_exact_char4(&tc).unwrap(), 2);
        let broken = TraceCounts {
            gamma_index: VertexId(0),
            counts: vec![1, 2, 0, 3],
        };
        assert!(matches!(
            eigenvalue_exact_char4(&broken),
            Err(Error::Integrity(_))
        ));
        let wrong = TraceCounts {
            gamma_index: VertexId(0),
            counts: vec![1; 9],
        };
        assert!(matches!(
            eigenvalue_exact_char4(&wrong),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn numeric_rejects_non_real() {
        let tc = TraceCounts {
            gamma_index: VertexId(0),
            counts: vec![0, 1, 0, 0],
        };
        assert!(matches!(
            eigenvalue_numeric(&tc, 2, 2),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn zeta_examples() {
        let g = graph(2, 2, 2);
        let ctx = g.ctx();
        assert_eq!(
            zeta(ctx, &ctx.zero()).unwrap(),
            Zeta::Exact(GaussianInt::new(3, 0))
        );
        assert_eq!(
            zeta(ctx, &ctx.one()).unwrap(),
            Zeta::Exact(GaussianInt::new(-1, -2))
        );
        assert_eq!(
            zeta(ctx, &ctx.scalar(2)).unwrap(),
            Zeta::Exact(GaussianInt::new(-1, 0))
        );
    }

    #[test]
    fn spectrum_gr4_16() {
        let s = full_spectrum(&graph(2, 2, 2)).unwrap();
        assert!(s.exact);
        let table: Vec<(f64, u64)> = s
            .entries
            .iter()
            .map(|e| (e.value.as_f64(), e.multiplicity))
            .collect();
        assert_eq!(table, vec![(6.0, 1), (2.0, 6), (-2.0, 9)]);
        assert_eq!(s.exact_moments(), Some((0, 16 * 6)));
        assert_eq!(s.lambda_g_exact(), Some(2));
        assert_eq!(s.to_csv(), "eigenvalue,multiplicity\n6,1\n2,6\n-2,9\n");
    }

    #[test]
    fn numeric_merge() {
        let s = Spectrum::from_numeric(vec![1.0, 3.0, 1.0 + 1e-8, -2.0], 4, 3, 1e-6);
        assert_eq!(s.distinct(), 3);
        assert_eq!(s.entries[1].multiplicity, 2);
        assert_eq!(s.expanded().len(), 4);
        assert_eq!(s.max(), 3.0);
        assert_eq!(s.min(), -2.0);
    }

    #[test]
    fn non_principal_drops_one_degree() {
        let s = Spectrum::from_exact([6, 6, 2, -2], 4, 6);
        let np = s.non_principal();
        assert_eq!(np[0], (Eigenvalue::Exact(6), 1));
        assert_eq!(np.len(), 3);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(-0.0, 12), "0");
        assert_eq!(format_significant(2.0, 12), "2");
        assert_eq!(format_significant(-1.5, 12), "-1.5");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(123456.789, 12), "123456.789");
        assert_eq!(format_significant(1.25e-7, 12), "1.25e-7");
        assert_eq!(
            format_significant(2.0f64.sqrt() * 1e13, 12),
            "1.41421356237e13"
        );
    }

    #[test]
    fn oracle_size_limit() {
        let g = graph(2, 2, 7);
        assert!(matches!(
            oracle_spectrum(&g, 1e-6),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn zeta_orbits_cover_nonzero_elements() {
        let g = graph(3, 2, 2);
        let orbits = zeta_orbits(g.ctx()).unwrap();
        assert_eq!(orbits.len() as u64 * 8, 80);
    }
}
