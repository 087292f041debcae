//! Cayley graphs Cay(GR⁺, S) with S = γG₁ ∪ −γG₁ (p = 2) or S = γG₁ (p odd).
//!
//! Graphs are implicit: a vertex is the mixed-radix index of a ring element
//! and its neighbors are obtained by ring addition. Edge lists are produced
//! only on request.

use std::collections::{HashSet, VecDeque};
use std::io::{self, BufWriter, Write};
use std::sync::Arc;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::{checked_pow, is_prime};
use crate::ring::{RingContext, RingElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexId(pub u64);

#[derive(Debug, Clone)]
pub struct GraphSpec {
    ctx: Arc<RingContext>,
    gamma: RingElement,
    connection_set: Vec<RingElement>,
    /// Flattened d × r coefficient digits of the connection set.
    conn_digits: Vec<u32>,
    /// Flattened d × r table of T(x^i · s).
    trace_forms: Vec<u32>,
    n: u64,
}

/// Builds H (γ = 1) or its twist H^γ for a unit γ.
pub fn build_graph(ctx: Arc<RingContext>, gamma: Option<RingElement>) -> Result<GraphSpec> {
    let gamma = match gamma {
        Some(g) => {
            ctx.check(&g)?;
            g
        }
        None => ctx.one(),
    };
    if !ctx.is_unit(&gamma)? {
        return Err(Error::NonUnitGamma(gamma.to_string()));
    }

    let twisted: Vec<RingElement> = ctx
        .g1()
        .iter()
        .map(|t| ctx.mul(&gamma, t))
        .collect::<Result<_>>()?;
    let mut connection_set = twisted.clone();
    if ctx.p() == 2 {
        let negated: Vec<RingElement> =
            twisted.iter().map(|s| ctx.neg(s)).collect::<Result<_>>()?;
        let pos: HashSet<&RingElement> = twisted.iter().collect();
        if let Some(s) = negated.iter().find(|s| pos.contains(s)) {
            return Err(Error::ConnectionSet(format!(
                "gamma·G1 and -gamma·G1 intersect at {s}"
            )));
        }
        connection_set.extend(negated);
    }

    let seen: HashSet<&RingElement> = connection_set.iter().collect();
    if seen.len() != connection_set.len() {
        return Err(Error::ConnectionSet("duplicate elements".into()));
    }
    if connection_set.iter().any(RingElement::is_zero) {
        return Err(Error::ConnectionSet("contains zero".into()));
    }
    for s in &connection_set {
        if !seen.contains(&ctx.neg(s)?) {
            return Err(Error::ConnectionSet(format!(
                "not closed under negation at {s}"
            )));
        }
    }
    let expected = expected_degree(ctx.p(), ctx.r());
    if connection_set.len() as u64 != expected {
        return Err(Error::ConnectionSet(format!(
            "degree {} but {} expected",
            connection_set.len(),
            expected
        )));
    }

    let r = ctx.r() as usize;
    let mut conn_digits = Vec::with_capacity(connection_set.len() * r);
    let mut trace_forms = Vec::with_capacity(connection_set.len() * r);
    let mut mono = ctx.one();
    let x = ctx.x();
    let mut monomials = Vec::with_capacity(r);
    for _ in 0..r {
        monomials.push(mono.clone());
        mono = ctx.mul(&mono, &x)?;
    }
    for s in &connection_set {
        conn_digits.extend_from_slice(s.coeffs());
        for m in &monomials {
            trace_forms.push(ctx.trace(&ctx.mul(m, s)?)? as u32);
        }
    }

    let n = ctx.order();
    Ok(GraphSpec {
        ctx,
        gamma,
        connection_set,
        conn_digits,
        trace_forms,
        n,
    })
}

/// 2^(r+1) − 2 for p = 2, p^r − 1 otherwise.
pub fn expected_degree(p: u64, r: u32) -> u64 {
    if p == 2 {
        (1u64 << (r + 1)) - 2
    } else {
        p.pow(r) - 1
    }
}

impl GraphSpec {
    pub fn ctx(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn gamma(&self) -> &RingElement {
        &self.gamma
    }

    pub fn connection_set(&self) -> &[RingElement] {
        &self.connection_set
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.connection_set.len()
    }

    /// `# p e r gamma n d` with the actual values.
    pub fn header_line(&self) -> String {
        format!(
            "# {} {} {} {} {} {}",
            self.ctx.p(),
            self.ctx.e(),
            self.ctx.r(),
            self.gamma,
            self.n,
            self.degree()
        )
    }

    pub fn vertex_element(&self, v: VertexId) -> Result<RingElement> {
        self.ctx.from_index(v.0)
    }

    pub fn vertex_of(&self, a: &RingElement) -> Result<VertexId> {
        self.ctx.index_of(a).map(VertexId)
    }

    /// {v + s : s ∈ S} in connection-set order.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>> {
        if v.0 >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: v.0,
                n: self.n,
            });
        }
        let mut out = Vec::with_capacity(self.degree());
        self.neighbor_indices(v.0, &mut out);
        Ok(out.into_iter().map(VertexId).collect())
    }

    /// Unchecked neighbor enumeration into a reusable buffer.
    pub(crate) fn neighbor_indices(&self, v: u64, out: &mut Vec<u64>) {
        out.clear();
        let q = self.ctx.char_modulus();
        let r = self.ctx.r() as usize;
        let mut digits = [0u64; 32];
        let mut rest = v;
        for d in digits.iter_mut().take(r) {
            *d = rest % q;
            rest /= q;
        }
        for s in self.conn_digits.chunks_exact(r) {
            let mut idx = 0u64;
            for i in (0..r).rev() {
                idx = idx * q + (digits[i] + u64::from(s[i])) % q;
            }
            out.push(idx);
        }
    }

    /// T(x^i · s) for connection element `k`.
    pub(crate) fn trace_form(&self, k: usize) -> &[u32] {
        let r = self.ctx.r() as usize;
        &self.trace_forms[k * r..(k + 1) * r]
    }

    /// BFS distances from `root`; `u32::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, root: VertexId) -> Result<Vec<u32>> {
        let n = usize::try_from(self.n).map_err(|_| Error::TooLarge {
            what: "breadth-first search",
            n: self.n,
            limit: usize::MAX as u64,
        })?;
        if root.0 >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: root.0,
                n: self.n,
            });
        }
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        let mut buf = Vec::with_capacity(self.degree());
        dist[root.0 as usize] = 0;
        queue.push_back(root.0);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            self.neighbor_indices(u, &mut buf);
            for &w in &buf {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }
}

/// Writes each undirected edge once as "u v" (u < v), lexicographically
/// sorted, after the header line. Returns the number of edges, n·d/2.
pub fn export_edges<W: Write>(spec: &GraphSpec, sink: W) -> io::Result<u64> {
    let mut out = BufWriter::new(sink);
    writeln!(out, "{}", spec.header_line())?;
    let mut buf = Vec::with_capacity(spec.degree());
    let mut count = 0u64;
    for u in 0..spec.n() {
        spec.neighbor_indices(u, &mut buf);
        buf.retain(|&v| v > u);
        buf.sort_unstable();
        for &v in &buf {
            writeln!(out, "{u} {v}")?;
            count += 1;
        }
    }
    out.flush()?;
    Ok(count)
}

/// One member of the sparse family H_(p^(δr), p^(δr²)).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyRow {
    pub p: u64,
    pub r: u32,
    pub e: u32,
    /// n = p^n_exponent
    pub n_exponent: u64,
    /// `None` when p^n_exponent overflows 64 bits.
    pub n: Option<u64>,
    pub d: Option<u64>,
    pub lambda_bound: f64,
}

pub fn family_params(p: u64, delta: Ratio<u64>, r: u32) -> Result<FamilyRow> {
    if !is_prime(p) {
        return Err(Error::InvalidParams(format!("p = {p} is not prime")));
    }
    if delta.numer() == &0 || delta > Ratio::new(1, 2) {
        return Err(Error::InvalidParams(format!(
            "delta = {delta} is outside (0, 1/2]"
        )));
    }
    let er = delta * Ratio::from_integer(u64::from(r));
    if !er.is_integer() {
        return Err(Error::InvalidParams(format!(
            "delta·r = {er} is not an integer"
        )));
    }
    let e = er.to_integer();
    if e < 2 {
        return Err(Error::InvalidParams(format!(
            "delta·r = {e} but e >= 2 is required"
        )));
    }
    let e = e as u32;
    let n_exponent = u64::from(e) * u64::from(r);
    let d = if p == 2 {
        checked_pow(2, u64::from(r) + 1).map(|v| v - 2)
    } else {
        checked_pow(p, u64::from(r)).map(|v| v - 1)
    };
    let pf = p as f64;
    let half_r = f64::from(r) / 2.0;
    let lambda_bound = if p == 2 {
        2f64.powf(half_r + f64::from(e)) - 2f64.powf(half_r + 1.0) + 2.0
    } else {
        pf.powf(half_r + f64::from(e) - 1.0) - pf.powf(half_r) + 1.0
    };
    Ok(FamilyRow {
        p,
        r,
        e,
        n_exponent,
        n: checked_pow(p, n_exponent),
        d,
        lambda_bound,
    })
}
