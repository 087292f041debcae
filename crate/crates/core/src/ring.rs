//! Exact arithmetic in the Galois ring GR(p^e, p^(er)) = Z_(p^e)[x]/(f(x)).
//!
//! Elements are stored in the polynomial basis {1, x, ..., x^(r-1)} with every
//! coefficient fully reduced into `[0, p^e)`. A [`RingContext`] owns all
//! derived data: the Teichmüller generator ξ and its cyclic group G₁, the
//! change of basis to {1, ξ, ..., ξ^(r-1)} used by the generalized Frobenius,
//! and the trace of each basis monomial.
//!
//! ```
//! use gr_cayley::ring::{make_ring, RingParams};
//!
//! let ctx = make_ring(RingParams::new(2, 2, 2).unwrap(), None).unwrap();
//! let x = ctx.x();
//! assert_eq!(ctx.mul(&x, &x).unwrap(), ctx.element(&[3, 3]).unwrap());
//! assert_eq!(ctx.trace(&ctx.one()).unwrap(), 2);
//! ```

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fp_poly;
use crate::modular::{checked_pow, inv_mod, is_prime};

/// Largest supported ring order p^(er).
pub const MAX_RING_ORDER: u64 = 1 << 32;

/// Rings up to this order get a full element-index → trace table.
pub const TRACE_TABLE_CUTOFF: u64 = 1 << 24;

static NEXT_CONTEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingParams {
    pub p: u64,
    pub e: u32,
    pub r: u32,
    /// Seed for the modulus search; 0 scans candidates from the start.
    pub seed: u64,
}

impl RingParams {
    pub fn new(p: u64, e: u32, r: u32) -> Result<Self> {
        let params = RingParams { p, e, r, seed: 0 };
        params.validate()?;
        Ok(params)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::InvalidParams(format!("p = {} is not prime", self.p)));
        }
        if self.e < 2 {
            return Err(Error::InvalidParams(format!(
                "e = {} but e >= 2 is required",
                self.e
            )));
        }
        if self.r < 2 {
            return Err(Error::InvalidParams(format!(
                "r = {} but r >= 2 is required",
                self.r
            )));
        }
        match checked_pow(self.p, u64::from(self.e) * u64::from(self.r)) {
            Some(n) if n <= MAX_RING_ORDER => Ok(()),
            _ => Err(Error::InvalidParams(format!(
                "p^(er) = {}^{} exceeds the supported order 2^32",
                self.p,
                u64::from(self.e) * u64::from(self.r)
            ))),
        }
    }

    /// The characteristic p^e.
    pub fn char_modulus(&self) -> u64 {
        self.p.pow(self.e)
    }

    /// The ring order p^(er).
    pub fn order(&self) -> u64 {
        self.p.pow(self.e * self.r)
    }

    /// Size of the residue field, p^r.
    pub fn residue_order(&self) -> u64 {
        self.p.pow(self.r)
    }
}

/// Monic polynomial of degree r over Z_(p^e), ascending coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModulusPoly {
    coeffs: Vec<u64>,
}

impl ModulusPoly {
    /// Checks shape only (monic, coefficients in range); irreducibility and
    /// primitivity are verified by [`make_ring`].
    pub fn new(coeffs: Vec<u64>, char_modulus: u64) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Modulus("modulus must have degree at least 1".into()));
        }
        if coeffs.last() != Some(&1) {
            return Err(Error::Modulus("modulus must be monic".into()));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= char_modulus) {
            return Err(Error::Modulus(format!(
                "coefficient {c} is not reduced mod {char_modulus}"
            )));
        }
        Ok(ModulusPoly { coeffs })
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficientwise reduction mod p.
    pub fn residue(&self, p: u64) -> Vec<u64> {
        self.coeffs.iter().map(|c| c % p).collect()
    }

    /// True iff the mod-p reduction is irreducible, i.e. the lift is basic irreducible.
    pub fn is_basic_irreducible(&self, p: u64) -> bool {
        fp_poly::is_irreducible(&self.residue(p), p)
    }

    pub fn is_primitive(&self, p: u64) -> bool {
        fp_poly::is_primitive(&self.residue(p), p)
    }
}

impl fmt::Display for ModulusPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_comma_list(f, self.coeffs.iter())
    }
}

/// Parses "1,1,1" (ascending); the range check against p^e happens in [`ModulusPoly::new`].
impl FromStr for ModulusPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coeffs = parse_comma_list(s).map_err(Error::Modulus)?;
        ModulusPoly::new(coeffs, u64::MAX)
    }
}

fn write_comma_list<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    items: impl Iterator<Item = T>,
) -> fmt::Result {
    for (i, c) in items.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

pub(crate) fn parse_comma_list(s: &str) -> std::result::Result<Vec<u64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<u64>()
                .map_err(|_| format!("cannot parse {t:?} as a non-negative integer"))
        })
        .collect()
}

/// Finds a monic degree-r polynomial over Z_(p^e) whose reduction mod p is
/// primitive. Candidates are the p^r monic residues ordered by the base-p
/// value of their low coefficients; seed 0 starts the scan at 0, any other
/// seed starts at a ChaCha8-chosen offset.
pub fn find_basic_irreducible(params: &RingParams) -> Result<ModulusPoly> {
    params.validate()?;
    let p = params.p;
    let r = params.r as usize;
    let count = params.residue_order();
    let start = if params.seed == 0 {
        0
    } else {
        ChaCha8Rng::seed_from_u64(params.seed).gen_range(0..count)
    };
    for step in 0..count {
        let mut k = (start + step) % count;
        let mut coeffs = Vec::with_capacity(r + 1);
        for _ in 0..r {
            coeffs.push(k % p);
            k /= p;
        }
        coeffs.push(1);
        if fp_poly::is_primitive(&coeffs, p) {
            return ModulusPoly::new(coeffs, params.char_modulus());
        }
    }
    Err(Error::Internal(format!(
        "no primitive polynomial of degree {r} over F_{p} found"
    )))
}

/// Element of a Galois ring, tagged with the context that created it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    ctx: u64,
    coeffs: Vec<u32>,
}

impl RingElement {
    /// Coefficients in the basis {1, x, ..., x^(r-1)}.
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_comma_list(f, self.coeffs.iter())
    }
}

/// Element of the residue field F_(p^r) = GR / pGR, coefficients mod p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueElement {
    pub coeffs: Vec<u32>,
}

impl ResidueElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Digits b_0, ..., b_(e-1) in G₁ ∪ {0} with a = Σ b_i p^i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicCoords {
    pub digits: Vec<RingElement>,
}

impl PAdicCoords {
    /// Position of the first nonzero digit; `None` for the zero element.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.digits.iter().position(|d| !d.is_zero())
    }
}

/// JSON form of a ring: `{p, e, r, modulus, xi}` with polynomials as comma lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingDescriptor {
    pub p: u64,
    pub e: u32,
    pub r: u32,
    pub modulus: String,
    pub xi: String,
}

/// Immutable description of one Galois ring plus precomputed structure.
#[derive(Debug, Clone)]
pub struct RingContext {
    id: u64,
    params: RingParams,
    q: u64,
    n: u64,
    modulus: ModulusPoly,
    xi: RingElement,
    g1: Vec<RingElement>,
    /// residue index -> position in `g1`; `u32::MAX` for the zero residue.
    teich_by_residue: Vec<u32>,
    /// Rows map x-basis coordinates to ξ-basis coordinates.
    xi_basis_inv: Vec<Vec<u64>>,
    /// ξ^(p·i) for i < r, in the x-basis.
    xi_p_powers: Vec<Vec<u32>>,
    /// T(x^i) for i < r.
    trace_basis: Vec<u64>,
    trace_table: Option<Vec<u16>>,
}

/// Builds GR(p^e, p^(er)). A supplied modulus is verified, never trusted.
pub fn make_ring(params: RingParams, modulus: Option<ModulusPoly>) -> Result<RingContext> {
    RingContext::new(params, modulus)
}

impl RingContext {
    pub fn new(params: RingParams, modulus: Option<ModulusPoly>) -> Result<Self> {
        params.validate()?;
        let p = params.p;
        let q = params.char_modulus();
        let r = params.r as usize;
        let modulus = match modulus {
            Some(m) => {
                let m = ModulusPoly::new(m.coeffs, q)?;
                if m.degree() != r {
                    return Err(Error::Modulus(format!(
                        "modulus {m} has degree {} but r = {r}",
                        m.degree()
                    )));
                }
                if !m.is_basic_irreducible(p) {
                    return Err(Error::Modulus(format!(
                        "modulus {m} is not basic irreducible (reducible mod {p})"
                    )));
                }
                if !m.is_primitive(p) {
                    return Err(Error::Modulus(format!(
                        "modulus {m} is irreducible but not primitive mod {p}"
                    )));
                }
                m
            }
            None => find_basic_irreducible(&params)?,
        };

        let mut ctx = RingContext {
            id: NEXT_CONTEXT_ID.fetch_add(1, Ordering::Relaxed),
            params,
            q,
            n: params.order(),
            modulus,
            xi: RingElement {
                ctx: 0,
                coeffs: Vec::new(),
            },
            g1: Vec::new(),
            teich_by_residue: Vec::new(),
            xi_basis_inv: Vec::new(),
            xi_p_powers: Vec::new(),
            trace_basis: Vec::new(),
            trace_table: None,
        };

        // ξ = u^(p^((e-1)r)) kills the p-part of the unit u = [x].
        let p_part = p.pow((params.e - 1) * params.r);
        let xi = ctx.pow_raw(&ctx.x().coeffs, p_part);
        let g1_order = (params.residue_order() - 1) as usize;
        let mut g1 = Vec::with_capacity(g1_order);
        let mut teich = vec![u32::MAX; params.residue_order() as usize];
        let mut cur = ctx.one().coeffs;
        for t in 0..g1_order {
            let res = ctx.residue_index(&cur);
            if res == 0 || teich[res] != u32::MAX {
                return Err(Error::Internal(format!(
                    "xi = {} does not have order {g1_order}",
                    ctx.wrap(xi.clone())
                )));
            }
            teich[res] = t as u32;
            let next = ctx.mul_raw(&cur, &xi);
            g1.push(ctx.wrap(cur));
            cur = next;
        }
        if cur != ctx.one().coeffs {
            return Err(Error::Internal("xi^(p^r - 1) != 1".into()));
        }
        ctx.xi = ctx.wrap(xi);
        ctx.teich_by_residue = teich;

        // Columns of the change-of-basis matrix are ξ^i written in the x-basis.
        let m: Vec<Vec<u64>> = (0..r)
            .map(|row| (0..r).map(|col| u64::from(g1[col].coeffs[row])).collect())
            .collect();
        ctx.xi_basis_inv = invert_matrix_mod(m, q, p)
            .ok_or_else(|| Error::Internal("powers of xi do not form a basis".into()))?;
        ctx.xi_p_powers = (0..r)
            .map(|i| g1[(p as usize * i) % g1_order].coeffs.clone())
            .collect();
        ctx.g1 = g1;

        let mut trace_basis = Vec::with_capacity(r);
        for i in 0..r {
            let mut mono = vec![0u32; r];
            mono[i] = 1;
            trace_basis.push(ctx.trace_by_frobenius_raw(&mono)?);
        }
        ctx.trace_basis = trace_basis;

        if ctx.n <= TRACE_TABLE_CUTOFF {
            let mut table = Vec::with_capacity(ctx.n as usize);
            let mut digits = vec![0u64; r];
            for _ in 0..ctx.n {
                let t: u64 = digits
                    .iter()
                    .zip(&ctx.trace_basis)
                    .map(|(a, b)| a * b)
                    .sum();
                table.push((t % q) as u16);
                for d in digits.iter_mut() {
                    *d += 1;
                    if *d < q {
                        break;
                    }
                    *d = 0;
                }
            }
            ctx.trace_table = Some(table);
        }
        Ok(ctx)
    }

    /// Rebuilds a context from its descriptor and checks that ξ matches.
    pub fn from_descriptor(desc: &RingDescriptor) -> Result<Self> {
        let params = RingParams::new(desc.p, desc.e, desc.r)?;
        let modulus = ModulusPoly::new(
            parse_comma_list(&desc.modulus).map_err(Error::Modulus)?,
            params.char_modulus(),
        )?;
        let ctx = RingContext::new(params, Some(modulus))?;
        if ctx.xi.to_string() != desc.xi.replace(' ', "") {
            return Err(Error::Integrity(format!(
                "descriptor xi {} differs from computed xi {}",
                desc.xi, ctx.xi
            )));
        }
        Ok(ctx)
    }

    pub fn descriptor(&self) -> RingDescriptor {
        RingDescriptor {
            p: self.params.p,
            e: self.params.e,
            r: self.params.r,
            modulus: self.modulus.to_string(),
            xi: self.xi.to_string(),
        }
    }

    pub fn params(&self) -> &RingParams {
        &self.params
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn e(&self) -> u32 {
        self.params.e
    }

    pub fn r(&self) -> u32 {
        self.params.r
    }

    /// p^e.
    pub fn char_modulus(&self) -> u64 {
        self.q
    }

    /// Number of elements, p^(er).
    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn modulus(&self) -> &ModulusPoly {
        &self.modulus
    }

    /// Generator of the Teichmüller group G₁.
    pub fn xi(&self) -> &RingElement {
        &self.xi
    }

    /// G₁ in the order ξ^0, ξ^1, ..., ξ^(p^r - 2).
    pub fn g1(&self) -> &[RingElement] {
        &self.g1
    }

    pub fn has_trace_table(&self) -> bool {
        self.trace_table.is_some()
    }

    /// T(x^i) for each basis monomial.
    pub fn trace_basis(&self) -> &[u64] {
        &self.trace_basis
    }

    fn wrap(&self, coeffs: Vec<u32>) -> RingElement {
        RingElement {
            ctx: self.id,
            coeffs,
        }
    }

    pub fn check(&self, a: &RingElement) -> Result<()> {
        if a.ctx != self.id || a.coeffs.len() != self.r() as usize {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    /// Element from (possibly negative, unreduced) coefficients; missing high
    /// coefficients are zero.
    pub fn element(&self, coeffs: &[i64]) -> Result<RingElement> {
        let r = self.r() as usize;
        if coeffs.len() > r {
            return Err(Error::Element(format!(
                "{} coefficients given but the ring has rank {r}",
                coeffs.len()
            )));
        }
        let mut out = vec![0u32; r];
        for (o, &c) in out.iter_mut().zip(coeffs) {
            *o = c.rem_euclid(self.q as i64) as u32;
        }
        Ok(self.wrap(out))
    }

    /// Parses an element literal "a0,a1,...".
    pub fn parse_element(&self, s: &str) -> Result<RingElement> {
        let vals = parse_comma_list(s).map_err(Error::Element)?;
        if let Some(v) = vals.iter().find(|&&v| v >= self.q) {
            return Err(Error::Element(format!(
                "coefficient {v} not reduced mod {}",
                self.q
            )));
        }
        let vals: Vec<i64> = vals.into_iter().map(|v| v as i64).collect();
        self.element(&vals)
    }

    pub fn zero(&self) -> RingElement {
        self.wrap(vec![0; self.r() as usize])
    }

    pub fn one(&self) -> RingElement {
        self.scalar(1)
    }

    pub fn scalar(&self, c: i64) -> RingElement {
        let mut v = vec![0u32; self.r() as usize];
        v[0] = c.rem_euclid(self.q as i64) as u32;
        self.wrap(v)
    }

    /// The class of x.
    pub fn x(&self) -> RingElement {
        let mut v = vec![0u32; self.r() as usize];
        v[1] = 1;
        self.wrap(v)
    }

    /// Mixed-radix little-endian index Σ coeffs[i]·(p^e)^i.
    pub fn index_of(&self, a: &RingElement) -> Result<u64> {
        self.check(a)?;
        Ok(self.index_raw(&a.coeffs))
    }

    pub fn from_index(&self, index: u64) -> Result<RingElement> {
        if index >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: index,
                n: self.n,
            });
        }
        Ok(self.wrap(self.digits_raw(index)))
    }

    /// Every element in index order.
    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        (0..self.n).map(move |i| self.wrap(self.digits_raw(i)))
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.wrap(self.add_raw(&a.coeffs, &b.coeffs)))
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.wrap(self.sub_raw(&a.coeffs, &b.coeffs)))
    }

    pub fn neg(&self, a: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        Ok(self.wrap(self.neg_raw(&a.coeffs)))
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.wrap(self.mul_raw(&a.coeffs, &b.coeffs)))
    }

    /// Square-and-multiply; `pow(a, 0) = 1`.
    pub fn pow(&self, a: &RingElement, exp: u64) -> Result<RingElement> {
        self.check(a)?;
        Ok(self.wrap(self.pow_raw(&a.coeffs, exp)))
    }

    /// Applies φ k times, where φ(Σ a_i ξ^i) = Σ a_i ξ^(p·i).
    pub fn frobenius(&self, a: &RingElement, k: u64) -> Result<RingElement> {
        self.check(a)?;
        let mut cur = a.coeffs.clone();
        for _ in 0..(k % u64::from(self.r())) {
            cur = self.frobenius_raw(&cur);
        }
        Ok(self.wrap(cur))
    }

    /// Coordinates of `a` in the basis {1, ξ, ..., ξ^(r-1)}.
    pub fn xi_coords(&self, a: &RingElement) -> Result<Vec<u64>> {
        self.check(a)?;
        Ok(self.xi_coords_raw(&a.coeffs))
    }

    /// T(a) ∈ Z_(p^e), from the table when present.
    pub fn trace(&self, a: &RingElement) -> Result<u64> {
        self.check(a)?;
        Ok(match &self.trace_table {
            Some(t) => u64::from(t[self.index_raw(&a.coeffs) as usize]),
            None => self.trace_linear(&a.coeffs),
        })
    }

    /// T(a) evaluated as a + φ(a) + ... + φ^(r-1)(a) directly.
    pub fn trace_by_frobenius(&self, a: &RingElement) -> Result<u64> {
        self.check(a)?;
        self.trace_by_frobenius_raw(&a.coeffs)
    }

    /// The reduction μ(a) ∈ F_(p^r).
    pub fn project_residue(&self, a: &RingElement) -> Result<ResidueElement> {
        self.check(a)?;
        let p = self.p() as u32;
        Ok(ResidueElement {
            coeffs: a.coeffs.iter().map(|c| c % p).collect(),
        })
    }

    pub fn residue_add(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        let p = self.p() as u32;
        ResidueElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| (x + y) % p)
                .collect(),
        }
    }

    pub fn residue_mul(&self, a: &ResidueElement, b: &ResidueElement) -> ResidueElement {
        let p = self.p();
        let f = self.modulus.residue(p);
        let av: Vec<u64> = a.coeffs.iter().map(|&c| u64::from(c)).collect();
        let bv: Vec<u64> = b.coeffs.iter().map(|&c| u64::from(c)).collect();
        let prod = fp_poly::mul_mod(&av, &bv, &f, p);
        let mut coeffs = vec![0u32; self.r() as usize];
        for (o, c) in coeffs.iter_mut().zip(prod) {
            *o = c as u32;
        }
        ResidueElement { coeffs }
    }

    /// a is a unit iff μ(a) ≠ 0.
    pub fn is_unit(&self, a: &RingElement) -> Result<bool> {
        self.check(a)?;
        Ok(self.residue_index(&a.coeffs) != 0)
    }

    /// Inverse of a unit; `None` for non-units.
    pub fn inverse(&self, a: &RingElement) -> Result<Option<RingElement>> {
        if !self.is_unit(a)? {
            return Ok(None);
        }
        // |GR*| = (p^r - 1)·p^((e-1)r)
        let group_order = (self.params.residue_order() - 1) * self.n / self.params.residue_order();
        Ok(Some(self.wrap(self.pow_raw(&a.coeffs, group_order - 1))))
    }

    /// The element of G₁ ∪ {0} congruent to `a` mod p.
    pub fn teichmuller_lift(&self, a: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        Ok(self.wrap(self.teich_raw(&a.coeffs)))
    }

    /// Index t with `g1[t] = a`, if `a ∈ G₁`.
    pub fn g1_position(&self, a: &RingElement) -> Result<Option<usize>> {
        self.check(a)?;
        let res = self.residue_index(&a.coeffs);
        let t = self.teich_by_residue[res];
        if t == u32::MAX || self.g1[t as usize].coeffs != a.coeffs {
            return Ok(None);
        }
        Ok(Some(t as usize))
    }

    /// Greedy p-adic expansion: b_0 is the Teichmüller lift of μ(a), then
    /// recurse on (a - b_0)/p.
    pub fn padic_coords(&self, a: &RingElement) -> Result<PAdicCoords> {
        self.check(a)?;
        let p = self.p() as u32;
        let mut cur = a.coeffs.clone();
        let mut digits = Vec::with_capacity(self.e() as usize);
        for _ in 0..self.e() {
            let b = self.teich_raw(&cur);
            let diff = self.sub_raw(&cur, &b);
            debug_assert!(diff.iter().all(|c| c % p == 0));
            cur = diff.into_iter().map(|c| c / p).collect();
            digits.push(self.wrap(b));
        }
        Ok(PAdicCoords { digits })
    }

    /// Σ digits[i]·p^i.
    pub fn reassemble(&self, coords: &PAdicCoords) -> Result<RingElement> {
        let mut acc = self.zero();
        let mut scale = 1i64;
        for d in &coords.digits {
            self.check(d)?;
            acc = self.add(&acc, &self.mul(&self.scalar(scale), d)?)?;
            scale = scale.saturating_mul(self.p() as i64);
        }
        Ok(acc)
    }

    // ---- raw slice arithmetic, used by hot loops in other modules ----

    pub(crate) fn index_raw(&self, coeffs: &[u32]) -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.q + u64::from(c))
    }

    pub(crate) fn digits_raw(&self, mut index: u64) -> Vec<u32> {
        (0..self.r())
            .map(|_| {
                let d = (index % self.q) as u32;
                index /= self.q;
                d
            })
            .collect()
    }

    pub(crate) fn add_raw(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let q = self.q;
        a.iter()
            .zip(b)
            .map(|(&x, &y)| ((u64::from(x) + u64::from(y)) % q) as u32)
            .collect()
    }

    pub(crate) fn sub_raw(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let q = self.q;
        a.iter()
            .zip(b)
            .map(|(&x, &y)| ((u64::from(x) + q - u64::from(y)) % q) as u32)
            .collect()
    }

    pub(crate) fn neg_raw(&self, a: &[u32]) -> Vec<u32> {
        let q = self.q;
        a.iter().map(|&x| ((q - u64::from(x)) % q) as u32).collect()
    }

    pub(crate) fn mul_raw(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let r = self.r() as usize;
        let q = self.q;
        let f = &self.modulus.coeffs;
        let mut prod = vec![0u64; 2 * r - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % q;
            }
        }
        // x^k = -Σ f_i x^(k-r+i) for k >= r
        for k in (r..2 * r - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for (i, &fi) in f[..r].iter().enumerate() {
                let slot = &mut prod[k - r + i];
                *slot = (*slot + c * ((q - fi) % q)) % q;
            }
        }
        prod[..r].iter().map(|&c| c as u32).collect()
    }

    pub(crate) fn pow_raw(&self, a: &[u32], mut exp: u64) -> Vec<u32> {
        let mut result = self.one().coeffs;
        let mut base = a.to_vec();
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul_raw(&result, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul_raw(&base, &base);
            }
        }
        result
    }

    fn xi_coords_raw(&self, a: &[u32]) -> Vec<u64> {
        let q = self.q;
        self.xi_basis_inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(a)
                    .map(|(m, &c)| m * u64::from(c) % q)
                    .sum::<u64>()
                    % q
            })
            .collect()
    }

    fn frobenius_raw(&self, a: &[u32]) -> Vec<u32> {
        let q = self.q;
        let coords = self.xi_coords_raw(a);
        let mut out = vec![0u64; a.len()];
        for (c, pow) in coords.iter().zip(&self.xi_p_powers) {
            for (o, &v) in out.iter_mut().zip(pow) {
                *o = (*o + c * u64::from(v)) % q;
            }
        }
        out.into_iter().map(|c| c as u32).collect()
    }

    fn trace_by_frobenius_raw(&self, a: &[u32]) -> Result<u64> {
        let mut cur = a.to_vec();
        let mut sum = vec![0u32; a.len()];
        for _ in 0..self.r() {
            sum = self.add_raw(&sum, &cur);
            cur = self.frobenius_raw(&cur);
        }
        if sum[1..].iter().any(|&c| c != 0) {
            return Err(Error::Internal(format!(
                "trace of {} has non-constant part; modulus is broken",
                self.wrap(a.to_vec())
            )));
        }
        Ok(u64::from(sum[0]))
    }

    /// T(a) = Σ a_i T(x^i) mod p^e.
    pub(crate) fn trace_linear(&self, a: &[u32]) -> u64 {
        let t: u64 = a
            .iter()
            .zip(&self.trace_basis)
            .map(|(&c, t)| u64::from(c) * t)
            .sum();
        t % self.q
    }

    pub(crate) fn residue_index(&self, a: &[u32]) -> usize {
        let p = self.p();
        a.iter()
            .rev()
            .fold(0u64, |acc, &c| acc * p + u64::from(c) % p) as usize
    }

    fn teich_raw(&self, a: &[u32]) -> Vec<u32> {
        match self.teich_by_residue[self.residue_index(a)] {
            u32::MAX => vec![0; a.len()],
            t => self.g1[t as usize].coeffs.clone(),
        }
    }
}

/// Gauss-Jordan inversion over Z/q (q a power of p), pivoting on units.
fn invert_matrix_mod(mut m: Vec<Vec<u64>>, q: u64, p: u64) -> Option<Vec<Vec<u64>>> {
    let r = m.len();
    let mut inv: Vec<Vec<u64>> = (0..r)
        .map(|i| (0..r).map(|j| u64::from(i == j)).collect())
        .collect();
    for col in 0..r {
        let pivot = (col..r).find(|&row| !m[row][col].is_multiple_of(p))?;
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let s = inv_mod(m[col][col], q)?;
        for j in 0..r {
            m[col][j] = m[col][j] * s % q;
            inv[col][j] = inv[col][j] * s % q;
        }
        for row in 0..r {
            if row == col || m[row][col] == 0 {
                continue;
            }
            let factor = m[row][col];
            for j in 0..r {
                m[row][j] = (m[row][j] + q - factor * m[col][j] % q) % q;
                inv[row][j] = (inv[row][j] + q - factor * inv[col][j] % q) % q;
            }
        }
    }
    Some(inv)
}
