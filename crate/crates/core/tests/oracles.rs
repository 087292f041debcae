//! Independent brute-force re-derivations checked against the library.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use gr_cayley::cayley::{build_graph, GraphSpec, VertexId};
use gr_cayley::fp_poly::{is_irreducible, is_primitive};
use gr_cayley::ring::{make_ring, RingContext, RingElement, RingParams};
use gr_cayley::spectrum::{
    character_eigenvalues, full_spectrum, oracle_spectrum, zeta, zeta_orbits, Eigenvalue, Zeta,
    ORACLE_TOL,
};

fn ring(p: u64, e: u32, r: u32) -> Arc<RingContext> {
    Arc::new(make_ring(RingParams::new(p, e, r).unwrap(), None).unwrap())
}

// --- F_p polynomials by enumeration ---------------------------------------

fn poly_mul_mod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let r = f.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (r..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            for j in 0..=r {
                prod[k - r + j] = (prod[k - r + j] + (p - c) * f[j] % p) % p;
            }
        }
    }
    prod.truncate(r);
    prod
}

/// Monic f of degree r is irreducible iff no product of two monic polys of
/// positive degree equals it.
fn irreducible_by_enumeration(f: &[u64], p: u64) -> bool {
    let r = f.len() - 1;
    let monics = |deg: usize| -> Vec<Vec<u64>> {
        (0..p.pow(deg as u32))
            .map(|mut idx| {
                let mut c: Vec<u64> = (0..deg)
                    .map(|_| {
                        let d = idx % p;
                        idx /= p;
                        d
                    })
                    .collect();
                c.push(1);
                c
            })
            .collect()
    };
    for da in 1..=r / 2 {
        for a in monics(da) {
            for b in monics(r - da) {
                let mut prod = vec![0u64; r + 1];
                for (i, &x) in a.iter().enumerate() {
                    for (j, &y) in b.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                if prod == f {
                    return false;
                }
            }
        }
    }
    true
}

/// Multiplicative order of x modulo f by repeated multiplication.
fn order_of_x(f: &[u64], p: u64) -> u64 {
    let r = f.len() - 1;
    let mut one = vec![0u64; r];
    one[0] = 1;
    let mut x = vec![0u64; r];
    x[1 % r] = if r == 1 { (p - f[0]) % p } else { 1 };
    let mut acc = x.clone();
    let mut k = 1;
    while acc != one {
        acc = poly_mul_mod(&acc, &x, f, p);
        k += 1;
        if k > p.pow(r as u32) {
            return 0;
        }
    }
    k
}

#[test]
fn irreducibility_and_primitivity_match_enumeration() {
    for (p, rmax) in [(2u64, 6usize), (3, 4), (5, 3), (7, 2)] {
        for r in 2..=rmax {
            for idx in 0..p.pow(r as u32) {
                let mut f: Vec<u64> = (0..r).map(|i| idx / p.pow(i as u32) % p).collect();
                f.push(1);
                let irr = irreducible_by_enumeration(&f, p);
                assert_eq!(is_irreducible(&f, p), irr, "p={p} f={f:?}");
                let prim = irr && f[0] != 0 && order_of_x(&f, p) == p.pow(r as u32) - 1;
                assert_eq!(is_primitive(&f, p), prim, "p={p} f={f:?}");
            }
        }
    }
}

// --- Ring arithmetic by schoolbook polynomial multiplication ---------------

fn schoolbook_mul(ctx: &RingContext, a: &RingElement, b: &RingElement) -> Vec<u32> {
    let q = ctx.char_modulus();
    let f = ctx.modulus().coeffs();
    let r = ctx.r() as usize;
    let mut prod = vec![0u64; 2 * r];
    for (i, &x) in a.coeffs().iter().enumerate() {
        for (j, &y) in b.coeffs().iter().enumerate() {
            prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % q;
        }
    }
    for k in (r..2 * r).rev() {
        let c = prod[k];
        prod[k] = 0;
        for j in 0..r {
            prod[k - r + j] = (prod[k - r + j] + q * q - c * f[j] % q) % q;
        }
    }
    prod[..r].iter().map(|&c| c as u32).collect()
}

#[test]
fn multiplication_matches_schoolbook() {
    for (p, e, r) in [(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3), (5, 2, 2)] {
        let ctx = ring(p, e, r);
        for a in ctx.elements() {
            for b in ctx.elements().step_by(3) {
                assert_eq!(
                    ctx.mul(&a, &b).unwrap().coeffs(),
                    schoolbook_mul(&ctx, &a, &b)
                );
            }
        }
    }
}

// --- Frobenius pinned down by its defining properties ------------------------

/// φ is the unique additive, multiplicative map with φ(ξ) = ξ^p: Z_q[ξ] is
/// the whole ring, so these identities determine it.
#[test]
fn frobenius_is_the_xi_power_map() {
    for (p, e, r) in [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2)] {
        let ctx = ring(p, e, r);
        let xi = ctx.xi().clone();
        // Build ξ-expansions of every element by brute-force search over
        // Z_q-combinations of 1, ξ, ..., ξ^(r-1).
        let powers: Vec<_> = (0..r)
            .map(|i| ctx.pow(&xi, u64::from(i)).unwrap())
            .collect();
        let q = ctx.char_modulus();
        let mut expansion = BTreeMap::new();
        for idx in 0..q.pow(r) {
            let coeffs: Vec<u64> = (0..r).map(|i| idx / q.pow(i) % q).collect();
            let mut acc = ctx.zero();
            for (c, pw) in coeffs.iter().zip(&powers) {
                acc = ctx
                    .add(&acc, &ctx.mul(&ctx.scalar(*c as i64), pw).unwrap())
                    .unwrap();
            }
            assert!(expansion.insert(acc.coeffs().to_vec(), coeffs).is_none());
        }
        assert_eq!(expansion.len() as u64, ctx.order());
        for a in ctx.elements() {
            let coeffs = &expansion[a.coeffs()];
            let mut image = ctx.zero();
            for (i, c) in coeffs.iter().enumerate() {
                let t = ctx.pow(&xi, p * i as u64).unwrap();
                image = ctx
                    .add(&image, &ctx.mul(&ctx.scalar(*c as i64), &t).unwrap())
                    .unwrap();
            }
            assert_eq!(ctx.frobenius(&a, 1).unwrap(), image, "a = {a}");
            assert_eq!(ctx.xi_coords(&a).unwrap(), *coeffs);
        }
    }
}

#[test]
fn trace_matches_frobenius_sum() {
    for (p, e, r) in [(2, 2, 2), (2, 2, 4), (3, 2, 2), (2, 3, 3), (5, 2, 2)] {
        let ctx = ring(p, e, r);
        for a in ctx.elements() {
            // Σ_k φ^k(a), computed here from repeated single Frobenius steps.
            let mut acc = ctx.zero();
            let mut cur = a.clone();
            for _ in 0..r {
                acc = ctx.add(&acc, &cur).unwrap();
                cur = ctx.frobenius(&cur, 1).unwrap();
            }
            assert!(
                acc.coeffs()[1..].iter().all(|&c| c == 0),
                "trace not in Z_q"
            );
            assert_eq!(ctx.trace(&a).unwrap(), u64::from(acc.coeffs()[0]));
            assert_eq!(
                ctx.trace_by_frobenius(&a).unwrap(),
                u64::from(acc.coeffs()[0])
            );
        }
    }
}

// --- Character sums --------------------------------------------------------

fn root_sum(q: u64, exponents: impl Iterator<Item = u64>) -> (f64, f64) {
    exponents.fold((0.0, 0.0), |(re, im), t| {
        let ang = 2.0 * PI * t as f64 / q as f64;
        (re + ang.cos(), im + ang.sin())
    })
}

#[test]
fn zeta_matches_direct_sum() {
    for (p, e, r) in [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2)] {
        let ctx = ring(p, e, r);
        let q = ctx.char_modulus();
        let orbits = zeta_orbits(&ctx).unwrap();
        let by_rep: BTreeMap<u64, Zeta> = orbits
            .into_iter()
            .map(|o| (o.representative, o.value))
            .collect();
        for gamma in ctx.elements().skip(1) {
            let (re, im) = root_sum(
                q,
                ctx.g1().iter().map(|t| {
                    ctx.trace_by_frobenius(&ctx.mul(&gamma, t).unwrap())
                        .unwrap()
                }),
            );
            let z = zeta(&ctx, &gamma).unwrap();
            let (zr, zi) = match z {
                Zeta::Exact(g) => (g.re as f64, g.im as f64),
                Zeta::Numeric { re, im } => (re, im),
            };
            assert!(
                (zr - re).abs() < 1e-9 && (zi - im).abs() < 1e-9,
                "gamma {gamma}"
            );
            if let Some(v) = by_rep.get(&ctx.index_of(&gamma).unwrap()) {
                assert!((v.abs() - z.abs()).abs() < 1e-9);
            }
        }
    }
}

/// λ_a = Σ_{s∈S} ω^{T(a s)} with every product and trace recomputed here.
fn direct_eigenvalues(spec: &GraphSpec) -> Vec<f64> {
    let ctx = spec.ctx();
    let q = ctx.char_modulus();
    (0..spec.n())
        .map(|v| {
            let a = spec.vertex_element(VertexId(v)).unwrap();
            let (re, im) = root_sum(
                q,
                spec.connection_set()
                    .iter()
                    .map(|s| ctx.trace_by_frobenius(&ctx.mul(&a, s).unwrap()).unwrap()),
            );
            assert!(im.abs() < 1e-9, "non-real eigenvalue");
            re
        })
        .collect()
}

#[test]
fn character_eigenvalues_match_direct_sums() {
    for (p, e, r) in [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2), (5, 2, 2)] {
        let spec = build_graph(ring(p, e, r), None).unwrap();
        let fast = character_eigenvalues(&spec).unwrap();
        for (v, (f, d)) in fast.iter().zip(direct_eigenvalues(&spec)).enumerate() {
            assert!(
                (f.as_f64() - d).abs() < 1e-9,
                "({p},{e},{r}) vertex {v}: {f:?} vs {d}"
            );
            if q4(p, e) {
                assert!(matches!(f, Eigenvalue::Exact(_)));
            }
        }
    }
}

fn q4(p: u64, e: u32) -> bool {
    p == 2 && e == 2
}

#[test]
fn twisted_graphs_match_oracle() {
    for (p, e, r) in [(2, 2, 2), (2, 2, 3), (3, 2, 2)] {
        let ctx = ring(p, e, r);
        for gamma in [ctx.xi().clone(), ctx.element(&[1, 1]).unwrap()] {
            if !ctx.is_unit(&gamma).unwrap() {
                continue;
            }
            let spec = build_graph(ctx.clone(), Some(gamma)).unwrap();
            let s = full_spectrum(&spec).unwrap();
            let o = oracle_spectrum(&spec, ORACLE_TOL).unwrap();
            assert!(gr_cayley::spectrum::spectra_agree(&s, &o, ORACLE_TOL));
        }
    }
}

// --- Frozen spectra (dense oracle, confirmed by an external eigensolver) ---

#[test]
fn frozen_spectra() {
    type Case = ((u64, u32, u32), &'static [(i64, u64)]);
    let cases: [Case; 3] = [
        ((2, 2, 2), &[(6, 1), (2, 6), (-2, 9)]),
        ((2, 2, 3), &[(14, 1), (2, 42), (-2, 7), (-6, 14)]),
        ((2, 2, 4), &[(30, 1), (6, 90), (-2, 135), (-10, 30)]),
    ];
    for ((p, e, r), expected) in cases {
        let spec = build_graph(ring(p, e, r), None).unwrap();
        let oracle = oracle_spectrum(&spec, ORACLE_TOL).unwrap();
        let got: Vec<(i64, u64)> = oracle
            .entries
            .iter()
            .map(|en| (en.value.as_f64().round() as i64, en.multiplicity))
            .collect();
        assert_eq!(got, expected, "oracle ({p},{e},{r})");
        let fast = full_spectrum(&spec).unwrap();
        let got: Vec<(i64, u64)> = fast
            .entries
            .iter()
            .map(|en| match en.value {
                Eigenvalue::Exact(v) => (v, en.multiplicity),
                Eigenvalue::Numeric(_) => panic!("char 4 must be exact"),
            })
            .collect();
        assert_eq!(got, expected, "character sums ({p},{e},{r})");
    }
}
