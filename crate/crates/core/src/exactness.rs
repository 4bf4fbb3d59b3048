//! Relative kernels and cokernels by exhaustive universal-property search,
//! short exact sequences, exact sequences and their short exact replacement.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cat::{FinCategory, MorId};
use crate::ideal::NullCategory;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactnessError {
    #[error("no kernel for `{0}`")]
    NoKernel(String),
    #[error("no cokernel for `{0}`")]
    NoCokernel(String),
    #[error("`{g} . {f}` is not a composable pair")]
    NotComposable { g: String, f: String },
    #[error("`{g} . {f}` is not null")]
    NotNullComposite { g: String, f: String },
    #[error("not exact: {0}")]
    NotExact(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelResult {
    pub kernel: MorId,
    /// Test morphism ↦ its unique factorization through the kernel.
    pub mediators: BTreeMap<MorId, MorId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ShortExactSeq {
    pub f: MorId,
    pub g: MorId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExactSeq {
    pub f: MorId,
    pub g: MorId,
    pub xi1: MorId,
    pub xi2: MorId,
    pub replacement: ShortExactSeq,
}

/// Every test `l` into `cod k` with `f ∘ l` null factors uniquely through `k`.
fn terminal_among_null_composites(nc: &NullCategory, k: MorId, f: MorId) -> bool {
    let c = nc.cat();
    let a = c.cod(k);
    let tests = c.incoming(a);
    let mut hits = vec![0u32; tests.len()];
    for &d in c.incoming(c.dom(k)) {
        hits[c.in_position(c.compose(k, d))] += 1;
    }
    tests
        .iter()
        .zip(&hits)
        .all(|(&l, &h)| h == 1 || !nc.is_null(c.compose(f, l)))
}

fn initial_among_null_composites(nc: &NullCategory, q: MorId, f: MorId) -> bool {
    let c = nc.cat();
    let b = c.dom(q);
    let tests = c.outgoing(b);
    let mut hits = vec![0u32; tests.len()];
    for &e in c.outgoing(c.cod(q)) {
        hits[c.out_position(c.compose(e, q))] += 1;
    }
    tests
        .iter()
        .zip(&hits)
        .all(|(&l, &h)| h == 1 || !nc.is_null(c.compose(l, f)))
}

/// Universal-property predicate: `k` is an N-kernel of `f`.
pub fn is_kernel_of(nc: &NullCategory, k: MorId, f: MorId) -> bool {
    let c = nc.cat();
    c.cod(k) == c.dom(f) && nc.is_null(c.compose(f, k)) && terminal_among_null_composites(nc, k, f)
}

/// Universal-property predicate: `q` is an N-cokernel of `f`.
pub fn is_cokernel_of(nc: &NullCategory, q: MorId, f: MorId) -> bool {
    let c = nc.cat();
    c.dom(q) == c.cod(f) && nc.is_null(c.compose(q, f)) && initial_among_null_composites(nc, q, f)
}

fn search_kernel(nc: &NullCategory, f: MorId) -> Option<MorId> {
    let c = nc.cat();
    let mut candidates: Vec<MorId> = c
        .incoming(c.dom(f))
        .iter()
        .copied()
        .filter(|&k| nc.is_null(c.compose(f, k)))
        .collect();
    candidates.sort_by_key(|&k| (c.dom(k), k));
    candidates
        .into_iter()
        .find(|&k| terminal_among_null_composites(nc, k, f))
}

fn search_cokernel(nc: &NullCategory, f: MorId) -> Option<MorId> {
    let c = nc.cat();
    let mut candidates: Vec<MorId> = c
        .outgoing(c.cod(f))
        .iter()
        .copied()
        .filter(|&q| nc.is_null(c.compose(q, f)))
        .collect();
    candidates.sort_by_key(|&q| (c.cod(q), q));
    candidates
        .into_iter()
        .find(|&q| initial_among_null_composites(nc, q, f))
}

/// The canonical kernel (minimal by domain, then index), memoized.
pub fn canonical_kernel(nc: &NullCategory, f: MorId) -> Option<MorId> {
    *nc.kernels[f.index()].get_or_init(|| search_kernel(nc, f))
}

/// The canonical cokernel (minimal by codomain, then index), memoized.
pub fn canonical_cokernel(nc: &NullCategory, f: MorId) -> Option<MorId> {
    *nc.cokernels[f.index()].get_or_init(|| search_cokernel(nc, f))
}

pub fn kernel(nc: &NullCategory, f: MorId) -> Result<KernelResult, ExactnessError> {
    let c = nc.cat();
    let k = canonical_kernel(nc, f).ok_or_else(|| ExactnessError::NoKernel(c.mor_name(f).into()))?;
    let mediators = c
        .incoming(c.dom(f))
        .iter()
        .filter(|&&l| nc.is_null(c.compose(f, l)))
        .map(|&l| (l, c.unique_lift(k, l).expect("kernel mediator")))
        .collect();
    Ok(KernelResult { kernel: k, mediators })
}

pub fn cokernel(nc: &NullCategory, f: MorId) -> Result<KernelResult, ExactnessError> {
    let c = nc.cat();
    let q = canonical_cokernel(nc, f).ok_or_else(|| ExactnessError::NoCokernel(c.mor_name(f).into()))?;
    let mediators = c
        .outgoing(c.cod(f))
        .iter()
        .filter(|&&l| nc.is_null(c.compose(l, f)))
        .map(|&l| (l, c.unique_colift(q, l).expect("cokernel mediator")))
        .collect();
    Ok(KernelResult { kernel: q, mediators })
}

pub fn is_short_exact(nc: &NullCategory, f: MorId, g: MorId) -> bool {
    let c = nc.cat();
    c.cod(f) == c.dom(g) && is_kernel_of(nc, f, g) && is_cokernel_of(nc, g, f)
}

/// All short exact pairs, sorted by `(f, g)`.
///
/// A cokernel is unique up to a unique iso, so the candidates for `g` are the
/// composites `σ ∘ coker f` with `σ` invertible.
pub fn short_exact_sequences(nc: &NullCategory) -> Vec<ShortExactSeq> {
    let c = nc.cat();
    let mut out: Vec<ShortExactSeq> = c
        .morphisms()
        .collect::<Vec<_>>()
        .into_par_iter()
        .flat_map_iter(|f| {
            let mut found = Vec::new();
            if let Some(q) = canonical_cokernel(nc, f) {
                for &s in c.outgoing(c.cod(q)) {
                    if c.is_iso(s) {
                        let g = c.compose(s, q);
                        if is_kernel_of(nc, f, g) {
                            found.push(ShortExactSeq { f, g });
                        }
                    }
                }
            }
            found
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemiexactReport {
    pub semiexact: bool,
    pub missing_kernels: Vec<MorId>,
    pub missing_cokernels: Vec<MorId>,
}

pub fn is_semiexact(nc: &NullCategory) -> SemiexactReport {
    let c = nc.cat();
    let ms: Vec<MorId> = c.morphisms().collect();
    let missing_kernels: Vec<MorId> = ms
        .par_iter()
        .copied()
        .filter(|&f| canonical_kernel(nc, f).is_none())
        .collect();
    let missing_cokernels: Vec<MorId> = ms
        .par_iter()
        .copied()
        .filter(|&f| canonical_cokernel(nc, f).is_none())
        .collect();
    SemiexactReport {
        semiexact: missing_kernels.is_empty() && missing_cokernels.is_empty(),
        missing_kernels,
        missing_cokernels,
    }
}

fn names(c: &FinCategory, g: MorId, f: MorId) -> (String, String) {
    (c.mor_name(g).into(), c.mor_name(f).into())
}

/// The chosen exact-sequence data for `(f, g)`. A pair that is already short
/// exact is returned as its own replacement with identity comparison maps.
pub fn replacement(nc: &NullCategory, f: MorId, g: MorId) -> Result<ExactSeq, ExactnessError> {
    let c = nc.cat();
    if c.cod(f) != c.dom(g) {
        let (g, f) = names(c, g, f);
        return Err(ExactnessError::NotComposable { g, f });
    }
    if !nc.is_null(c.compose(g, f)) {
        let (g, f) = names(c, g, f);
        return Err(ExactnessError::NotNullComposite { g, f });
    }
    if is_short_exact(nc, f, g) {
        return Ok(ExactSeq {
            f,
            g,
            xi1: c.identity(c.dom(f)),
            xi2: c.identity(c.cod(g)),
            replacement: ShortExactSeq { f, g },
        });
    }
    let k = canonical_kernel(nc, g).ok_or_else(|| ExactnessError::NoKernel(c.mor_name(g).into()))?;
    let q = canonical_cokernel(nc, f).ok_or_else(|| ExactnessError::NoCokernel(c.mor_name(f).into()))?;
    let xi1 = c.unique_lift(k, f).expect("kernel lift of a null composite");
    let xi2 = c.unique_colift(q, g).expect("cokernel lift of a null composite");
    let show = |m: MorId| c.mor_name(m).to_string();
    if !is_short_exact(nc, k, q) {
        return Err(ExactnessError::NotExact(format!(
            "replacement ({}, {}) is not short exact",
            show(k),
            show(q)
        )));
    }
    if !nc.coreflects_null(xi1) {
        return Err(ExactnessError::NotExact(format!(
            "{} does not coreflect null morphisms",
            show(xi1)
        )));
    }
    if !nc.reflects_null(xi2) {
        return Err(ExactnessError::NotExact(format!(
            "{} does not reflect null morphisms",
            show(xi2)
        )));
    }
    Ok(ExactSeq {
        f,
        g,
        xi1,
        xi2,
        replacement: ShortExactSeq { f: k, g: q },
    })
}

/// Exactness of a composable pair. Missing kernels or cokernels make the
/// answer `false` rather than an error.
pub fn is_exact(nc: &NullCategory, f: MorId, g: MorId) -> bool {
    replacement(nc, f, g).is_ok()
}

/// Nullity of the kernel's domain.
pub fn reflects_null_via_kernel(nc: &NullCategory, xi: MorId) -> Result<bool, ExactnessError> {
    let c = nc.cat();
    let k = canonical_kernel(nc, xi).ok_or_else(|| ExactnessError::NoKernel(c.mor_name(xi).into()))?;
    Ok(nc.is_null_object(c.dom(k)))
}

/// Nullity of the cokernel's codomain.
pub fn coreflects_null_via_cokernel(nc: &NullCategory, xi: MorId) -> Result<bool, ExactnessError> {
    let c = nc.cat();
    let q = canonical_cokernel(nc, xi).ok_or_else(|| ExactnessError::NoCokernel(c.mor_name(xi).into()))?;
    Ok(nc.is_null_object(c.cod(q)))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cat::{build_chain, build_pointed_sets, ObjId};

    fn ps(k: usize) -> NullCategory {
        let c = Arc::new(build_pointed_sets(k).unwrap());
        NullCategory::through_objects(c, &[ObjId(0)]).unwrap()
    }

    fn m(nc: &NullCategory, name: &str) -> MorId {
        nc.cat().find_mor(name).unwrap()
    }

    fn name(nc: &NullCategory, x: MorId) -> &str {
        nc.cat().mor_name(x)
    }

    #[test]
    fn ps2_kernels() {
        let nc = ps(2);
        let id2 = m(&nc, "id2");
        assert_eq!(name(&nc, kernel(&nc, id2).unwrap().kernel), "i");
        assert_eq!(name(&nc, cokernel(&nc, id2).unwrap().kernel), "r");
        assert_eq!(name(&nc, kernel(&nc, m(&nc, "c")).unwrap().kernel), "id2");
        assert_eq!(name(&nc, cokernel(&nc, m(&nc, "i")).unwrap().kernel), "id2");
    }

    #[test]
    fn missing_kernel_in_chain() {
        let c = Arc::new(build_chain(2).unwrap());
        let nc = NullCategory::through_objects(c, &[ObjId(1)]).unwrap();
        let id1 = m(&nc, "id1");
        assert_eq!(kernel(&nc, id1).unwrap_err(), ExactnessError::NoKernel("id1".into()));
        let report = is_semiexact(&nc);
        assert!(!report.semiexact);
        assert!(report.missing_kernels.contains(&id1));
    }

    #[test]
    fn kernel_predicate_examples() {
        let nc = ps(2);
        let id2 = m(&nc, "id2");
        assert!(is_kernel_of(&nc, m(&nc, "i"), id2));
        assert!(!is_kernel_of(&nc, m(&nc, "c"), id2));
        assert!(is_kernel_of(&nc, id2, m(&nc, "c")));
    }

    #[test]
    fn ps2_short_exact_pairs() {
        let nc = ps(2);
        let found: Vec<(&str, &str)> = short_exact_sequences(&nc)
            .iter()
            .map(|s| (name(&nc, s.f), name(&nc, s.g)))
            .collect();
        assert_eq!(found, [("id1", "id1"), ("i", "id2"), ("id2", "r")]);
        assert!(!is_short_exact(&nc, m(&nc, "c"), m(&nc, "r")));
        let z1 = ps(1);
        assert!(is_short_exact(&z1, MorId(0), MorId(0)));
    }

    #[test]
    fn semiexact_fixtures() {
        assert!(is_semiexact(&ps(2)).semiexact);
        assert!(is_semiexact(&ps(3)).semiexact);
        assert!(is_semiexact(&ps(1)).semiexact);
    }

    #[test]
    fn replacement_examples() {
        let nc = ps(2);
        let (id1, i, id2, c, r) = (m(&nc, "id1"), m(&nc, "i"), m(&nc, "id2"), m(&nc, "c"), m(&nc, "r"));
        let e = replacement(&nc, id1, i).unwrap();
        assert!(!is_short_exact(&nc, id1, i));
        assert_eq!(e.replacement, ShortExactSeq { f: id1, g: id1 });
        assert_eq!((e.xi1, e.xi2), (id1, i));

        let e = replacement(&nc, i, id2).unwrap();
        assert_eq!(e.replacement, ShortExactSeq { f: i, g: id2 });
        assert_eq!((e.xi1, e.xi2), (id1, id2));

        assert!(!is_exact(&nc, c, r));
        assert!(matches!(replacement(&nc, c, r), Err(ExactnessError::NotExact(_))));
        assert!(matches!(
            replacement(&nc, id2, id2),
            Err(ExactnessError::NotNullComposite { .. })
        ));
    }

    #[test]
    fn reflection_via_kernel_examples() {
        let nc = ps(2);
        assert!(reflects_null_via_kernel(&nc, m(&nc, "i")).unwrap());
        assert!(!reflects_null_via_kernel(&nc, m(&nc, "r")).unwrap());
        assert!(reflects_null_via_kernel(&ps(1), MorId(0)).unwrap());
    }
}
