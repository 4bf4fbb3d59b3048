#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use sextor_core::cat::{build_pointed_sets, CategoryBuilder, FinCategory, MorId, ObjId};
use sextor_core::ideal::NullCategory;

/// Reflexive-transitive closure of `rel` on `n` points.
pub fn closure(n: usize, rel: &[bool]) -> Vec<Vec<bool>> {
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            le[i][j] = i == j || rel[i * n + j];
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    le
}

/// The thin category of a preorder, with one morphism `a{i}_{j}` per `i ≤ j`.
pub fn thin(le: &[Vec<bool>]) -> Arc<FinCategory> {
    let n = le.len();
    let mut b = CategoryBuilder::new("Pre");
    let objs: Vec<ObjId> = (0..n).map(|i| b.add_object(format!("o{i}")).unwrap()).collect();
    let mut mor = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            if le[i][j] {
                mor[i][j] = Some(b.add_morphism(format!("a{i}_{j}"), objs[i], objs[j]).unwrap());
            }
        }
    }
    for i in 0..n {
        b.set_identity(objs[i], mor[i][i].unwrap()).unwrap();
        for j in 0..n {
            for k in 0..n {
                if let (Some(f), Some(g)) = (mor[i][j], mor[j][k]) {
                    b.set_composite(g, f, mor[i][k].unwrap()).unwrap();
                }
            }
        }
    }
    Arc::new(b.build().unwrap())
}

/// A random preorder on 1..=max points.
pub fn preorder(max: usize) -> impl Strategy<Value = Vec<Vec<bool>>> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.3), n * n).prop_map(move |rel| closure(n, &rel))
    })
}

/// A random preorder category together with a subset of objects.
pub fn preorder_with_objects(max: usize) -> impl Strategy<Value = (Arc<FinCategory>, Vec<ObjId>)> {
    preorder(max).prop_flat_map(|le| {
        let n = le.len();
        let c = thin(&le);
        proptest::collection::vec(any::<bool>(), n).prop_map(move |mask| {
            let zs = (0..n).filter(|&i| mask[i]).map(|i| ObjId(i as u32)).collect();
            (c.clone(), zs)
        })
    })
}

pub fn pointed(n: usize) -> Arc<NullCategory> {
    let c = Arc::new(build_pointed_sets(n).unwrap());
    let p1 = c.find_obj("P1").unwrap();
    Arc::new(NullCategory::through_objects(c, &[p1]).unwrap())
}

pub fn compose(c: &FinCategory, g: MorId, f: MorId) -> MorId {
    c.try_compose(g, f).expect("composable")
}

pub fn between(c: &FinCategory, a: ObjId, b: ObjId) -> Vec<MorId> {
    c.morphisms().filter(|&m| c.dom(m) == a && c.cod(m) == b).collect()
}

/// A morphism is null when it factors through one of `zs`, checked directly.
pub fn factors_through(c: &FinCategory, zs: &[ObjId], m: MorId) -> bool {
    zs.iter().any(|&z| {
        between(c, c.dom(m), z)
            .into_iter()
            .any(|a| between(c, z, c.cod(m)).into_iter().any(|b| compose(c, b, a) == m))
    })
}

pub fn oracle_is_kernel(nc: &NullCategory, k: MorId, f: MorId) -> bool {
    let c = nc.cat();
    if c.cod(k) != c.dom(f) || !nc.is_null(compose(c, f, k)) {
        return false;
    }
    c.morphisms()
        .filter(|&l| c.cod(l) == c.dom(f) && nc.is_null(compose(c, f, l)))
        .all(|l| {
            between(c, c.dom(l), c.dom(k))
                .into_iter()
                .filter(|&m| compose(c, k, m) == l)
                .count()
                == 1
        })
}

pub fn oracle_is_cokernel(nc: &NullCategory, q: MorId, f: MorId) -> bool {
    let c = nc.cat();
    if c.dom(q) != c.cod(f) || !nc.is_null(compose(c, q, f)) {
        return false;
    }
    c.morphisms()
        .filter(|&l| c.dom(l) == c.cod(f) && nc.is_null(compose(c, l, f)))
        .all(|l| {
            between(c, c.cod(q), c.cod(l))
                .into_iter()
                .filter(|&m| compose(c, m, q) == l)
                .count()
                == 1
        })
}

pub fn oracle_short_exact(nc: &NullCategory, f: MorId, g: MorId) -> bool {
    oracle_is_kernel(nc, f, g) && oracle_is_cokernel(nc, g, f)
}
